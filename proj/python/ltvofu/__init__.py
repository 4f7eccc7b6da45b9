# Copyright 2026 The ltvofu Authors
# SPDX-License-Identifier: Apache-2.0
"""Online control of unknown linear time-varying systems."""

from ltvofu._ltvofu import (
    Environment,
    GramState,
    OfuConfig,
    RegretLedger,
    Rng,
    RunRecord,
    Theta,
    backward_recursion,
    build_environment,
    confidence_radius,
    episode_optimal_cost,
    growth_exponent,
    main,
    make_ledger,
    optimal_cost,
    optimal_epoch_length,
    run_algorithm,
)

__all__ = [
    "Environment",
    "GramState",
    "OfuConfig",
    "RegretLedger",
    "Rng",
    "RunRecord",
    "Theta",
    "backward_recursion",
    "build_environment",
    "confidence_radius",
    "episode_optimal_cost",
    "growth_exponent",
    "main",
    "make_ledger",
    "optimal_cost",
    "optimal_epoch_length",
    "run_algorithm",
]
