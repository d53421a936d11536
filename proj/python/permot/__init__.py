"""Permanental point processes, Monge-Ampere potentials and optimal transport."""

from ._core import (
    ConvexBody,
    InvalidInput,
    PrecisionLoss,
    envelope_1d,
    hamiltonian,
    lattice_points,
    legendre_1d,
    log_permanent,
    marginal_matrix,
    min_cost_assignment,
    run_acceptance,
    solve_ma_1d,
    transport_map,
    wasserstein1,
)

__all__ = [
    "ConvexBody",
    "InvalidInput",
    "PrecisionLoss",
    "envelope_1d",
    "hamiltonian",
    "lattice_points",
    "legendre_1d",
    "log_permanent",
    "marginal_matrix",
    "min_cost_assignment",
    "run_acceptance",
    "solve_ma_1d",
    "transport_map",
    "wasserstein1",
]
