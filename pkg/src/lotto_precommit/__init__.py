"""General Lotto games with public resource pre-commitments."""

from .errors import (
    ConvergenceError,
    DegenerateBattlefieldError,
    EnumerationCapError,
    GameDomainError,
    InfeasibleResponseError,
    InvalidEquilibriumError,
    LottoError,
    ResponseStructureError,
)
from .lotto import (
    GLInstance,
    MarginalCDF,
    PayoffPair,
    equilibrium_marginal,
    nominal_payoffs,
    payoff_fraction,
    residual_share,
    sample_allocation,
)

__all__ = [
    "ConvergenceError",
    "DegenerateBattlefieldError",
    "EnumerationCapError",
    "GameDomainError",
    "GLInstance",
    "InfeasibleResponseError",
    "InvalidEquilibriumError",
    "LottoError",
    "MarginalCDF",
    "PayoffPair",
    "ResponseStructureError",
    "equilibrium_marginal",
    "nominal_payoffs",
    "payoff_fraction",
    "residual_share",
    "sample_allocation",
]

__version__ = "0.1.0"
