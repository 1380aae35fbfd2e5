"""Exception hierarchy shared across the engine."""


class LottoError(Exception):
    """Base class for all engine errors."""


class GameDomainError(LottoError, ValueError):
    """A parameter lies outside its mathematical domain."""


class DegenerateBattlefieldError(GameDomainError):
    """No competition is defined on a zero-value battlefield."""


class ResponseStructureError(LottoError, ValueError):
    """A response references battlefields outside the pre-committed set."""


class InfeasibleResponseError(LottoError, ValueError):
    """A response or pre-commitment overspends the available budget."""


class EnumerationCapError(LottoError):
    """Exact subset enumeration refused; the target set is too large."""


class ConvergenceError(LottoError, RuntimeError):
    """A numerical search failed to reach the requested residual."""


class InvalidEquilibriumError(GameDomainError):
    """The supplied point is not a zero of the solution function."""
