"""Exception types raised across the package."""


class HetNetError(Exception):
    """Base class; ``category`` is the machine-readable tag the CLI reports."""

    category = "error"


class DomainError(HetNetError, ValueError):
    category = "domain"


class InvalidParams(HetNetError, ValueError):
    category = "invalid_params"


class NonConvergence(HetNetError, ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance.

    ``level`` names where it happened (``"outer"``, ``"inner"`` or a rate name).
    """

    category = "non_convergence"

    def __init__(self, message, value=None, error=None, level=None):
        super().__init__(message)
        self.value = value
        self.error = error
        self.level = level


class DegenerateModel(HetNetError, ZeroDivisionError):
    category = "degenerate_model"


class RankDeficient(HetNetError, ArithmeticError):
    category = "rank_deficient"


class EmptyTier(HetNetError, ValueError):
    category = "empty_tier"


class ConfigError(HetNetError, ValueError):
    category = "config"
