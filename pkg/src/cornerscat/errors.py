"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid physical or run configuration."""


class ContractViolation(ValueError):
    """An operation was called outside its documented contract."""


class GridResolutionError(ValueError):
    """A grid is too coarse for the requested operation."""


class SolverError(RuntimeError):
    """An iterative solve failed; carries the residual history when known."""

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = list(residuals) if residuals is not None else []
