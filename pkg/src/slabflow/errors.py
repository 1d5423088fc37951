"""Exception types shared across the solver and the CLI."""


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


class InvertedElementError(RuntimeError):
    """The reconstructed volume ratio J = det(F) is non-positive somewhere.

    Carries enough context to locate the failure (slab index and Picard
    iterate when raised inside the solver loop).
    """

    def __init__(self, message, slab=None, iteration=None):
        super().__init__(message)
        self.slab = slab
        self.iteration = iteration


class PicardConvergenceError(RuntimeError):
    """Fixed-point iteration did not reach tolerance within the budget."""

    def __init__(self, message, slab=None, residuals=None):
        super().__init__(message)
        self.slab = slab
        self.residuals = list(residuals) if residuals is not None else []


class SingularSystemError(RuntimeError):
    """The slab block system could not be factorized."""

    def __init__(self, message, slab=None, iteration=None):
        super().__init__(message)
        self.slab = slab
        self.iteration = iteration
