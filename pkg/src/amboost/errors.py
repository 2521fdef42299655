"""Exception types shared across the package."""


class NumericError(RuntimeError):
    """Raised when predictor or scale values overflow the safe floating range.

    Carries the index of the first offending entry in ``index`` when known.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ConfigError(ValueError):
    """Invalid experiment or run configuration."""


class IntegrityError(ValueError):
    """A run artifact is incomplete or inconsistent with its manifest."""
