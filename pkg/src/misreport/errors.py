"""Exception types shared across the package."""


class MisreportError(Exception):
    """Base class for all package-specific errors."""


class InvalidParamsError(MisreportError, ValueError):
    """A parameter set violates stationarity/invertibility or range constraints."""


class NonIdentifiableError(MisreportError, ValueError):
    """The requested quantity is not identifiable from the given configuration."""


class MixtureDegeneracyError(MisreportError, RuntimeError):
    """EM collapsed onto a degenerate component and restarts did not recover."""


class EstimationError(MisreportError, RuntimeError):
    """The iterative estimation algorithm reached an invalid state."""


class DataError(MisreportError, ValueError):
    """Input data could not be read or does not satisfy preconditions."""
