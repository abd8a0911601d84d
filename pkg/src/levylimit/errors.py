"""Exception types raised across the package."""


class LevyLimitError(Exception):
    """Base class for all package errors."""


class QuadratureError(LevyLimitError):
    """A numerical integral failed to reach its tolerance."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (residual estimate {residual:.3g})")
        self.residual = residual


class InvalidTripletError(LevyLimitError):
    """The tail functions do not describe a Levy measure."""


class DegenerateTailError(LevyLimitError):
    """A diagnostic ratio is undefined because the jump measure is empty."""


class NoNormingError(LevyLimitError):
    """Norming constants could not be found by root finding."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class HorizonError(LevyLimitError):
    """A path is too short for the requested time scaling."""


class SamplingError(LevyLimitError):
    """A sampler repeatedly produced non-finite values."""


class ConfigError(LevyLimitError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
