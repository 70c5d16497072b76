"""Exception hierarchy shared by all modules."""


class AbspinError(Exception):
    """Base class for every error raised by abspin."""


class DomainError(AbspinError, ValueError):
    """Argument outside the mathematical domain of a function."""


class DegenerateOrderError(AbspinError, ValueError):
    """m + alpha lies within 1e-9 of an integer."""


class MatchingSingularError(AbspinError, ArithmeticError):
    """The shell matching system is numerically singular."""


class NonConvergenceError(AbspinError, ArithmeticError):
    """Richardson residuals failed to decrease."""


class ConsistencyError(AbspinError, RuntimeError):
    """More than one channel passed the critical-channel test."""


class ForwardSingularityError(AbspinError, ValueError):
    """Angle inside the excluded forward cone."""


class InsufficientCutoffError(AbspinError, ValueError):
    """Partial-wave cutoff too small for the requested accuracy."""


class NonUnitVectorError(AbspinError, ValueError):
    """A polarization vector is not normalized."""


class ZeroIntensityError(AbspinError, ZeroDivisionError):
    """Scattered intensity vanishes; polarization undefined."""


class NonFiniteAmplitudeError(AbspinError, ValueError):
    """Amplitude contains NaN or infinity."""


class ConfigError(AbspinError, ValueError):
    """Invalid run configuration."""
