"""Exception hierarchy shared by all modules."""


class GahError(Exception):
    """Base class for every error raised by gahtorus."""


class CertificationFailure(GahError):
    """Sign certification hit the subdivision depth limit."""


class NeedsExactness(GahError):
    """A float-only input lies too close to a measure-zero set to decide."""


class ModeOutOfRange(GahError):
    pass


class InsufficientData(GahError):
    pass


class ResonantGamma(GahError):
    """gamma lies in iZ, so the periodic problem is not uniquely solvable."""

    def __init__(self, message, modes=()):
        super().__init__(message)
        self.modes = list(modes)


class IncompatibleData(GahError):
    pass


class NotSignChanging(GahError):
    pass


class NotResonant(GahError):
    pass


class KSearchFailed(GahError):
    pass


class QuadratureUnderResolved(GahError):
    pass


class HypothesisFails(GahError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class InconsistencyDetected(GahError):
    pass


class ConfigError(GahError):
    pass
