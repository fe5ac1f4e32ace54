"""Exception hierarchy shared by all qcorr modules."""


class QcorrError(Exception):
    """Base class for every error raised by qcorr."""


class DimensionMismatch(QcorrError, ValueError):
    pass


class NotHermitian(QcorrError, ValueError):
    pass


class NotPSD(QcorrError, ValueError):
    pass


class InvalidState(QcorrError, ValueError):
    pass


class OutOfRange(QcorrError, ValueError):
    pass


class SeparationTooSmall(OutOfRange):
    """Collective shift requested at a separation where it diverges."""


class StepSizeTooLarge(QcorrError, RuntimeError):
    """Step-halving acceptance test failed twice in a row."""


class ParseError(QcorrError, ValueError):
    pass


class ConfigError(QcorrError, ValueError):
    pass


class UnknownColumn(QcorrError, KeyError):
    pass
