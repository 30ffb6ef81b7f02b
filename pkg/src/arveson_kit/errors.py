"""Exception hierarchy shared by every module of the toolkit."""


class ArvesonKitError(Exception):
    """Base class for all toolkit errors."""


class ModelMismatch(ArvesonKitError):
    pass


class EvaluationOverflow(ArvesonKitError):
    pass


class GridTooCoarse(ArvesonKitError):
    pass


class NoAdjoint(ArvesonKitError):
    pass


class SignatureMismatch(ArvesonKitError):
    pass


class NotContinuous(ArvesonKitError):
    pass


class RankDeficientFamily(ArvesonKitError):
    pass


class OverlapError(ArvesonKitError):
    pass


class HypothesisFailed(ArvesonKitError):
    """Raised when some generator of ker(omega0) keeps a non-vanishing ergodic average.

    ``failures`` is a list of ``(generator label, frequency, |average|)`` tuples.
    """

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)


class NotAState(ArvesonKitError):
    pass


class NotInvariant(ArvesonKitError):
    pass


class InvalidConfig(ArvesonKitError):
    """Model construction failed; ``fields`` maps field names to diagnostics."""

    def __init__(self, message, fields=None):
        super().__init__(message)
        self.fields = dict(fields or {})


class TailNotSummable(ArvesonKitError):
    pass


class BadSmearing(ArvesonKitError):
    pass


class BadPartition(ArvesonKitError):
    pass


class EpsilonTooLarge(ArvesonKitError):
    pass


class NotCentered(ArvesonKitError):
    pass


class ConfigError(ArvesonKitError):
    """Experiment configuration is invalid; ``pointers`` holds JSON pointers."""

    def __init__(self, message, pointers=()):
        super().__init__(message)
        self.pointers = list(pointers)


class CheckFailure(ArvesonKitError):
    def __init__(self, message, check_ids=()):
        super().__init__(message)
        self.check_ids = list(check_ids)


class MissingCurve(ArvesonKitError):
    pass
