"""Exception types raised across the package."""


class LocalColorError(Exception):
    pass


class DegreeTooLarge(LocalColorError):
    pass


class MissingColor(LocalColorError):
    pass


class RoundLimitExceeded(LocalColorError):
    pass


class InvalidConfig(LocalColorError):
    pass


class InvalidAlpha(LocalColorError, ValueError):
    pass


class SlackTooSmall(LocalColorError):
    pass


class SubInstanceSlackViolation(LocalColorError, AssertionError):
    """A constructed sub-instance does not have the slack its construction promises."""


class InvalidPartition(LocalColorError, ValueError):
    pass


class UncoloredNodeRemains(LocalColorError, AssertionError):
    pass


class DefectExceeded(LocalColorError, AssertionError):
    pass


class SizeLimit(LocalColorError):
    pass


class SearchTimeout(LocalColorError):
    pass


class BadDelta(LocalColorError, ValueError):
    pass


class InfeasibleParams(LocalColorError, ValueError):
    pass


class SpecParse(LocalColorError, ValueError):
    pass
