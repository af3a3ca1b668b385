class RancherError(Exception):
    """Base class for every error raised by the simulation services"""


class InvalidIntervalError(RancherError, ValueError):
    pass


class DegenerateHullError(RancherError):
    """The hull has no interior (fewer than 3 vertices or zero area)"""


class UndefinedAngleError(RancherError):
    pass


class HullPreconditionError(RancherError):
    """An inserted point is not reachable from the cursor without crossing the hull interior"""


class InvalidLineError(RancherError, ValueError):
    pass


class NoPastError(RancherError):
    pass


class InvalidDatumError(RancherError, ValueError):
    pass


class RankDeficiencyError(RancherError, ValueError):
    pass


class DomainError(RancherError, ValueError):
    pass


class UsageError(RancherError):
    pass


class OutputError(RancherError):
    pass
