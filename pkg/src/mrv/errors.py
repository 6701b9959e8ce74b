"""Exception taxonomy for the ordering pipeline."""


class MrvError(Exception):
    """Base class for all errors raised by this package."""


# committed-DAG store

class UnknownDigest(MrvError):
    pass


class MissingParent(MrvError):
    pass


class BadParentRound(MrvError):
    """Parent reference does not point exactly one round below the child."""


class DuplicateCreatorRound(MrvError):
    """A second vertex arrived for an occupied (creator, round) slot."""


class FrontierSkew(MrvError):
    """Round applied out of order against the committed frontier."""


# event stream and log files

class NonConsecutiveRound(MrvError):
    pass


class DuplicateSliceMember(MrvError):
    pass


class UnknownSliceMember(MrvError):
    pass


class MalformedEvent(MrvError):
    """Event violates the committed-output schema."""


class CorruptLog(MrvError):
    """Log bytes fail structural or checksum validation."""


class InvalidLog(MrvError):
    """Replayed stream violates the committed-output contract."""


# visibility tracking

class UnknownAuf(MrvError):
    pass


class RoundNotRecorded(MrvError):
    pass


# pairwise comparison

class UnsettledStoppingTime(MrvError):
    pass


class HorizonNotReached(MrvError):
    pass


# slice sealing

class UnsettledMember(MrvError):
    pass


class UnfrozenPair(MrvError):
    pass


# simulation and verification

class InfeasiblePlan(MrvError):
    pass


class UnknownScenario(MrvError):
    pass


class ConfigMismatch(MrvError):
    pass
