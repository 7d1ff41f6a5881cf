"""Exception types shared across the package."""


class KRobustError(Exception):
    """Base class for all library errors."""


class MalformedSchedule(KRobustError):
    """A schedule violates one of its structural invariants."""


class TrivialInstance(KRobustError):
    """The final-day cardinality bound makes the instance trivial (value 0)."""


class MissingResidual(KRobustError):
    """A plan lacks a residual entry for some ground unit."""

    def __init__(self, unit):
        super().__init__(f"no residual entry for ground unit {unit!r}")
        self.unit = unit


class UnknownEdge(KRobustError):
    """An edge id does not exist in the graph."""


class Disconnected(KRobustError):
    """Vertices or terminal pairs that must be connected are not."""


class Infeasible(KRobustError):
    """The instance admits no feasible solution (e.g. an uncoverable element)."""


class TooLarge(KRobustError):
    """The instance exceeds the oracle's exhaustive-search size limits."""


class BadParameters(KRobustError):
    """Generator parameters are outside their documented ranges."""


class InstanceFormatError(KRobustError):
    """An instance document failed to parse; carries the offending field path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.detail = message
