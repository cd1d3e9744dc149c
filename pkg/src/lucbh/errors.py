"""Exception hierarchy shared across the package."""


class LucbhError(Exception):
    """Base class for all errors raised by this package."""


class InstanceError(LucbhError, ValueError):
    pass


class DuplicateBest(InstanceError):
    """Two or more arms tie for the largest online mean."""


class LengthMismatch(InstanceError):
    pass


class DeltaOutOfRange(InstanceError):
    pass


class BestArmQuery(LucbhError, ValueError):
    """A per-arm saving/gap quantity was requested for the best arm (zero gap)."""


class CasePreconditionViolated(LucbhError, ValueError):
    pass


class DegenerateEpsilon(LucbhError, ValueError):
    """delta**epsilon rounds to 1, so the alternative offline mean is undefined."""


class ConfigError(LucbhError, ValueError):
    pass


class UnknownPreset(LucbhError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else "unknown preset"


class ParseError(LucbhError, ValueError):
    pass
