"""Exception hierarchy shared by all gazemap modules."""


class GazemapError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(GazemapError):
    """An input file or record violates its declared format or invariants."""


class ConfigError(GazemapError):
    """A configuration value is out of range or unknown."""


class InternalError(GazemapError):
    """An internal invariant was violated; indicates a bug, not bad input."""
