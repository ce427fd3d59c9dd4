"""Exception types raised by the library."""


class GicError(Exception):
    """Base class for all library errors."""


class DegenerateDirectLink(GicError):
    """A direct channel gain is zero, so the standard form does not exist."""


class InvalidNoise(GicError):
    """A noise power is zero or negative."""


class InvalidSubset(GicError):
    """A decoding group intersects the treated-as-noise set of its receiver."""


class EnumerationTooLarge(GicError):
    """The request would enumerate more schemes/covers than the size guard allows."""


class OracleFailure(GicError):
    """The LP oracle failed numerically; the result would not be trustworthy."""


class WrongTopology(GicError):
    """A specialised classifier was handed a channel of the wrong shape."""
