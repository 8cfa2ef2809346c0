"""Exception hierarchy shared by the avdsprep modules."""


class AvdsprepError(Exception):
    """Base class for all avdsprep errors."""


class InvalidConfig(AvdsprepError):
    """A configuration value violates its documented invariants."""


class DimensionMismatch(AvdsprepError):
    """Two rasters that must share a shape do not."""


class EmptyPipeline(InvalidConfig):
    """A pipeline configuration enables no stage at all."""


class CodecError(AvdsprepError):
    """Base class for PNM codec failures."""


class MalformedHeader(CodecError):
    """The PNM header is unparseable (bad magic, dimensions, or tokens)."""


class Truncated(CodecError):
    """The PNM payload is shorter than the header promises."""


class UnsupportedMaxval(CodecError):
    """The PNM maxval is outside the supported (0, 65535] range."""
