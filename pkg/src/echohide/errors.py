"""Exception types shared across the package."""


class EchoHideError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(EchoHideError):
    """Unsupported or malformed audio file format."""


class ShapeError(EchoHideError):
    """Mismatched lengths or dimensions between inputs."""


class ParameterError(EchoHideError):
    """A parameter is outside its valid range."""


class CapacityError(EchoHideError):
    """The carrier has too few frames for the requested payload."""


class DegenerateSignalError(EchoHideError):
    """An input signal (or frame) is degenerate, e.g. all-zero."""


class WeakKeyError(EchoHideError):
    """Key material would produce a degenerate keystream."""


class CorruptHeaderError(EchoHideError):
    """The embedded length header decoded to an impossible value."""


class ConfigError(EchoHideError):
    """A configuration document is invalid or incomplete."""


class CodecUnavailableError(EchoHideError):
    """An external codec needed for an attack is not configured/present."""
