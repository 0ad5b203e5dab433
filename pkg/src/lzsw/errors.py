"""Exception types shared across the package."""


class LzswError(Exception):
    """Base class for all package errors."""


class UnknownSymbolError(LzswError):
    """A token in the input does not belong to the declared alphabet."""


class EmptyInputError(LzswError):
    """An input file or sequence body is empty."""


class InvalidParamsError(LzswError):
    """Generator or operation parameters are out of range or inconsistent."""


class DivisibilityError(LzswError):
    """A block length does not divide the sequence length."""


class MalformedStreamError(LzswError):
    """A bitstream cannot be decoded (truncated bits, index out of range)."""


class InvalidFlagError(MalformedStreamError):
    """The scheme selector of a combined stream holds an unused value."""


class LengthMismatchError(LzswError):
    """Two sequences that must have equal length do not."""


class EmptyBinError(LzswError):
    """No candidate pair is consistent with the announced bins."""


class EmptyClassError(LzswError):
    """No sequence of the requested length has the requested phrase count."""


class ScaleExceededError(LzswError):
    """The request requires enumerating more sequences than the desk-scale cap."""
