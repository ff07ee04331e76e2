"""Exception types shared across the package."""


class DesknetError(Exception):
    """Base class for all desknet errors."""


class InvalidShapeError(DesknetError):
    """A shape has a non-positive extent, bad rank, or non-integer dims."""


class ShapeMismatchError(DesknetError):
    """Operand shapes are incompatible for the requested operation."""


class InvalidRangeError(DesknetError):
    """A numeric argument (bound, rate, hyperparameter) is out of range."""


class InvalidGeometryError(DesknetError):
    """Convolution/pooling geometry does not produce integral output sizes."""


class NonFiniteError(DesknetError):
    """An operation produced NaN or Inf from finite inputs."""


class StaleCacheError(DesknetError):
    """A forward cache was consumed by more than one backward pass."""


class DivergedError(DesknetError):
    """Training produced non-finite gradients or loss."""


class DataFormatError(DesknetError):
    """A dataset file does not match its documented binary layout."""


class DataLengthError(DataFormatError):
    """A dataset file is truncated or carries trailing bytes."""


class DataConsistencyError(DataFormatError):
    """Companion dataset files disagree (e.g. image/label counts)."""


class DataRangeError(DataFormatError):
    """A dataset record holds an out-of-range value (e.g. label byte > 9)."""


class ChecksumError(DesknetError):
    """A downloaded file does not match the manifest checksum."""


class CheckpointError(DesknetError):
    """A checkpoint file is malformed or inconsistent with its header."""
