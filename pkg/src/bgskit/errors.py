"""Exception types shared across the toolkit.

Everything raised on bad data derives from :class:`ToolkitError` so the CLI
can map it to exit code 1; genuine programming mistakes stay ValueError.
"""


class ToolkitError(Exception):
    """Base class for recoverable data errors."""


class OutOfBoundsError(ToolkitError):
    """A crop window (or one of its shifted/scaled steps) leaves the image."""


class DimensionMismatchError(ToolkitError):
    """Two arrays that must share a shape do not."""


class MissingDonorError(ToolkitError):
    """A plan requests object addition but no donor sample was supplied."""


class EmptyDonorPoolError(ToolkitError):
    """Object addition is enabled but the donor pool is empty."""


class EmptySequenceError(ToolkitError):
    """An operation that needs at least one frame received none."""


class FrameIdOutOfRangeError(ToolkitError):
    """A manually selected frame id does not exist in the video."""


class NonPositiveSmoothingError(ToolkitError):
    """The Jaccard smoothing constant must be strictly positive."""


class MismatchedCategoriesError(ToolkitError):
    """Methods being ranked do not report the same category set."""


class EmptyInputError(ToolkitError):
    """An aggregation received no reports."""


class UnknownFoldError(ToolkitError):
    """A fold id outside S1..S4 was requested."""


class BadMagicError(ToolkitError):
    """A tensor container file does not start with the expected magic bytes."""


class UnsupportedVersionError(ToolkitError):
    """A tensor container declares a version or dtype this build cannot read."""


class TruncatedFileError(ToolkitError):
    """A tensor container ends before its declared payload."""


class MissingDirectoryError(ToolkitError):
    """An expected dataset directory is absent."""


class CorruptImageError(ToolkitError):
    """A frame or ground-truth file could not be decoded."""


class InconsistentFrameCountError(ToolkitError):
    """Frame and ground-truth file counts disagree."""


class ConfigError(ToolkitError):
    """A configuration file contains unknown keys or unparsable values."""
