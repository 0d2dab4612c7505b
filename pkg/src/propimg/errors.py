"""Exception hierarchy shared by the whole toolkit.

``DataError`` subclasses mean the input content is wrong (exit code 2 from
the CLI); ``IoFailure`` means the OS-level read/write failed (exit code 3).
"""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class DataError(ToolkitError):
    """Invalid input content (bad values, shapes, formats)."""


class DegenerateBounds(DataError):
    """Global bounds with max <= min."""


class NonFiniteInput(DataError):
    """NaN or Inf where a finite value is required."""


class WindowTooShort(DataError):
    """Window shorter than the minimum of 4 samples."""


class ShapeMismatch(DataError):
    """Array dimensions differ from what the operation requires."""


class MissingLeg(DataError):
    """A four-leg composition is missing one of LF/RF/LH/RH."""


class MissingColumn(DataError):
    """Manifest references a CSV column that does not exist."""


class InvalidBounds(DataError):
    """Manifest bounds entry is not a valid (min, max) pair."""


class MalformedManifest(DataError):
    """Manifest JSON is structurally invalid; message names the field."""


class NonMonotonicTime(DataError):
    """CSV time column is not strictly increasing."""


class TooFewRows(DataError):
    """CSV has fewer rows than one window."""


class BadMagic(DataError):
    """File does not start with the PIT magic bytes."""


class UnsupportedVersion(DataError):
    """PIT file version this reader does not understand."""


class TruncatedFile(DataError):
    """PIT file ends mid-header or mid-record; message carries the byte offset."""


class IndexOutOfRange(DataError):
    """Record index past the end of a PIT file."""


class InvalidSpec(DataError):
    """Gait generator spec violates its invariants."""


class EmptyInput(DataError):
    """Operation received zero rows/records."""


class IoFailure(ToolkitError):
    """Underlying OS read/write failed."""
