"""Exception types shared across the package.

The taxonomy separates caller mistakes (configuration, phantom deletions,
unsupported ops) from data problems (trace and export parsing) so the CLI can
map each family onto a distinct exit code.
"""


class SketchError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(SketchError):
    """Invalid dimensions, malformed spec fields, or impossible settings."""


class UnsupportedOperationError(SketchError):
    """The sketch variant does not implement the requested operation."""


class PhantomDeletionError(SketchError):
    """A deletion targeted an item whose remaining count is zero.

    Deletion semantics presuppose matched inserts; hitting a zero counter
    means the caller broke that contract, and estimates for the affected keys
    can no longer be trusted.
    """


class SaturationError(SketchError):
    """A counter increment would overflow its fixed width."""


class UndefinedMetricError(SketchError):
    """A metric was requested where it has no definition.

    Relative error divides by the true frequency, so items that were never
    inserted have no relative error; likewise the per-insert update rate is
    undefined before the first insertion.
    """


class TraceFormatError(SketchError):
    """A trace file could not be parsed; carries the 1-based line number."""

    def __init__(self, line_number, message):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ExportFormatError(SketchError):
    """Base for malformed export payloads."""


class BadMagicError(ExportFormatError):
    """The payload does not start with the expected magic bytes."""


class UnsupportedVersionError(ExportFormatError):
    """The payload's format version is not one this reader understands."""


class PayloadLengthError(ExportFormatError):
    """The payload is truncated or carries trailing bytes."""


class UnknownVariantCodeError(ExportFormatError):
    """The header names a variant code this reader does not know."""
