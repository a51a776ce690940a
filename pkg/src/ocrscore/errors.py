"""Exception hierarchy shared across the package.

Each subclass maps to one CLI exit code class: config problems exit 2,
dataset/input problems exit 3, transport problems exit 4, anything else 5.
"""


class OcrScoreError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(OcrScoreError):
    """Invalid or incomplete run configuration (exit code 2)."""


class DatasetError(OcrScoreError):
    """Dataset-level violation, e.g. duplicate record ids (exit code 3)."""


class ParseError(DatasetError):
    """Malformed JSON on a dataset line; message carries the line number."""


class SchemaError(DatasetError):
    """A required record field is missing; message names the field."""


class DomainError(DatasetError):
    """Record carries a domain tag outside the known taxonomy."""


class SegmentationError(DatasetError):
    """Unclosed formula or table delimiter; message carries the byte offset."""


class NormalizationError(DatasetError):
    """Input cannot be normalized, e.g. no <table> element found."""


class InputError(DatasetError):
    """An input artifact such as an image file cannot be decoded."""


class ContractError(OcrScoreError):
    """A documented precondition was violated by the caller."""


class TransportError(OcrScoreError):
    """Remote embedding backend unreachable or misbehaving (exit code 4)."""


class ReportError(OcrScoreError):
    """Report cannot be produced, e.g. empty input corpus."""
