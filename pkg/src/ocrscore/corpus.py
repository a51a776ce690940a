"""Record model, JSONL ingestion, and content-type segmentation.

A dataset is newline-delimited JSON, one record per line:

    {"id": "...", "domain": "...", "prediction": "...", "ground_truth": "...",
     "gt_image_path": "...", "pred_image_path": "..."}

``id``, ``domain``, ``prediction`` and ``ground_truth`` are required;
the image paths are optional and only meaningful for vision domains.

Segmentation splits markdown-ish text into plain text, display/inline
formulas and literal ``<table>`` blocks so each content type can be scored
by its own reward. Markdown pipe tables are deliberately not recognized;
they score as plain text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import (
    DatasetError,
    DomainError,
    ParseError,
    SchemaError,
    SegmentationError,
)

TEXT_DOMAINS = frozenset({"text_doc", "formula", "table"})
VISION_DOMAINS = frozenset({"chart", "web", "svg", "plot", "molecule"})
DOMAINS = TEXT_DOMAINS | VISION_DOMAINS

PLAIN_TEXT = "plain_text"
FORMULA = "formula"
TABLE = "table"


@dataclass(frozen=True)
class EvalRecord:
    """One scoring unit: a prediction paired with its ground truth."""

    id: str
    domain: str
    prediction: str
    ground_truth: str
    gt_image_path: str | None = None
    pred_image_path: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise SchemaError("field 'id' must be a non-empty string")
        if self.domain not in DOMAINS:
            raise DomainError(
                f"unknown domain {self.domain!r}; expected one of "
                + ", ".join(sorted(DOMAINS))
            )

    def is_vision(self) -> bool:
        return self.domain in VISION_DOMAINS


@dataclass(frozen=True)
class Span:
    """One contiguous run of a single content type, in document order."""

    kind: str  # "text" | "formula" | "table"
    body: str  # formula spans hold the inner LaTeX, delimiters stripped
    open_delim: str = ""
    close_delim: str = ""


@dataclass(frozen=True)
class SegmentedContent:
    """Document split into content-type spans, order preserved."""

    spans: tuple[Span, ...] = field(default_factory=tuple)

    @property
    def text_spans(self) -> list[str]:
        return [s.body for s in self.spans if s.kind == "text"]

    @property
    def formulas(self) -> list[str]:
        return [s.body for s in self.spans if s.kind == "formula"]

    @property
    def tables(self) -> list[str]:
        return [s.body for s in self.spans if s.kind == "table"]

    def reconstruct(self) -> str:
        """Source text with all delimiters restored."""
        return "".join(s.open_delim + s.body + s.close_delim for s in self.spans)


_REQUIRED_FIELDS = ("id", "domain", "prediction", "ground_truth")
_OPTIONAL_FIELDS = ("gt_image_path", "pred_image_path")


def parse_record_line(line: str, line_number: int | None = None) -> EvalRecord:
    """Parse one JSONL line into a validated record. Unknown keys are ignored."""
    where = f" on line {line_number}" if line_number is not None else ""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON{where}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"expected a JSON object{where}")
    for name in _REQUIRED_FIELDS:
        if name not in obj:
            raise SchemaError(f"missing required field '{name}'{where}")
        if not isinstance(obj[name], str):
            raise SchemaError(f"field '{name}' must be a string{where}")
    kwargs = {name: obj[name] for name in _REQUIRED_FIELDS}
    for name in _OPTIONAL_FIELDS:
        value = obj.get(name)
        if value is not None and not isinstance(value, str):
            raise SchemaError(f"field '{name}' must be a string{where}")
        kwargs[name] = value
    return EvalRecord(**kwargs)


def serialize_record(record: EvalRecord) -> str:
    """Inverse of :func:`parse_record_line`; omits unset optional fields."""
    obj = {
        "id": record.id,
        "domain": record.domain,
        "prediction": record.prediction,
        "ground_truth": record.ground_truth,
    }
    if record.gt_image_path is not None:
        obj["gt_image_path"] = record.gt_image_path
    if record.pred_image_path is not None:
        obj["pred_image_path"] = record.pred_image_path
    return json.dumps(obj, ensure_ascii=False)


def load_dataset(path: str) -> list[EvalRecord]:
    """Load a JSONL dataset, preserving file order and rejecting duplicate ids."""
    records: list[EvalRecord] = []
    seen: dict[str, int] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line_number, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                record = parse_record_line(line, line_number=line_number)
                if record.id in seen:
                    raise DatasetError(
                        f"duplicate id {record.id!r} on lines "
                        f"{seen[record.id]} and {line_number}"
                    )
                seen[record.id] = line_number
                records.append(record)
    except OSError as exc:
        raise DatasetError(f"cannot read dataset {path!r}: {exc}") from exc
    return records


def _byte_offset(source: str, index: int) -> int:
    return len(source[:index].encode("utf-8"))


def _table_open_at(source: str, i: int) -> bool:
    if source[i : i + 6].lower() != "<table":
        return False
    after = source[i + 6 : i + 7]
    return after == ">" or after.isspace()


def segment_content(source: str) -> SegmentedContent:
    """Split ``source`` into text, formula, and table spans.

    Recognized delimiters, first match wins while scanning left to right:
    ``$$...$$`` and ``\\[...\\]`` display formulas, ``$...$`` inline
    formulas, and literal ``<table ...>...</table>`` blocks. Nested dollar
    signs are not supported. An opener without its closer raises
    :class:`SegmentationError` with the opener's byte offset.
    """
    spans: list[Span] = []
    text_start = 0
    i = 0
    n = len(source)

    def flush_text(end: int) -> None:
        if end > text_start:
            spans.append(Span("text", source[text_start:end]))

    while i < n:
        ch = source[i]
        if ch == "$":
            flush_text(i)
            if source[i : i + 2] == "$$":
                close = source.find("$$", i + 2)
                if close < 0:
                    raise SegmentationError(
                        f"unclosed $$ formula at byte offset {_byte_offset(source, i)}"
                    )
                spans.append(Span("formula", source[i + 2 : close], "$$", "$$"))
                i = close + 2
            else:
                close = source.find("$", i + 1)
                if close < 0:
                    raise SegmentationError(
                        f"unclosed $ formula at byte offset {_byte_offset(source, i)}"
                    )
                spans.append(Span("formula", source[i + 1 : close], "$", "$"))
                i = close + 1
            text_start = i
        elif ch == "\\" and source[i : i + 2] == "\\[":
            flush_text(i)
            close = source.find("\\]", i + 2)
            if close < 0:
                raise SegmentationError(
                    f"unclosed \\[ formula at byte offset {_byte_offset(source, i)}"
                )
            spans.append(Span("formula", source[i + 2 : close], "\\[", "\\]"))
            i = close + 2
            text_start = i
        elif ch == "<" and _table_open_at(source, i):
            flush_text(i)
            lower = source.lower()
            close = lower.find("</table>", i)
            if close < 0:
                raise SegmentationError(
                    f"unclosed <table> block at byte offset {_byte_offset(source, i)}"
                )
            end = close + len("</table>")
            spans.append(Span("table", source[i:end]))
            i = end
            text_start = i
        else:
            i += 1
    flush_text(n)
    return SegmentedContent(spans=tuple(spans))
