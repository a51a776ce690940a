"""End-to-end record scoring: domain dispatch, parallelism, aggregation.

Text-domain records go through segmentation and the per-content-type
rewards; vision-domain records get the format-alignment reward plus the
multi-scale visual reward when a prediction image is available (given
directly via ``pred_image_path`` or produced by the configured renderer).

Failure semantics, chosen so one bad model output never kills a run:
a prediction that cannot be segmented is scored as plain text; a render
failure scores the visual reward 0 (the model's code did not execute);
an embedding-backend failure leaves the record unscored — not zero —
and is surfaced so the caller can exit with a transport error code.
"""

from __future__ import annotations

import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from .bench import BenchReport, ScoredRecord, aggregate_report
from .config import BACKEND_REMOTE, RunConfig
from .corpus import (
    FORMULA,
    PLAIN_TEXT,
    TABLE,
    EvalRecord,
    SegmentedContent,
    Span,
    load_dataset,
    segment_content,
)
from .errors import (
    ConfigError,
    ContractError,
    DatasetError,
    SegmentationError,
    TransportError,
)
from .reward_text import aggregate_text_reward, paired_table_reward
from .reward_vision import (
    HTML,
    LATEX_TIKZ,
    MOLECULE_CODE,
    PYTHON_PLOT,
    SVG,
    EmbeddingBackend,
    RemoteEmbedder,
    format_alignment_reward,
    load_image,
    multiscale_vision_reward,
    render_via_command,
    stub_embed,
)

DOMAIN_FORMATS = {
    "chart": PYTHON_PLOT,
    "web": HTML,
    "svg": SVG,
    "plot": LATEX_TIKZ,
    "molecule": MOLECULE_CODE,
}


def make_backend(config: RunConfig) -> EmbeddingBackend:
    """Instantiate the embedding backend the config asks for."""
    vision = config.vision
    if vision.backend == BACKEND_REMOTE:
        if not vision.endpoint:
            raise ConfigError("vision.backend is 'remote' but no endpoint is set")
        return RemoteEmbedder(
            vision.endpoint,
            timeout=vision.timeout,
            retries=vision.retries,
            max_in_flight=max(1, config.workers),
        )
    return stub_embed


class ScoringContext:
    """Shared, thread-safe state for one scoring run."""

    def __init__(
        self,
        config: RunConfig,
        base_dir: Path,
        backend: EmbeddingBackend | None = None,
    ):
        self.vision_cfg = config.vision.reward
        self.render = config.render
        self.base_dir = base_dir
        self.backend = backend if backend is not None else make_backend(config)
        self._lock = threading.Lock()
        self.transport_failures: list[str] = []

    def resolve(self, path: str) -> Path:
        """Image paths are taken relative to the dataset file's directory."""
        candidate = Path(path)
        return candidate if candidate.is_absolute() else self.base_dir / candidate

    def note_transport_failure(self, record_id: str) -> None:
        with self._lock:
            self.transport_failures.append(record_id)


def _segment_prediction(record: EvalRecord, warnings: list[str]) -> SegmentedContent:
    try:
        return segment_content(record.prediction)
    except SegmentationError as exc:
        warnings.append(f"prediction not segmentable ({exc}); scored as plain text")
        return SegmentedContent(spans=(Span("text", record.prediction),))


def score_text_record(record: EvalRecord) -> ScoredRecord:
    """Segment both sides and compute the per-content-type rewards.

    A ground truth that cannot be segmented is a dataset defect and
    raises; a prediction that cannot be segmented degrades to plain text.
    """
    gt_seg = segment_content(record.ground_truth)
    warnings: list[str] = []
    pred_seg = _segment_prediction(record, warnings)
    breakdown = aggregate_text_reward(pred_seg, gt_seg)
    table_full = paired_table_reward(
        pred_seg.tables, gt_seg.tables, structure_only=False
    )
    return ScoredRecord(
        record_id=record.id,
        domain=record.domain,
        text_edit_reward=breakdown.per_type.get(PLAIN_TEXT),
        formula_score=breakdown.per_type.get(FORMULA),
        table_teds=table_full,
        table_teds_s=breakdown.per_type.get(TABLE),
        text_aggregate=None if breakdown.unscoreable else breakdown.aggregate,
        warnings=tuple(warnings) + breakdown.warnings,
    )


def _prediction_image(record: EvalRecord, ctx: ScoringContext, fmt: str, warnings):
    """Returns (image or None, render_attempted, render_success)."""
    if record.pred_image_path:
        return load_image(ctx.resolve(record.pred_image_path)), False, False
    if not ctx.render.enabled:
        warnings.append("no prediction image and rendering disabled; vision unscored")
        return None, False, False
    template = ctx.render.commands.get(fmt)
    if template is None:
        raise ConfigError(f"rendering enabled but no command template for {fmt!r}")
    with tempfile.TemporaryDirectory(prefix="ocrscore-render-") as tmp:
        result = render_via_command(
            record.prediction, fmt, template, tmp, timeout=ctx.render.timeout
        )
    if not result.success:
        warnings.append(f"render failed: {result.detail}")
        return None, True, False
    return result.image, True, True


def score_vision_record(record: EvalRecord, ctx: ScoringContext) -> ScoredRecord:
    """Format-alignment reward always; visual reward when an image exists.

    Render failures score 0 (the model's code failed); a missing image
    with rendering disabled, or an embedding transport failure, leaves the
    visual reward unscored.
    """
    fmt = DOMAIN_FORMATS[record.domain]
    warnings: list[str] = []
    format_r = format_alignment_reward(record.prediction, fmt)
    pred_img, attempted, succeeded = _prediction_image(record, ctx, fmt, warnings)
    vision_r: float | None = None
    if pred_img is not None:
        if not record.gt_image_path:
            raise DatasetError(
                f"record {record.id!r}: gt_image_path required for vision scoring"
            )
        gt_img = load_image(ctx.resolve(record.gt_image_path))
        try:
            vision_r = multiscale_vision_reward(
                pred_img, gt_img, ctx.vision_cfg, ctx.backend
            )
        except TransportError as exc:
            warnings.append(f"embedding backend failed: {exc}; record unscored")
            ctx.note_transport_failure(record.id)
        except ContractError as exc:
            warnings.append(f"vision reward not computable: {exc}; record unscored")
    elif attempted and not succeeded:
        vision_r = 0.0
    return ScoredRecord(
        record_id=record.id,
        domain=record.domain,
        vision_reward=vision_r,
        format_reward=format_r,
        render_attempted=attempted,
        render_success=succeeded,
        warnings=tuple(warnings),
    )


def score_record(record: EvalRecord, ctx: ScoringContext) -> ScoredRecord:
    if record.is_vision():
        return score_vision_record(record, ctx)
    return score_text_record(record)


def score_records(
    records: Sequence[EvalRecord], ctx: ScoringContext, workers: int = 1
) -> list[ScoredRecord]:
    """Score records, optionally on a thread pool.

    Results are collected in input order and aggregated by id, so the
    report is identical for any worker count.
    """
    if workers <= 1 or len(records) <= 1:
        return [score_record(r, ctx) for r in records]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: score_record(r, ctx), records))


def run_score(config: RunConfig) -> tuple[BenchReport, list[str]]:
    """Load, score, aggregate. Returns the report and any transport-failed ids."""
    if config.dataset_path is None:
        raise ConfigError("no dataset configured (set 'dataset' or pass --dataset)")
    records = load_dataset(str(config.dataset_path))
    if not records:
        raise DatasetError(f"dataset {config.dataset_path} contains no records")
    ctx = ScoringContext(config, base_dir=config.dataset_path.parent)
    if isinstance(ctx.backend, RemoteEmbedder):
        ctx.backend.health()
    scored = score_records(records, ctx, workers=config.workers)
    report = aggregate_report(scored)
    return report, sorted(ctx.transport_failures)
