"""Corpus-level aggregation and report generation.

Per-record rewards stay in [0, 1]; the corpus report converts to the
conventional benchmark scales: ``text_edit_mean`` is reported as a distance
(1 - mean reward, lower is better) while table and formula means are scaled
to [0, 100]. The overall score combines the three text-centric components:

    overall = ((1 - text_edit) * 100 + table_teds + formula_score) / 3

Records missing a component simply do not contribute to that component's
mean — no zero-imputation — and the overall score is omitted (with a
warning) unless all three components are present.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ContractError, ReportError

SCHEMA_VERSION = 1


def _check_unit(name: str, value: float | None) -> float | None:
    if value is None:
        return None
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ContractError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class ScoredRecord:
    """One evaluated record: whichever reward components apply to it.

    ``None`` marks a component the record does not possess (a chart record
    has no table score); actual scores are rewards in [0, 1].
    """

    record_id: str
    domain: str
    text_edit_reward: float | None = None
    table_teds: float | None = None
    table_teds_s: float | None = None
    formula_score: float | None = None
    text_aggregate: float | None = None
    vision_reward: float | None = None
    format_reward: float | None = None
    render_attempted: bool = False
    render_success: bool = False
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.record_id:
            raise ContractError("record_id must be non-empty")
        if not self.domain:
            raise ContractError("domain must be non-empty")
        for name in (
            "text_edit_reward",
            "table_teds",
            "table_teds_s",
            "formula_score",
            "text_aggregate",
            "vision_reward",
            "format_reward",
        ):
            object.__setattr__(self, name, _check_unit(name, getattr(self, name)))
        if self.render_success and not self.render_attempted:
            raise ContractError("render_success requires render_attempted")
        object.__setattr__(self, "warnings", tuple(self.warnings))


def overall_score(
    text_edit: float, table_teds: float, formula_score: float
) -> float:
    """((1 - text_edit) * 100 + table_teds + formula_score) / 3.

    ``text_edit`` is a distance in [0, 1]; the other two live on [0, 100].
    """
    if not 0.0 <= text_edit <= 1.0:
        raise ContractError(f"text_edit must lie in [0, 1], got {text_edit}")
    for name, value in (("table_teds", table_teds), ("formula_score", formula_score)):
        if not 0.0 <= value <= 100.0:
            raise ContractError(f"{name} must lie in [0, 100], got {value}")
    return ((1.0 - text_edit) * 100.0 + table_teds + formula_score) / 3.0


@dataclass(frozen=True)
class BenchReport:
    """Aggregated corpus metrics plus the per-record breakdowns behind them."""

    per_record: Mapping[str, Mapping[str, object]]
    domain_counts: Mapping[str, int]
    text_edit_mean: float | None
    table_teds_mean: float | None
    table_teds_s_mean: float | None
    formula_score_mean: float | None
    vision_reward_mean: float | None
    overall: float | None
    exec_rate: float | None
    warnings: tuple[str, ...]


_BREAKDOWN_FIELDS = (
    "text_edit_reward",
    "table_teds",
    "table_teds_s",
    "formula_score",
    "text_aggregate",
    "vision_reward",
    "format_reward",
)


def _record_breakdown(record: ScoredRecord) -> dict[str, object]:
    breakdown: dict[str, object] = {"domain": record.domain}
    for name in _BREAKDOWN_FIELDS:
        value = getattr(record, name)
        if value is not None:
            breakdown[name] = value
    if record.render_attempted:
        breakdown["render_success"] = record.render_success
    return breakdown


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def aggregate_report(records: Sequence[ScoredRecord]) -> BenchReport:
    """Fold scored records into a BenchReport.

    Means are unweighted over the records that possess each component, so
    the result is independent of input order; duplicate ids are rejected.
    """
    if not records:
        raise ReportError("cannot aggregate an empty record set")
    ordered = sorted(records, key=lambda r: r.record_id)
    seen: set[str] = set()
    for record in ordered:
        if record.record_id in seen:
            raise ReportError(f"duplicate record id {record.record_id!r}")
        seen.add(record.record_id)

    per_record = {r.record_id: _record_breakdown(r) for r in ordered}
    domain_counts: dict[str, int] = {}
    for record in ordered:
        domain_counts[record.domain] = domain_counts.get(record.domain, 0) + 1

    text_rewards = [r.text_edit_reward for r in ordered if r.text_edit_reward is not None]
    teds = [r.table_teds for r in ordered if r.table_teds is not None]
    teds_s = [r.table_teds_s for r in ordered if r.table_teds_s is not None]
    formulas = [r.formula_score for r in ordered if r.formula_score is not None]
    visions = [r.vision_reward for r in ordered if r.vision_reward is not None]

    text_edit_mean = 1.0 - _mean(text_rewards) if text_rewards else None
    table_teds_mean = 100.0 * _mean(teds) if teds else None
    table_teds_s_mean = 100.0 * _mean(teds_s) if teds_s else None
    formula_score_mean = 100.0 * _mean(formulas) if formulas else None
    vision_reward_mean = _mean(visions)

    warnings = [
        f"{record.record_id}: {message}"
        for record in ordered
        for message in record.warnings
    ]
    overall = None
    missing = [
        name
        for name, value in (
            ("text_edit_mean", text_edit_mean),
            ("table_teds_mean", table_teds_mean),
            ("formula_score_mean", formula_score_mean),
        )
        if value is None
    ]
    if missing:
        warnings.append(
            "overall omitted: missing component(s) " + ", ".join(missing)
        )
    else:
        overall = overall_score(text_edit_mean, table_teds_mean, formula_score_mean)

    attempts = sum(1 for r in ordered if r.render_attempted)
    successes = sum(1 for r in ordered if r.render_success)
    exec_rate = 100.0 * successes / attempts if attempts else None

    return BenchReport(
        per_record=per_record,
        domain_counts=dict(sorted(domain_counts.items())),
        text_edit_mean=text_edit_mean,
        table_teds_mean=table_teds_mean,
        table_teds_s_mean=table_teds_s_mean,
        formula_score_mean=formula_score_mean,
        vision_reward_mean=vision_reward_mean,
        overall=overall,
        exec_rate=exec_rate,
        warnings=tuple(warnings),
    )


_CORPUS_FIELDS = (
    "text_edit_mean",
    "table_teds_mean",
    "table_teds_s_mean",
    "formula_score_mean",
    "vision_reward_mean",
    "overall",
    "exec_rate",
)


def report_to_dict(report: BenchReport) -> dict[str, object]:
    """JSON-ready dict; absent corpus metrics are omitted, not nulled."""
    payload: dict[str, object] = {
        "schema_version": SCHEMA_VERSION,
        "domain_counts": dict(report.domain_counts),
        "per_record": {k: dict(v) for k, v in report.per_record.items()},
        "warnings": list(report.warnings),
    }
    for name in _CORPUS_FIELDS:
        value = getattr(report, name)
        if value is not None:
            payload[name] = value
    return payload


def render_report_json(report: BenchReport) -> str:
    """Deterministic JSON text: sorted keys, no timestamps or run metadata."""
    return json.dumps(report_to_dict(report), sort_keys=True, indent=2) + "\n"


def render_report_text(report: BenchReport) -> str:
    """Small human-readable summary table."""
    lines = []
    total = sum(report.domain_counts.values())
    lines.append(f"records: {total}")
    lines.append(
        "domains: "
        + " ".join(f"{k}={v}" for k, v in sorted(report.domain_counts.items()))
    )
    labels = {
        "text_edit_mean": "text edit distance (lower is better)",
        "table_teds_mean": "table TEDS x100",
        "table_teds_s_mean": "table TEDS-S x100",
        "formula_score_mean": "formula score x100",
        "vision_reward_mean": "vision reward mean",
        "overall": "overall",
        "exec_rate": "render exec rate %",
    }
    for name in _CORPUS_FIELDS:
        value = getattr(report, name)
        if value is not None:
            lines.append(f"{labels[name]:40s} {value:.4f}")
    if report.warnings:
        lines.append(f"warnings ({len(report.warnings)}):")
        lines.extend(f"  - {w}" for w in report.warnings)
    return "\n".join(lines) + "\n"
