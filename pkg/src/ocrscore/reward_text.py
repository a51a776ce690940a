"""Rule-based rewards for text-centric outputs and their aggregation.

Three component rewards, one per content type: one minus normalized edit
distance for plain text, BLEU over normalized LaTeX tokens for formulas,
and structure-only table similarity (TEDS-S) for tables. The aggregate is
the unweighted mean over content types actually present in the ground
truth; types the ground truth lacks contribute nothing.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field

from .corpus import FORMULA, PLAIN_TEXT, TABLE, SegmentedContent
from .editdist import levenshtein, normalized_levenshtein
from .errors import NormalizationError
from .normalize import normalize_latex, normalize_plain_text, normalize_table
from .treedist import teds, teds_s

__all__ = [
    "levenshtein",
    "text_edit_reward",
    "formula_bleu_reward",
    "table_reward",
    "paired_table_reward",
    "aggregate_text_reward",
    "TextRewardBreakdown",
]

log = logging.getLogger(__name__)

_BLEU_ORDER = 4


def text_edit_reward(pred: str, gt: str) -> float:
    """1 - levenshtein/max(len); 1.0 when both strings are empty.

    Callers are expected to pass text through
    :func:`~ocrscore.normalize.normalize_plain_text` first.
    """
    return 1.0 - normalized_levenshtein(pred, gt)


def _ngram_counts(tokens: tuple[str, ...], n: int) -> Counter:
    return Counter(tokens[i : i + n] for i in range(len(tokens) - n + 1))


def formula_bleu_reward(pred: str, gt: str) -> float | None:
    """BLEU-4 on normalized LaTeX token streams.

    Higher-order precisions (n >= 2) use add-one smoothing so short
    formulas are not zeroed by missing 4-grams; the brevity penalty is
    the standard exponential. Returns None when the ground truth
    normalizes to an empty token sequence (span unscoreable).
    """
    gt_tokens = normalize_latex(gt).tokens
    if not gt_tokens:
        log.warning("ground-truth formula normalizes to no tokens; span skipped")
        return None
    pred_tokens = normalize_latex(pred).tokens
    if not pred_tokens:
        return 0.0
    log_sum = 0.0
    for n in range(1, _BLEU_ORDER + 1):
        pred_counts = _ngram_counts(pred_tokens, n)
        gt_counts = _ngram_counts(gt_tokens, n)
        total = sum(pred_counts.values())
        matched = sum(min(count, gt_counts[g]) for g, count in pred_counts.items())
        if n == 1:
            if matched == 0:
                return 0.0
            precision = matched / total
        else:
            precision = (matched + 1) / (total + 1)
        log_sum += math.log(precision) / _BLEU_ORDER
    c, r = len(pred_tokens), len(gt_tokens)
    brevity = 1.0 if c > r else math.exp(1.0 - r / c)
    return brevity * math.exp(log_sum)


def table_reward(
    pred: str,
    gt: str,
    warnings: list[str] | None = None,
    structure_only: bool = True,
) -> float:
    """Table similarity: TEDS-S by default, content-aware TEDS when
    ``structure_only`` is False. 0.0 when the prediction has no parseable
    table. The ground truth is required to parse."""
    gt_tree = normalize_table(gt, warnings=warnings)
    try:
        pred_tree = normalize_table(pred, warnings=warnings)
    except NormalizationError:
        log.warning("prediction has no parseable table; reward 0")
        if warnings is not None:
            warnings.append("prediction has no parseable table; table reward 0")
        return 0.0
    if structure_only:
        return teds_s(pred_tree, gt_tree)
    return teds(pred_tree, gt_tree)


@dataclass(frozen=True)
class TextRewardBreakdown:
    """Per-content-type rewards plus their mean.

    ``per_type`` holds only the types present (and scoreable) in the
    ground truth. ``unscoreable`` is set when no type was present, in
    which case ``aggregate`` is 0.
    """

    per_type: dict[str, float]
    aggregate: float
    unscoreable: bool = False
    warnings: tuple[str, ...] = field(default_factory=tuple)


def _paired_mean(
    pred_items: list[str],
    gt_items: list[str],
    score_pair,
    warnings: list[str],
    label: str,
) -> float | None:
    """Score the i-th prediction against the i-th ground truth; ground
    truths with no matching prediction score 0; ground truths the scorer
    marks unscoreable (None) are skipped."""
    scores: list[float] = []
    for index, gt_item in enumerate(gt_items):
        if index < len(pred_items):
            score = score_pair(pred_items[index], gt_item)
        else:
            warnings.append(f"{label} {index + 1} missing from prediction; scored 0")
            score = 0.0
        if score is None:
            warnings.append(f"ground-truth {label} {index + 1} unscoreable; skipped")
            continue
        scores.append(score)
    if not scores:
        return None
    return sum(scores) / len(scores)


def paired_table_reward(
    pred_tables: list[str],
    gt_tables: list[str],
    warnings: list[str] | None = None,
    structure_only: bool = True,
) -> float | None:
    """Mean table similarity over order-paired table blocks.

    Pairs the i-th predicted table with the i-th ground-truth table;
    ground-truth tables with no counterpart score 0. None when the ground
    truth has no tables at all.
    """
    if not gt_tables:
        return None
    sink = warnings if warnings is not None else []
    return _paired_mean(
        pred_tables,
        gt_tables,
        lambda p, g: table_reward(p, g, warnings=sink, structure_only=structure_only),
        sink,
        "table",
    )


def aggregate_text_reward(
    pred: SegmentedContent, gt: SegmentedContent
) -> TextRewardBreakdown:
    """Mean of the per-type rewards over content types present in ``gt``.

    Plain text spans are joined with spaces and scored as one string;
    formulas and tables are scored pairwise in order and averaged, with
    unmatched ground-truth instances scored 0.
    """
    warnings: list[str] = []
    per_type: dict[str, float] = {}

    gt_text = normalize_plain_text(" ".join(gt.text_spans))
    if gt_text:
        pred_text = normalize_plain_text(" ".join(pred.text_spans))
        per_type[PLAIN_TEXT] = text_edit_reward(pred_text, gt_text)

    if gt.formulas:
        score = _paired_mean(
            pred.formulas, gt.formulas, formula_bleu_reward, warnings, "formula"
        )
        if score is not None:
            per_type[FORMULA] = score

    if gt.tables:
        score = paired_table_reward(pred.tables, gt.tables, warnings=warnings)
        if score is not None:
            per_type[TABLE] = score

    if not per_type:
        warnings.append("ground truth has no scoreable content; record unscoreable")
        return TextRewardBreakdown(
            per_type={}, aggregate=0.0, unscoreable=True, warnings=tuple(warnings)
        )
    aggregate = sum(per_type.values()) / len(per_type)
    return TextRewardBreakdown(
        per_type=per_type, aggregate=aggregate, warnings=tuple(warnings)
    )
