"""Reward computation and benchmark evaluation for OCR model outputs.

Two reward families: text-centric (edit distance, formula BLEU, table
tree-edit similarity, aggregated per content type) and vision-centric
(multi-scale embedding similarity plus format alignment for rendered
code). On top sit GRPO advantage/objective math with a toy optimization
demo, and corpus-level report generation with an overall score.
"""

from .bench import (
    BenchReport,
    ScoredRecord,
    aggregate_report,
    overall_score,
    render_report_json,
    render_report_text,
    report_to_dict,
)
from .config import (
    GrpoSection,
    RenderSection,
    RunConfig,
    VisionSection,
    apply_env_overrides,
    build_config,
    load_config,
)
from .corpus import (
    DOMAINS,
    TEXT_DOMAINS,
    VISION_DOMAINS,
    EvalRecord,
    SegmentedContent,
    Span,
    load_dataset,
    parse_record_line,
    segment_content,
    serialize_record,
)
from .editdist import levenshtein, normalized_levenshtein
from .errors import (
    ConfigError,
    ContractError,
    DatasetError,
    DomainError,
    InputError,
    NormalizationError,
    OcrScoreError,
    ParseError,
    ReportError,
    SchemaError,
    SegmentationError,
    TransportError,
)
from .grpo import (
    AdvantageSet,
    IterationStats,
    RolloutGroup,
    clipped_objective,
    entropy_filter,
    group_advantages,
    group_reward_entropy,
    load_rollout_groups,
    simulate_toy_policy,
    simulate_toy_policy_stats,
    write_trajectory_csv,
)
from .normalize import (
    LatexTokenSeq,
    normalize_latex,
    normalize_plain_text,
    normalize_table,
)
from .pipeline import (
    DOMAIN_FORMATS,
    ScoringContext,
    make_backend,
    run_score,
    score_record,
    score_records,
    score_text_record,
    score_vision_record,
)
from .reward_text import (
    TextRewardBreakdown,
    aggregate_text_reward,
    formula_bleu_reward,
    paired_table_reward,
    table_reward,
    text_edit_reward,
)
from .reward_vision import (
    CODE_FORMATS,
    HTML,
    LATEX_TIKZ,
    MOLECULE_CODE,
    PYTHON_PLOT,
    SVG,
    EmbeddingVector,
    RasterImage,
    RemoteEmbedder,
    RenderResult,
    VisionRewardConfig,
    cosine_similarity,
    decode_image,
    detect_format,
    encode_png,
    format_alignment_reward,
    load_image,
    make_patches,
    multiscale_vision_reward,
    render_via_command,
    resize_box,
    stub_embed,
)
from .treedist import TableTree, EditCosts, tree_edit_distance, teds, teds_s

__version__ = "0.1.0"

__all__ = [
    "AdvantageSet",
    "BenchReport",
    "CODE_FORMATS",
    "ConfigError",
    "ContractError",
    "DOMAINS",
    "DOMAIN_FORMATS",
    "DatasetError",
    "DomainError",
    "EditCosts",
    "EmbeddingVector",
    "EvalRecord",
    "GrpoSection",
    "HTML",
    "InputError",
    "IterationStats",
    "LATEX_TIKZ",
    "LatexTokenSeq",
    "MOLECULE_CODE",
    "NormalizationError",
    "OcrScoreError",
    "PYTHON_PLOT",
    "ParseError",
    "RasterImage",
    "RemoteEmbedder",
    "RenderResult",
    "RenderSection",
    "ReportError",
    "RolloutGroup",
    "RunConfig",
    "SVG",
    "SchemaError",
    "ScoredRecord",
    "ScoringContext",
    "SegmentationError",
    "SegmentedContent",
    "Span",
    "TEXT_DOMAINS",
    "TableTree",
    "TextRewardBreakdown",
    "TransportError",
    "VISION_DOMAINS",
    "VisionRewardConfig",
    "VisionSection",
    "aggregate_report",
    "aggregate_text_reward",
    "apply_env_overrides",
    "build_config",
    "clipped_objective",
    "cosine_similarity",
    "decode_image",
    "detect_format",
    "encode_png",
    "entropy_filter",
    "format_alignment_reward",
    "formula_bleu_reward",
    "group_advantages",
    "group_reward_entropy",
    "levenshtein",
    "load_config",
    "load_dataset",
    "load_image",
    "load_rollout_groups",
    "make_backend",
    "make_patches",
    "multiscale_vision_reward",
    "normalize_latex",
    "normalize_plain_text",
    "normalize_table",
    "normalized_levenshtein",
    "overall_score",
    "paired_table_reward",
    "parse_record_line",
    "render_report_json",
    "render_report_text",
    "render_via_command",
    "report_to_dict",
    "resize_box",
    "run_score",
    "score_record",
    "score_records",
    "score_text_record",
    "score_vision_record",
    "segment_content",
    "serialize_record",
    "simulate_toy_policy",
    "simulate_toy_policy_stats",
    "stub_embed",
    "table_reward",
    "teds",
    "teds_s",
    "text_edit_reward",
    "tree_edit_distance",
    "write_trajectory_csv",
]
