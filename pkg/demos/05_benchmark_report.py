"""The full benchmark pipeline: JSONL dataset in, aggregate report out.

This stitches everything together the way the `ocrscore score` command
does: load a dataset of (prediction, ground truth) records, score each
record by its domain (text-centric domains get edit/BLEU/TEDS rewards,
vision-centric domains get format + visual rewards), and fold the
results into a deterministic report.

The same pipeline is available from the shell:

    ocrscore score --dataset records.jsonl --output report.json

Run:  python3 demos/05_benchmark_report.py
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from ocrscore import (
    EvalRecord,
    RasterImage,
    build_config,
    encode_png,
    overall_score,
    render_report_json,
    render_report_text,
    run_score,
    serialize_record,
)

workdir = Path(tempfile.mkdtemp())

# ---------------------------------------------------------------------------
# 1. Build a small dataset on disk
# ---------------------------------------------------------------------------
print("=" * 70)
print("1. A five-record JSONL dataset")
print("=" * 70)


def png(path: Path, seed: int, shade: int) -> str:
    rng = np.random.default_rng(seed)
    base = np.full((32, 48, 3), shade, dtype=float)
    pixels = np.clip(base + rng.normal(0, 12, base.shape), 0, 255)
    path.write_bytes(encode_png(RasterImage.from_array(pixels)))
    return path.name


chart_gt = png(workdir / "chart_gt.png", seed=3, shade=90)
chart_good = png(workdir / "chart_good.png", seed=3, shade=90)   # same image
chart_off = png(workdir / "chart_off.png", seed=9, shade=210)    # different

records = [
    EvalRecord(
        id="doc-1",
        domain="text_doc",
        prediction="Revenue grew $12\\%$ in 2025.",
        ground_truth="Revenue grew $12\\%$ in 2025.",
    ),
    EvalRecord(
        id="doc-2",
        domain="text_doc",
        prediction="Revenue shrank in 2024.",
        ground_truth="Revenue grew $12\\%$ in 2025.",
    ),
    EvalRecord(
        id="tbl-1",
        domain="table",
        prediction="<table><tr><td>a</td></tr></table>",
        ground_truth="<table><tr><td>a</td><td>b</td></tr></table>",
    ),
    EvalRecord(
        id="fig-1",
        domain="chart",
        prediction="import matplotlib.pyplot as plt\nplt.plot([1, 2])",
        ground_truth="import matplotlib.pyplot as plt\nplt.plot([1, 2])",
        gt_image_path=chart_gt,
        pred_image_path=chart_good,
    ),
    EvalRecord(
        id="fig-2",
        domain="chart",
        prediction="<svg xmlns='http://www.w3.org/2000/svg'/>",  # wrong format!
        ground_truth="import matplotlib.pyplot as plt\nplt.plot([9])",
        gt_image_path=chart_gt,
        pred_image_path=chart_off,
    ),
]

dataset = workdir / "records.jsonl"
dataset.write_text("".join(serialize_record(r) + "\n" for r in records))
print(f"  wrote {dataset}")
print(f"  sample line: {serialize_record(records[2])}")

# ---------------------------------------------------------------------------
# 2. Configure and run the scoring pipeline
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("2. Scoring")
print("=" * 70)

config = build_config({
    "dataset": str(dataset),
    "workers": 2,
    "vision": {"backend": "stub"},     # deterministic, serverless embeddings
    "render": {"enabled": False},      # images are supplied, nothing to render
})
report, transport_failures = run_score(config)
print(f"  scored {len(report.per_record)} records "
      f"({len(transport_failures)} transport failures)")

# ---------------------------------------------------------------------------
# 3. The human-readable report
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("3. Text report")
print("=" * 70)
print()
print(render_report_text(report))

# ---------------------------------------------------------------------------
# 4. The machine-readable report
# ---------------------------------------------------------------------------
print("=" * 70)
print("4. JSON report (stable across runs and worker counts)")
print("=" * 70)

payload = json.loads(render_report_json(report))
summary = {k: v for k, v in payload.items() if k != "per_record"}
print("  top-level keys :", ", ".join(sorted(payload)))
print("  summary        :", json.dumps(summary, sort_keys=True)[:100], "...")
fig2 = payload["per_record"]["fig-2"]
print("  fig-2 entry    :", json.dumps(fig2, sort_keys=True))

# ---------------------------------------------------------------------------
# 5. The composite benchmark score
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("5. Composite overall score")
print("=" * 70)

# The headline number folds mean edit distance (flipped to an accuracy),
# table TEDS, and formula score into one 0-100 figure.
print(f"  overall_score(text_edit=0.052, table_teds=85.77, formula=87.13) = "
      f"{overall_score(0.052, 85.77, 87.13):.4f}")
if report.overall is not None:
    print(f"  this dataset's overall: {report.overall:.4f}")
