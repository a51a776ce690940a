"""Text-centric rewards: edit distance, formula BLEU, and the aggregate.

A model's OCR output for a document page mixes prose, LaTeX formulas,
and HTML tables. Each content type gets its own reward on [0, 1], and a
record's text reward is the unweighted mean over the types that actually
appear in the ground truth. This script walks through each layer.

Run:  python3 demos/01_text_rewards.py
"""

from ocrscore import (
    aggregate_text_reward,
    formula_bleu_reward,
    levenshtein,
    normalize_latex,
    normalize_plain_text,
    normalized_levenshtein,
    segment_content,
    text_edit_reward,
)

# ---------------------------------------------------------------------------
# 1. Plain text: 1 - normalized Levenshtein distance
# ---------------------------------------------------------------------------
print("=" * 70)
print("1. Plain-text reward")
print("=" * 70)

gt = "The quick brown fox jumps over the lazy dog."
for pred in (
    "The quick brown fox jumps over the lazy dog.",   # perfect
    "The quick brown fox jumped over the lazy dog.",  # one-word slip
    "Teh qiuck brwon fox",                            # heavy corruption
):
    d = levenshtein(pred, gt)
    print(f"  edits={d:>2}  norm={normalized_levenshtein(pred, gt):.4f}  "
          f"reward={text_edit_reward(pred, gt):.4f}  <- {pred!r}")

# text_edit_reward scores raw strings; the aggregate path first folds
# whitespace with normalize_plain_text, so layout differences cost nothing.
messy = "The   quick\n\tbrown fox jumps over the lazy dog."
print(f"\n  raw        : reward={text_edit_reward(messy, gt):.4f} for {messy!r}")
print(f"  normalized : reward="
      f"{text_edit_reward(normalize_plain_text(messy), normalize_plain_text(gt)):.4f}")

# ---------------------------------------------------------------------------
# 2. Formulas: BLEU-4 over normalized LaTeX tokens
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("2. Formula reward (BLEU over LaTeX tokens)")
print("=" * 70)

formula_gt = r"\frac{a}{b} \leq \sum_{i=1}^{n} x_i"
print(f"  ground truth : {formula_gt}")
print(f"  tokens       : {' '.join(normalize_latex(formula_gt).tokens)}")

cases = [
    (r"\frac{a}{b} \leq \sum_{i=1}^{n} x_i", "identical"),
    (r"\dfrac{a}{b} \le \sum_{i=1}^{n} x_i", "synonyms (\\dfrac, \\le) normalize away"),
    (r"\frac{a}{b} \leq \sum_{i=1}^{n} y_i", "one wrong symbol"),
    (r"\frac{a}{b}", "truncated -> brevity penalty bites"),
    (r"e = m c^2", "unrelated formula"),
]
for pred, label in cases:
    print(f"  BLEU={formula_bleu_reward(pred, formula_gt):.4f}  {label}")

# ---------------------------------------------------------------------------
# 3. Segmentation: one source string -> typed spans
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("3. Segmenting a mixed document")
print("=" * 70)

document = (
    "Energy balance follows from $$E = m c^2$$ as shown in Table 1.\n"
    "<table><tr><td>mass</td><td>energy</td></tr>"
    "<tr><td>1 kg</td><td>9e16 J</td></tr></table>\n"
    "Inline terms like $m$ and $c$ stay formulas."
)
segments = segment_content(document)
for span in segments.spans:
    body = " ".join(span.body.split())
    print(f"  [{span.kind:^7}] {body[:58]}")

# ---------------------------------------------------------------------------
# 4. The aggregate: mean over content types the ground truth contains
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("4. Aggregate text reward")
print("=" * 70)

prediction = (
    "Energy balance follows from $$E = m c^2$$ as shown in Table 1.\n"
    "<table><tr><td>mass</td><td>energy</td></tr>"
    "<tr><td>1 kg</td><td>9e16 J</td></tr></table>\n"
    "Inline terms like $m$ and $x$ stay formulas."   # one wrong inline formula
)
breakdown = aggregate_text_reward(segment_content(prediction), segments)
for kind, value in sorted(breakdown.per_type.items()):
    print(f"  {kind:<12} {value:.4f}")
print(f"  {'aggregate':<12} {breakdown.aggregate:.4f}   (mean of the above)")

# A prediction that drops a formula entirely is scored 0 for that slot and
# the miss is reported as a warning rather than an exception.
short = segment_content("Energy balance follows from $$E = m c^2$$.")
breakdown = aggregate_text_reward(short, segments)
print(f"\n  dropping spans -> aggregate={breakdown.aggregate:.4f}, warnings:")
for w in breakdown.warnings:
    print(f"    - {w}")
