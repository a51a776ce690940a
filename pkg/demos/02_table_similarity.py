"""Table similarity: tree edit distance, TEDS, and TEDS-S.

HTML tables are normalized into trees (table -> tr -> td, with rowspan
and colspan carried as attributes). Similarity is 1 minus the tree edit
distance scaled by the larger tree's size. Two flavors exist:

  * teds    - content-aware: differing cell text costs a partial rename
  * teds_s  - structure-only: cell text is ignored entirely

Structure-only can never see more differences than the content-aware
score, so teds_s >= teds always holds.

Run:  python3 demos/02_table_similarity.py
"""

import logging

from ocrscore import (
    EditCosts,
    TableTree,
    normalize_table,
    table_reward,
    teds,
    teds_s,
    tree_edit_distance,
)

# The library reports recoverable issues on the standard "ocrscore" logger
# as well as through explicit warnings lists; keep the narrative clean here.
logging.getLogger("ocrscore").setLevel(logging.ERROR)

# ---------------------------------------------------------------------------
# 1. Parsing HTML into a table tree
# ---------------------------------------------------------------------------
print("=" * 70)
print("1. Normalizing an HTML table")
print("=" * 70)

html = """
<table>
  <tr><td colspan="2">Quarterly revenue</td></tr>
  <tr><td>Q1</td><td>104</td></tr>
  <tr><td>Q2</td><td>117</td></tr>
</table>
"""
tree = normalize_table(html)


def show(node: TableTree, depth: int = 0) -> None:
    attrs = "".join(f" {k}={v}" for k, v in sorted(node.attrs.items()))
    text = f" {node.text!r}" if node.text else ""
    print(f"  {'  ' * depth}<{node.tag}{attrs}>{text}")
    for child in node.children:
        show(child, depth + 1)


show(tree)
print(f"  total nodes: {tree.size()}")

# ---------------------------------------------------------------------------
# 2. Tree edit distance with configurable costs
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("2. Tree edit distance")
print("=" * 70)

missing_row = normalize_table(
    "<table>"
    "<tr><td colspan='2'>Quarterly revenue</td></tr>"
    "<tr><td>Q1</td><td>104</td></tr>"
    "</table>"
)
# Dropping a <tr> with two <td> children = three deletions at unit cost.
print(f"  distance(full, missing one row) = "
      f"{tree_edit_distance(tree, missing_row):.1f}")

# Costs are pluggable: make deletions cheap and insertions expensive.
lopsided = EditCosts(insert=2.0, delete=0.5)
print(f"  same pair, insert=2.0 delete=0.5 : "
      f"{tree_edit_distance(tree, missing_row, lopsided):.1f} "
      f"(vs {tree_edit_distance(missing_row, tree, lopsided):.1f} reversed)")

# ---------------------------------------------------------------------------
# 3. TEDS vs TEDS-S
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("3. Content-aware vs structure-only similarity")
print("=" * 70)

variants = {
    "identical copy": html,
    "one cell retyped (104 -> 140)": html.replace("104", "140"),
    "row dropped": (
        "<table><tr><td colspan='2'>Quarterly revenue</td></tr>"
        "<tr><td>Q1</td><td>104</td></tr></table>"
    ),
    "colspan lost": html.replace(' colspan="2"', ""),
}
gt_tree = normalize_table(html)
print(f"  {'variant':<32} {'teds':>7} {'teds_s':>7}")
for label, variant in variants.items():
    pred_tree = normalize_table(variant)
    print(f"  {label:<32} {teds(pred_tree, gt_tree):>7.4f} "
          f"{teds_s(pred_tree, gt_tree):>7.4f}")
print("  note: teds_s >= teds on every row; retyped text is invisible to it")

# ---------------------------------------------------------------------------
# 4. The string-level convenience wrapper
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("4. table_reward on raw strings")
print("=" * 70)

warnings: list[str] = []
print(f"  structure-only reward : {table_reward(variants['row dropped'], html):.4f}")
print(f"  content-aware reward  : "
      f"{table_reward(variants['one cell retyped (104 -> 140)'], html, structure_only=False):.4f}")
print(f"  unparseable prediction: "
      f"{table_reward('just prose, no table here', html, warnings=warnings):.4f}"
      f"   warning: {warnings[0]!r}")
