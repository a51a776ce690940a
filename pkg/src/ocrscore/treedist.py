"""Ordered-tree edit distance and the TEDS family of table similarities.

The distance is the classic keyroot dynamic program over postorder
numberings (Zhang & Shasha): for every pair of keyroots, a forest-distance
table is filled once, and subtree distances are memoized across keyroot
pairs. Costs are pluggable; rows and cells are order-significant, so only
the ordered variant is provided.

TEDS scores a pair of tables as ``1 - distance / max(size_a, size_b)``
with unit insert/delete costs. The rename cost charges 1 whenever tags or
rowspan/colspan differ, otherwise the normalized edit distance between
cell texts; TEDS-S ignores cell text entirely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .editdist import normalized_levenshtein
from .errors import ContractError

_SPAN_KEYS = frozenset({"rowspan", "colspan"})


@dataclass(frozen=True)
class TableTree:
    """Node of a rooted ordered labeled tree.

    ``attrs`` may carry only ``rowspan``/``colspan`` with values >= 1.
    ``text`` is the whitespace-collapsed cell content, present on ``td``
    nodes only.
    """

    tag: str
    attrs: dict[str, int] = field(default_factory=dict)
    text: str | None = None
    children: tuple["TableTree", ...] = ()

    def __post_init__(self) -> None:
        if not self.tag:
            raise ContractError("node tag must be non-empty")
        for key, value in self.attrs.items():
            if key not in _SPAN_KEYS:
                raise ContractError(f"unsupported attribute {key!r}")
            if not isinstance(value, int) or value < 1:
                raise ContractError(f"{key} must be a positive integer, got {value!r}")

    def span(self) -> tuple[int, int]:
        return self.attrs.get("rowspan", 1), self.attrs.get("colspan", 1)

    def size(self) -> int:
        return 1 + sum(child.size() for child in self.children)

    def walk(self) -> Iterator["TableTree"]:
        """Preorder traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


RenameCost = Callable[[TableTree, TableTree], float]


def _tag_rename(a: TableTree, b: TableTree) -> float:
    return 0.0 if a.tag == b.tag else 1.0


@dataclass(frozen=True)
class EditCosts:
    """Cost model: constant insert/delete, pluggable symmetric rename."""

    insert: float = 1.0
    delete: float = 1.0
    rename: RenameCost = _tag_rename

    def __post_init__(self) -> None:
        if self.insert < 0 or self.delete < 0:
            raise ContractError("insert and delete costs must be nonnegative")


def _annotate(root: TableTree) -> tuple[list[TableTree], list[int], list[int]]:
    """Postorder nodes, leftmost-leaf-descendant indices, and keyroots."""
    nodes: list[TableTree] = []
    lmds: list[int] = []
    # iterative postorder: (node, child cursor)
    stack: list[tuple[TableTree, int]] = [(root, 0)]
    first_leaf: dict[int, int] = {}  # id(node) -> lmd postorder index
    while stack:
        node, cursor = stack[-1]
        if cursor < len(node.children):
            stack[-1] = (node, cursor + 1)
            stack.append((node.children[cursor], 0))
            continue
        stack.pop()
        index = len(nodes)
        if node.children:
            lmd = first_leaf[id(node.children[0])]
        else:
            lmd = index
        first_leaf[id(node)] = lmd
        nodes.append(node)
        lmds.append(lmd)
    latest: dict[int, int] = {}
    for index, lmd in enumerate(lmds):
        latest[lmd] = index
    keyroots = sorted(latest.values())
    return nodes, lmds, keyroots


def tree_edit_distance(
    a: TableTree, b: TableTree, costs: EditCosts | None = None
) -> float:
    """Minimal total cost transforming ``a`` into ``b``."""
    if costs is None:
        costs = EditCosts()
    a_nodes, a_lmds, a_keyroots = _annotate(a)
    b_nodes, b_lmds, b_keyroots = _annotate(b)
    ins, rem, ren = costs.insert, costs.delete, costs.rename
    treedists = np.zeros((len(a_nodes), len(b_nodes)))

    for i in a_keyroots:
        for j in b_keyroots:
            m = i - a_lmds[i] + 2
            n = j - b_lmds[j] + 2
            fd = np.zeros((m, n))
            ioff = a_lmds[i] - 1
            joff = b_lmds[j] - 1
            for x in range(1, m):
                fd[x, 0] = fd[x - 1, 0] + rem
            for y in range(1, n):
                fd[0, y] = fd[0, y - 1] + ins
            for x in range(1, m):
                for y in range(1, n):
                    if a_lmds[i] == a_lmds[x + ioff] and b_lmds[j] == b_lmds[y + joff]:
                        fd[x, y] = min(
                            fd[x - 1, y] + rem,
                            fd[x, y - 1] + ins,
                            fd[x - 1, y - 1]
                            + ren(a_nodes[x + ioff], b_nodes[y + joff]),
                        )
                        treedists[x + ioff, y + joff] = fd[x, y]
                    else:
                        p = a_lmds[x + ioff] - 1 - ioff
                        q = b_lmds[y + joff] - 1 - joff
                        fd[x, y] = min(
                            fd[x - 1, y] + rem,
                            fd[x, y - 1] + ins,
                            fd[p, q] + treedists[x + ioff, y + joff],
                        )
    return float(treedists[-1, -1])


def _content_rename(a: TableTree, b: TableTree) -> float:
    if a.tag != b.tag or a.span() != b.span():
        return 1.0
    if a.tag == "td":
        return normalized_levenshtein(a.text or "", b.text or "")
    return 0.0


def _structure_rename(a: TableTree, b: TableTree) -> float:
    if a.tag != b.tag or a.span() != b.span():
        return 1.0
    return 0.0


def _similarity(a: TableTree, b: TableTree, rename: RenameCost) -> float:
    distance = tree_edit_distance(a, b, EditCosts(1.0, 1.0, rename))
    return max(0.0, 1.0 - distance / max(a.size(), b.size()))


def teds(a: TableTree, b: TableTree) -> float:
    """Tree-edit-distance similarity, cell content included."""
    return _similarity(a, b, _content_rename)


def teds_s(a: TableTree, b: TableTree) -> float:
    """Structure-only variant: cell text is ignored in the rename cost."""
    return _similarity(a, b, _structure_rename)
