"""Canonicalization applied before any reward is computed.

LaTeX is lexed into a token sequence with a fixed rewrite set: comments
stripped, whitespace collapsed, ``\\left``/``\\right`` wrappers dropped
(their delimiter survives), synonym commands folded to one spelling, and
pure spacing commands removed. Tables are reduced to the structural tags
{table, thead, tbody, tr, td} with ``th`` folded into ``td``, all
attributes dropped except rowspan/colspan, and cell text flattened.
Plain text is NFC-normalized with whitespace runs collapsed.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from html.parser import HTMLParser

from .errors import NormalizationError
from .treedist import TableTree

_SYNONYMS = {
    "\\dfrac": "\\frac",
    "\\tfrac": "\\frac",
    "\\leq": "\\le",
    "\\geq": "\\ge",
}
_SPACING = frozenset({"\\,", "\\;", "\\!", "\\quad", "\\qquad"})
_WRAPPERS = frozenset({"\\left", "\\right"})


@dataclass(frozen=True)
class LatexTokenSeq:
    """Normalized formula as a flat token sequence.

    ``balanced`` is False when the source had unbalanced braces; tokens
    are still emitted as-is in that case.
    """

    tokens: tuple[str, ...]
    balanced: bool = True

    def __len__(self) -> int:
        return len(self.tokens)

    def detokenize(self) -> str:
        return " ".join(self.tokens)


def _lex_latex(raw: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    n = len(raw)
    while i < n:
        ch = raw[i]
        if ch.isspace():
            i += 1
        elif ch == "%":
            while i < n and raw[i] != "\n":
                i += 1
        elif ch == "\\":
            if i + 1 >= n:
                tokens.append("\\")
                break
            nxt = raw[i + 1]
            if nxt.isalpha():
                j = i + 1
                while j < n and raw[j].isalpha():
                    j += 1
                tokens.append(raw[i:j])
                i = j
            else:
                # single non-letter after backslash is a command (\, \% \\ ...)
                tokens.append(raw[i : i + 2])
                i += 2
        else:
            tokens.append(ch)
            i += 1
    return tokens


def normalize_latex(raw: str) -> LatexTokenSeq:
    """Lex and canonicalize a LaTeX formula. Idempotent; never raises."""
    tokens = []
    for token in _lex_latex(raw):
        if token in _WRAPPERS or token in _SPACING:
            continue
        tokens.append(_SYNONYMS.get(token, token))
    depth = 0
    balanced = True
    for token in tokens:
        if token == "{":
            depth += 1
        elif token == "}":
            depth -= 1
            if depth < 0:
                balanced = False
    if depth != 0:
        balanced = False
    return LatexTokenSeq(tokens=tuple(tokens), balanced=balanced)


def normalize_plain_text(raw: str) -> str:
    """Unicode NFC, whitespace runs collapsed to one space, ends stripped."""
    return " ".join(unicodedata.normalize("NFC", raw).split())


_STRUCT_TAGS = frozenset({"table", "thead", "tbody", "tr", "td", "th"})
_SECTION_TAGS = frozenset({"thead", "tbody"})


class _MutableNode:
    __slots__ = ("tag", "attrs", "children", "text_parts")

    def __init__(self, tag: str, attrs: dict[str, int]):
        self.tag = tag
        self.attrs = attrs
        self.children: list[_MutableNode] = []
        self.text_parts: list[str] = []

    def freeze(self) -> TableTree:
        text = None
        if self.tag == "td":
            text = " ".join("".join(self.text_parts).split())
        return TableTree(
            tag=self.tag,
            attrs=self.attrs,
            text=text,
            children=tuple(child.freeze() for child in self.children),
        )


def _span_attrs(attrs: list[tuple[str, str | None]]) -> dict[str, int]:
    out: dict[str, int] = {}
    for name, value in attrs:
        if name in ("rowspan", "colspan") and value is not None:
            try:
                parsed = int(value.strip())
            except ValueError:
                continue
            if parsed >= 1:
                out[name] = parsed
    return out


class _TableBuilder(HTMLParser):
    """Subset parser: structural tags build the tree, everything inside a
    cell is flattened to text (nested tables included), and malformed
    nesting is repaired by closing open elements."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root: _MutableNode | None = None
        self.stack: list[_MutableNode] = []
        self.done = False
        self.repaired = False
        self.skip_table_depth = 0  # nested <table> subtrees are flattened

    def _in_cell(self) -> bool:
        return bool(self.stack) and self.stack[-1].tag == "td"

    def _close_one(self) -> None:
        self.stack.pop()
        if not self.stack:
            self.done = True

    def _close_while(self, tags: frozenset[str]) -> None:
        while self.stack and self.stack[-1].tag in tags:
            self.repaired = True
            self._close_one()

    def _open(self, tag: str, attrs: dict[str, int]) -> None:
        node = _MutableNode(tag, attrs)
        if self.stack:
            self.stack[-1].children.append(node)
        self.stack.append(node)

    def handle_starttag(self, tag, attrs):
        if self.done:
            return
        if self.root is None:
            if tag == "table":
                self.root = _MutableNode("table", {})
                self.stack.append(self.root)
            return
        if self.skip_table_depth > 0:
            if tag == "table":
                self.skip_table_depth += 1
            return
        if tag == "table":
            self.skip_table_depth = 1
            return
        if tag not in _STRUCT_TAGS:
            return  # presentation markup: text still flows to the open cell
        if tag in ("td", "th"):
            self._close_while(frozenset({"td"}))
            self._open("td", _span_attrs(attrs))
        elif tag == "tr":
            self._close_while(frozenset({"td", "tr"}))
            self._open("tr", {})
        else:  # thead / tbody
            self._close_while(frozenset({"td", "tr"}) | _SECTION_TAGS)
            self._open(tag, {})

    def handle_endtag(self, tag):
        if self.done or self.root is None:
            return
        if self.skip_table_depth > 0:
            if tag == "table":
                self.skip_table_depth -= 1
            return
        if tag == "th":
            tag = "td"
        if tag not in _STRUCT_TAGS:
            return
        if tag not in [node.tag for node in self.stack]:
            return  # stray close
        while self.stack[-1].tag != tag:
            self.repaired = True
            self._close_one()
        self._close_one()

    def handle_data(self, data):
        if not self.done and self._in_cell():
            self.stack[-1].text_parts.append(data)

    def finish(self) -> tuple[TableTree, bool]:
        self.close()
        if self.root is None:
            raise NormalizationError("input contains no <table> element")
        if not self.done:
            self.repaired = True  # unclosed tags repaired at EOF
        return self.root.freeze(), self.repaired


def normalize_table(raw: str, warnings: list[str] | None = None) -> TableTree:
    """Parse the first <table> element of ``raw`` into a structural tree.

    Raises :class:`NormalizationError` when there is no table element.
    Repairs (implied or missing end tags) are appended to ``warnings``
    when a list is supplied.
    """
    builder = _TableBuilder()
    builder.feed(raw)
    tree, repaired = builder.finish()
    if repaired and warnings is not None:
        warnings.append("table markup repaired: unclosed or misnested tags")
    return tree
