import pytest
from hypothesis import given, strategies as st

from ocrscore import (
    NormalizationError,
    normalize_latex,
    normalize_plain_text,
    normalize_table,
)


class TestLatex:
    def test_whitespace_collapsed(self):
        assert normalize_latex("a  +\n b").tokens == ("a", "+", "b")

    def test_command_lexing(self):
        assert normalize_latex(r"\frac{a}{b}").tokens == (
            "\\frac", "{", "a", "}", "{", "b", "}",
        )

    def test_synonyms_folded(self):
        assert normalize_latex(r"\dfrac{a}{b}") == normalize_latex(r"\frac{a}{b}")
        assert normalize_latex(r"x \leq y").tokens == ("x", "\\le", "y")
        assert normalize_latex(r"x \geq y").tokens == ("x", "\\ge", "y")
        assert normalize_latex(r"\tfrac12").tokens == ("\\frac", "1", "2")

    def test_left_right_dropped_delimiter_kept(self):
        assert normalize_latex(r"\left( x \right)").tokens == ("(", "x", ")")

    def test_spacing_commands_dropped(self):
        assert normalize_latex(r"a\,b\;c\quad d\qquad e\!f").tokens == tuple("abcdef")

    def test_comment_stripped_to_end_of_line(self):
        assert normalize_latex("a % junk $ here\n+ b").tokens == ("a", "+", "b")

    def test_single_nonletter_command(self):
        assert normalize_latex(r"100\% \$5").tokens == ("1", "0", "0", "\\%", "\\$", "5")

    def test_escaped_percent_does_not_open_comment(self):
        assert normalize_latex(r"a \% b").tokens == ("a", "\\%", "b")

    def test_balanced_flag(self):
        assert normalize_latex("{a}").balanced
        assert not normalize_latex("{a").balanced
        assert not normalize_latex("a}").balanced
        assert not normalize_latex("}{").balanced

    def test_never_raises_and_detokenize(self):
        seq = normalize_latex(r"\frac{1}{2}")
        assert seq.detokenize() == "\\frac { 1 } { 2 }"

    @given(st.text(alphabet="ax+{}\\ %\n", max_size=30))
    def test_idempotent(self, raw):
        once = normalize_latex(raw)
        again = normalize_latex(once.detokenize())
        assert once.tokens == again.tokens


class TestPlainText:
    def test_whitespace_runs_collapse(self):
        assert normalize_plain_text("  a\t b\n\nc ") == "a b c"

    def test_nfc_composition(self):
        assert normalize_plain_text("café") == "café"

    def test_empty(self):
        assert normalize_plain_text("   ") == ""

    @given(st.text(max_size=40))
    def test_idempotent(self, raw):
        once = normalize_plain_text(raw)
        assert normalize_plain_text(once) == once


def _tags(tree):
    return [node.tag for node in tree.walk()]


class TestTableNormalization:
    def test_basic_shape(self):
        tree = normalize_table("<table><tr><td>a</td><td>b</td></tr></table>")
        assert _tags(tree) == ["table", "tr", "td", "td"]
        assert [n.text for n in tree.walk() if n.tag == "td"] == ["a", "b"]

    def test_th_folds_to_td(self):
        tree = normalize_table("<table><tr><th>h</th></tr></table>")
        assert _tags(tree) == ["table", "tr", "td"]

    def test_sections_kept(self):
        tree = normalize_table(
            "<table><thead><tr><td>h</td></tr></thead>"
            "<tbody><tr><td>b</td></tr></tbody></table>"
        )
        assert _tags(tree) == ["table", "thead", "tr", "td", "tbody", "tr", "td"]

    def test_spans_parsed(self):
        tree = normalize_table(
            "<table><tr><td rowspan='2' colspan=3>x</td></tr></table>"
        )
        cell = [n for n in tree.walk() if n.tag == "td"][0]
        assert cell.span() == (2, 3)

    def test_default_span_and_bad_values_ignored(self):
        tree = normalize_table(
            "<table><tr><td rowspan='zero' colspan='0'>x</td></tr></table>"
        )
        cell = [n for n in tree.walk() if n.tag == "td"][0]
        assert cell.span() == (1, 1)
        assert cell.attrs == {}

    def test_other_attributes_dropped(self):
        tree = normalize_table("<table><tr><td class='wide' id='c'>x</td></tr></table>")
        cell = [n for n in tree.walk() if n.tag == "td"][0]
        assert cell.attrs == {}

    def test_cell_text_flattened_and_collapsed(self):
        tree = normalize_table(
            "<table><tr><td> a <b>bold</b>\n tail </td></tr></table>"
        )
        cell = [n for n in tree.walk() if n.tag == "td"][0]
        assert cell.text == "a bold tail"

    def test_text_outside_cells_ignored(self):
        tree = normalize_table("<table>noise<tr>gap<td>x</td></tr></table>")
        cell = [n for n in tree.walk() if n.tag == "td"][0]
        assert cell.text == "x"

    def test_implied_closes(self):
        tree = normalize_table("<table><tr><td>a<td>b<tr><td>c</table>")
        assert _tags(tree) == ["table", "tr", "td", "td", "tr", "td"]

    def test_repair_warning_collected(self):
        warnings: list[str] = []
        normalize_table("<table><tr><td>a", warnings=warnings)
        assert warnings and "repaired" in warnings[0]

    def test_clean_parse_no_warning(self):
        warnings: list[str] = []
        normalize_table("<table><tr><td>a</td></tr></table>", warnings=warnings)
        assert warnings == []

    def test_nested_table_flattened_to_text(self):
        tree = normalize_table(
            "<table><tr><td>out<table><tr><td>in</td></tr></table>er</td></tr></table>"
        )
        assert _tags(tree) == ["table", "tr", "td"]
        cell = [n for n in tree.walk() if n.tag == "td"][0]
        assert cell.text == "outiner"

    def test_nested_table_outside_cell_skipped(self):
        tree = normalize_table(
            "<table><table><tr><td>ghost</td></tr></table><tr><td>real</td></tr></table>"
        )
        assert _tags(tree) == ["table", "tr", "td"]
        assert [n.text for n in tree.walk() if n.tag == "td"] == ["real"]

    def test_stray_close_ignored(self):
        tree = normalize_table("<table></tr><tr><td>a</td></tr></table>")
        assert _tags(tree) == ["table", "tr", "td"]

    def test_content_after_table_ignored(self):
        tree = normalize_table(
            "<table><tr><td>a</td></tr></table><table><tr><td>b</td></tr></table>"
        )
        assert [n.text for n in tree.walk() if n.tag == "td"] == ["a"]

    def test_no_table_raises(self):
        with pytest.raises(NormalizationError):
            normalize_table("<div>just markup</div>")

    def test_entity_references_decoded(self):
        tree = normalize_table("<table><tr><td>a &amp; b</td></tr></table>")
        cell = [n for n in tree.walk() if n.tag == "td"][0]
        assert cell.text == "a & b"
