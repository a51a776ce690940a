import numpy as np
import pytest

from ocrscore import (
    ContractError,
    EditCosts,
    TableTree,
    normalize_table,
    teds,
    teds_s,
    tree_edit_distance,
)
from reference import ted_bruteforce


def leaf(tag, **kw):
    return TableTree(tag, **kw)


def tree(tag, *children, **kw):
    return TableTree(tag, children=tuple(children), **kw)


class TestTableTree:
    def test_size_and_walk(self):
        t = tree("table", tree("tr", leaf("td"), leaf("td")))
        assert t.size() == 4
        assert [n.tag for n in t.walk()] == ["table", "tr", "td", "td"]

    def test_span_defaults(self):
        assert leaf("td").span() == (1, 1)
        assert leaf("td", attrs={"rowspan": 2}).span() == (2, 1)

    def test_rejects_bad_attrs(self):
        with pytest.raises(ContractError):
            leaf("td", attrs={"width": 3})
        with pytest.raises(ContractError):
            leaf("td", attrs={"rowspan": 0})
        with pytest.raises(ContractError):
            leaf("")


class TestTreeEditDistance:
    def test_identical_trees(self):
        t = tree("a", leaf("b"), tree("c", leaf("d")))
        assert tree_edit_distance(t, t) == 0.0

    def test_single_rename(self):
        assert tree_edit_distance(leaf("a"), leaf("b")) == 1.0

    def test_single_node_vs_chain(self):
        # delete two of the three chain nodes, keep the matching one
        chain = tree("a", tree("b", leaf("c")))
        assert tree_edit_distance(chain, leaf("a")) == 2.0
        assert tree_edit_distance(leaf("c"), chain) == 2.0

    def test_sibling_order_matters(self):
        ab = tree("r", leaf("a"), leaf("b"))
        ba = tree("r", leaf("b"), leaf("a"))
        # either rename both leaves, or delete+insert one: cost 2 both ways
        assert tree_edit_distance(ab, ba) == 2.0

    def test_asymmetric_costs(self):
        costs = EditCosts(insert=3.0, delete=0.5, rename=lambda a, b: 10.0)
        # cheapest: delete both nodes of the source, insert the target leaf
        assert tree_edit_distance(tree("a", leaf("b")), leaf("x"), costs) == 4.0

    def test_negative_costs_rejected(self):
        with pytest.raises(ContractError):
            EditCosts(insert=-1.0)

    def test_matches_bruteforce_on_random_trees(self, make_random_tree):
        rng = np.random.default_rng(11)
        rename = lambda a, b: 0.0 if a.tag == b.tag else 1.0
        for _ in range(40):
            a = make_random_tree(rng, max_nodes=5)
            b = make_random_tree(rng, max_nodes=5)
            fast = tree_edit_distance(a, b)
            slow = ted_bruteforce(a, b, rename)
            assert fast == pytest.approx(slow), (a, b)


class TestTeds:
    def test_identical_tables(self):
        t = normalize_table("<table><tr><td>a</td><td>b</td></tr></table>")
        assert teds(t, t) == 1.0
        assert teds_s(t, t) == 1.0

    def test_structure_match_content_differs(self):
        a = normalize_table("<table><tr><td>hello</td></tr></table>")
        b = normalize_table("<table><tr><td>help!</td></tr></table>")
        assert teds_s(a, b) == 1.0
        # rename cost on the cell = levenshtein("hello","help!")/5 = 2/5
        assert teds(a, b) == pytest.approx(1.0 - (2 / 5) / 3)

    def test_span_mismatch_counts_as_full_rename(self):
        a = normalize_table("<table><tr><td colspan='2'>x</td></tr></table>")
        b = normalize_table("<table><tr><td>x</td></tr></table>")
        assert teds_s(a, b) == pytest.approx(1.0 - 1 / 3)
        assert teds(a, b) == pytest.approx(1.0 - 1 / 3)

    def test_known_row_split(self):
        one_row = normalize_table("<table><tr><td>a</td><td>b</td></tr></table>")
        two_rows = normalize_table(
            "<table><tr><td>a</td></tr><tr><td>b</td></tr></table>"
        )
        # move one td under a new tr: delete td, insert tr, insert td = 3 / 5
        assert teds_s(one_row, two_rows) == pytest.approx(1.0 - 3 / 5)

    def test_teds_s_at_least_teds_on_random_tables(self, make_random_table):
        rng = np.random.default_rng(5)
        for _ in range(100):
            a = make_random_table(rng)
            b = make_random_table(rng)
            assert teds_s(a, b) >= teds(a, b) - 1e-12

    def test_scores_bounded(self, make_random_table):
        rng = np.random.default_rng(9)
        for _ in range(50):
            a = make_random_table(rng)
            b = make_random_table(rng)
            for score in (teds(a, b), teds_s(a, b)):
                assert 0.0 <= score <= 1.0
