"""Shared fixtures: acceptance-criterion bookkeeping and random tree makers."""

from __future__ import annotations

from pathlib import Path

import pytest

from ocrscore import TableTree

DATA_DIR = Path(__file__).parent / "data"

CRITERIA = {
    1: "overall-score oracle matches published benchmark table rows",
    2: "trained-model results out of scope; property suites stand in",
    3: "tree edit distance = brute-force mapping minimum, 200 random trees",
    4: "metric axioms (Levenshtein, TED); TEDS-S >= TEDS on random tables",
    5: "text rewards: ranges, identity, aggregate = mean of present types",
    6: "vision reward: self-similarity, range, linear weight interpolation",
    7: "advantage/objective properties on 1000 random groups",
    8: "toy policy improvement >= 0.2 (seeds 1, 2, 3)",
    9: "byte-identical reports across runs and worker counts {1, 4}",
    10: "entropy filter: exclusion, inclusion, fixture ordering",
}

_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record a criterion outcome for the end-of-run summary, then assert it."""

    def record(num: int, passed: bool, detail: str = "") -> None:
        _RESULTS[num] = (bool(passed), detail)
        assert passed, f"acceptance criterion {num} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        if num in _RESULTS:
            passed, detail = _RESULTS[num]
            status = "PASS" if passed else "FAIL"
        else:
            status, detail = "FAIL", "not run"
        line = f"{status}  criterion {num:2d}: {CRITERIA[num]}"
        if detail:
            line += f" [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


def _random_tree(rng, max_nodes: int = 6, tags=("a", "b", "c")) -> TableTree:
    """Uniform-ish random ordered labeled tree with 1..max_nodes nodes."""
    n = int(rng.integers(1, max_nodes + 1))
    children: list[list[int]] = [[] for _ in range(n)]
    for i in range(1, n):
        children[int(rng.integers(0, i))].append(i)
    labels = [str(rng.choice(tags)) for _ in range(n)]

    def build(i: int) -> TableTree:
        return TableTree(tag=labels[i], children=tuple(build(c) for c in children[i]))

    return build(0)


def _random_table(rng) -> TableTree:
    """Small random table tree with occasional spans and short cell texts."""
    rows = []
    for _ in range(int(rng.integers(1, 4))):
        cells = []
        for _ in range(int(rng.integers(1, 4))):
            attrs = {}
            if rng.random() < 0.25:
                attrs["rowspan"] = int(rng.integers(1, 3))
            if rng.random() < 0.25:
                attrs["colspan"] = int(rng.integers(1, 3))
            length = int(rng.integers(0, 4))
            text = "".join(str(rng.choice(list("abx"))) for _ in range(length))
            cells.append(TableTree("td", attrs=attrs, text=text))
        rows.append(TableTree("tr", children=tuple(cells)))
    return TableTree("table", children=tuple(rows))


@pytest.fixture
def make_random_tree():
    return _random_tree


@pytest.fixture
def make_random_table():
    return _random_table
