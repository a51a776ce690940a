"""Levenshtein distance over Unicode scalars.

Row-wise dynamic program. The in-row dependency ``curr[j] = min(t[j],
curr[j-1] + 1)`` unrolls to ``curr[j] = j + min(i, min_{k<=j}(t[k] - k))``,
which vectorizes with a running minimum, so each row is a handful of numpy
operations instead of a Python loop.
"""

from __future__ import annotations

import numpy as np


def levenshtein(a: str, b: str) -> int:
    """Minimal number of insertions, deletions and substitutions."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    m = len(b)
    b_codes = np.fromiter(map(ord, b), dtype=np.int64, count=m)
    pos = np.arange(1, m + 1, dtype=np.int64)
    prev = np.arange(m + 1, dtype=np.int64)
    for i, ch in enumerate(a, start=1):
        t = np.minimum(prev[1:] + 1, prev[:-1] + (b_codes != ord(ch)))
        running = np.minimum(i, np.minimum.accumulate(t - pos))
        curr = np.empty(m + 1, dtype=np.int64)
        curr[0] = i
        curr[1:] = pos + running
        prev = curr
    return int(prev[-1])


def normalized_levenshtein(a: str, b: str) -> float:
    """Distance divided by the longer length; 0.0 when both are empty."""
    if not a and not b:
        return 0.0
    return levenshtein(a, b) / max(len(a), len(b))
