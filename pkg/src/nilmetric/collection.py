"""Collection: rewriting a word into normal form using only the relators.

The strategy is deterministic: repeatedly act on the leftmost adjacent pair
that is either a free cancellation ``a^s a^-s`` or out of the decreasing
generator order.  An out-of-order pair ``x y`` becomes ``y x [x, y]``; the
correction letter ``[x, y]`` is a single generator (or nothing when ``x``
and ``y`` commute) and is inserted right after the swapped pair.  Letters are
handled with unit exponents so that instance counts are counts of ``a^±1``.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import kernels
from .core import GeneratorIndex, NormalForm, Word, _check_dim
from .errors import InvalidArgument


@dataclass(frozen=True)
class CollectionTrace:
    input_length: int
    max_counts: Dict[GeneratorIndex, int]
    swap_count: int
    result: NormalForm
    peak_first_diagonal: int

    def count(self, i: int, j: int) -> int:
        return self.max_counts.get(GeneratorIndex(i, j), 0)


def collect(w: Word, dim: int, backend: Optional[str] = None) -> CollectionTrace:
    """Collect ``w`` in T_dim, recording peak instance counts per generator."""
    _check_dim(dim)
    ranks = kernels.rank_of(dim)
    letters = [(ranks[g.check(dim)], e) for g, e in w]
    ex, peak, swaps = kernels.collect_units(dim, letters, backend=backend)
    gens = kernels.generator_ranks(dim)
    first = sum(abs(e) for g, e in w if g.span == 1)
    return CollectionTrace(
        input_length=w.length,
        max_counts={g: int(peak[r]) for r, g in enumerate(gens)},
        swap_count=int(swaps),
        result=NormalForm(dim, {g: int(ex[r]) for r, g in enumerate(gens)}),
        # first-diagonal letters are never created, so the initial count is the peak
        peak_first_diagonal=first,
    )


def log_log_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x); points with y <= 0 are skipped."""
    pts = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pts) < 2:
        return float("nan")
    mx = sum(p[0] for p in pts) / len(pts)
    my = sum(p[1] for p in pts) / len(pts)
    sxx = sum((p[0] - mx) ** 2 for p in pts)
    if sxx == 0:
        return float("nan")
    return sum((p[0] - mx) * (p[1] - my) for p in pts) / sxx


@dataclass(frozen=True)
class LemmaReport:
    """Fitted constants and growth slopes for the instance-count bound."""

    constants: Dict[GeneratorIndex, float]
    slopes: Dict[GeneratorIndex, float]
    violations: Tuple[GeneratorIndex, ...]
    traces: Tuple[CollectionTrace, ...]
    tolerance: float


def verify_lemma_bound(samples: Iterable[Word], dim: int, tolerance: float = 0.2,
                       backend: Optional[str] = None) -> LemmaReport:
    """Fit the minimal ``C`` with ``peak count <= C * L^(j-i)`` for every generator.

    Slopes are fitted on the per-length maxima of the peak counts; a generator
    is a violation when its slope exceeds ``j - i + tolerance``.
    """
    samples = list(samples)
    if not samples:
        raise InvalidArgument("need at least one sample word")
    traces = tuple(collect(w, dim, backend=backend) for w in samples)
    gens = kernels.generator_ranks(dim)
    constants, slopes = {}, {}
    violations = []
    for g in gens:
        d = g.span
        by_length = defaultdict(int)
        best = 0.0
        for tr in traces:
            L = tr.input_length
            if L == 0:
                continue
            c = tr.max_counts[g]
            best = max(best, c / L ** d)
            by_length[L] = max(by_length[L], c)
        constants[g] = best
        lengths = sorted(by_length)
        slopes[g] = log_log_slope(lengths, [by_length[L] for L in lengths])
        if slopes[g] == slopes[g] and slopes[g] > d + tolerance:
            violations.append(g)
    return LemmaReport(constants, slopes, tuple(violations), traces, tolerance)
