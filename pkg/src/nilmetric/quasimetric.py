"""Metric estimates for T_n and H_k and empirical quasi-metric constants.

For T_n the estimate of an element with normal-form exponents m_ij is
``sum |m_ij|^(1/(j-i))``; for H_k it is ``sum |n_i| + sum |m_j| + sqrt|p|``.
A quasi-metric ``E`` satisfies ``E/C - D <= |x| <= C E + D`` for constants
``C, D``; ``calibrate`` finds the smallest ``C`` for each ``D`` on an exact
ball.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .core import (
    GeneratorIndex,
    GroupElement,
    HeisenbergForm,
    NormalForm,
    heisenberg_generator,
    matrix_to_heisenberg,
    normal_form,
)
from .errors import InvalidArgument
from .exact import BallTable, bfs_ball


def integer_kth_root(m: int, k: int) -> int:
    """``floor(m ** (1/k))`` computed exactly with integer Newton iteration."""
    if m < 0 or k < 1:
        raise InvalidArgument("integer_kth_root needs m >= 0 and k >= 1")
    if k == 1 or m < 2:
        return m
    if k == 2:
        return math.isqrt(m)
    # start above the root; Newton from above decreases monotonically to it
    r = 1 << -(-m.bit_length() // k)
    while True:
        s = ((k - 1) * r + m // r ** (k - 1)) // k
        if s >= r:
            return r
        r = s


def kth_root(m: int, k: int) -> float:
    """``|m| ** (1/k)`` as a float, exact whenever ``|m|`` is a perfect k-th power."""
    m = abs(m)
    if m == 0:
        return 0.0
    r = integer_kth_root(m, k)
    if r ** k == m:
        return float(r)
    if m < 1 << 1000:
        return float(m) ** (1.0 / k)
    return math.exp(math.log(m) / k)


@dataclass(frozen=True)
class MetricEstimate:
    """An estimate and its per-generator contributions (each ``>= 0``)."""

    value: float
    terms: Dict[object, float]
    floor_value: int = 0

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class QuasiMetricConstants:
    C: float
    D: float

    def holds(self, estimate: float, length: int, slack: float = 1e-9) -> bool:
        lower = estimate / self.C - self.D <= length + slack
        upper = length <= self.C * estimate + self.D + slack
        return lower and upper


def estimate_T(nf: NormalForm) -> MetricEstimate:
    """Estimate for T_n from normal-form exponents.

    ``floor_value`` is the exact integer surrogate ``sum floor(|m|^(1/(j-i)))``.
    """
    terms: Dict[GeneratorIndex, float] = {}
    floor_total = 0
    for g, m in nf.exponents.items():
        if not m:
            continue
        g = GeneratorIndex(*g)
        terms[g] = kth_root(m, g.span)
        floor_total += integer_kth_root(abs(m), g.span)
    return MetricEstimate(math.fsum(terms.values()), terms, floor_total)


def estimate_H(h: HeisenbergForm) -> MetricEstimate:
    terms: Dict[str, float] = {}
    for t, n in enumerate(h.a_exps, 1):
        if n:
            terms[f"a_{t}"] = float(abs(n))
    for t, m in enumerate(h.b_exps, 1):
        if m:
            terms[f"b_{t}"] = float(abs(m))
    floor_total = sum(abs(n) for n in h.a_exps) + sum(abs(m) for m in h.b_exps)
    if h.c_exp:
        terms["c"] = kth_root(h.c_exp, 2)
        floor_total += math.isqrt(abs(h.c_exp))
    return MetricEstimate(math.fsum(terms.values()), terms, floor_total)


def estimate_element(x: GroupElement, heisenberg_k: Optional[int] = None) -> MetricEstimate:
    """Estimate of ``x`` as an element of T_n, or of H_k when ``heisenberg_k`` is set."""
    if heisenberg_k is not None:
        return estimate_H(matrix_to_heisenberg(x, heisenberg_k))
    return estimate_T(normal_form(x))


def heisenberg_generators(k: int) -> Tuple[GeneratorIndex, ...]:
    """``a_1..a_k, b_1..b_k, c`` as positions in T_{k+2}."""
    return (
        tuple(heisenberg_generator(k, "a", t) for t in range(1, k + 1))
        + tuple(heisenberg_generator(k, "b", t) for t in range(1, k + 1))
        + (heisenberg_generator(k, "c"),)
    )


@dataclass(frozen=True)
class CalibrationRow:
    D: float
    C: float
    lower_witness: Optional[GroupElement]
    upper_witness: Optional[GroupElement]


@dataclass
class CalibrationReport:
    rows: List[CalibrationRow]
    ball_size: int
    radius: int
    table: BallTable = field(repr=False)

    @property
    def constants(self) -> QuasiMetricConstants:
        """The pair with the smallest C (ties broken towards smaller D)."""
        best = min(self.rows, key=lambda r: (r.C, r.D))
        return QuasiMetricConstants(best.C, best.D)

    def constants_for(self, D: float) -> QuasiMetricConstants:
        for row in self.rows:
            if row.D == D:
                return QuasiMetricConstants(row.C, row.D)
        raise KeyError(D)


def calibrate(dim: Optional[int] = None, gens: Optional[Sequence] = None, radius: int = 4,
              heisenberg_k: Optional[int] = None, budget: Optional[int] = None,
              d_grid: Iterable[float] = range(9), table: Optional[BallTable] = None) -> CalibrationReport:
    """Smallest ``C >= 1`` per ``D`` such that the sandwich holds on a whole exact ball.

    The group is T_dim, or H_k inside T_{k+2} when ``heisenberg_k`` is given
    (then ``gens`` defaults to ``a_i, b_i, c``).  For each ``D``,
    ``C = max(max E/(|x|+D), max (|x|-D)/E)``; the elements attaining the
    two maxima are reported as witnesses.
    """
    if heisenberg_k is not None:
        dim = heisenberg_k + 2
        if gens is None:
            gens = heisenberg_generators(heisenberg_k)
    if table is None:
        if dim is None:
            raise InvalidArgument("need a dimension, a Heisenberg index or a table")
        table = bfs_ball(dim, gens, radius, budget=budget)
    samples = [(x, n, estimate_element(x, heisenberg_k).value) for x, n in table.elements()]
    rows = []
    for D in d_grid:
        lo_c, lo_w = 0.0, None
        up_c, up_w = 0.0, None
        for x, n, e in samples:
            if n + D > 0 and e / (n + D) > lo_c:
                lo_c, lo_w = e / (n + D), x
            if e > 0 and (n - D) / e > up_c:
                up_c, up_w = (n - D) / e, x
        # C < 1 would make the lower bound stronger than E itself; 1 is the floor
        C = max(lo_c, up_c, 1.0)
        rows.append(CalibrationRow(float(D), C, lo_w, up_w))
    return CalibrationReport(rows, len(table), table.radius, table)
