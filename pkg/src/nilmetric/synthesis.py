"""Short words realising the upper bound of the metric estimates.

An entry ``a_ij^m`` with ``j - i = d >= 2`` is written as a product of
iterated commutators ``[a_{i,i+1}^q, a_{i+1,i+2}^q, ..., a_{j-1,j}^q]``,
each equal to ``a_ij^(q^d)``, one per part of a decomposition of ``|m|``
into d-th powers.  Such a commutator has length linear in ``q``.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import kernels
from .core import GroupElement, HeisenbergForm, Word, heisenberg_generator, normal_form
from .errors import InvalidArgument, InvalidSpan, ResourceLimit
from .quasimetric import integer_kth_root

DEFAULT_WARING_CAP = 10_000_000


@dataclass(frozen=True)
class PowerDecomposition:
    """``|target| = sum(q ** k for q in parts)``; ``sign`` carries the sign of target."""

    target: int
    k: int
    parts: Tuple[int, ...]
    sign: int = 1

    def total(self) -> int:
        return sum(q ** self.k for q in self.parts)


def hilbert_waring_g(k: int) -> int:
    """g(k): how many k-th powers every positive integer may need."""
    return 2 ** k + (3 ** k // 2 ** k) - 2


def _square_search(n: int, count: int, qmax: int) -> Optional[List[int]]:
    # lexicographically largest way to write n as `count` squares (zeros dropped), parts <= qmax
    if n == 0:
        return []
    if count == 0:
        return None
    r = math.isqrt(n)
    if count == 1:
        return [r] if r * r == n and r <= qmax else None
    lo = math.isqrt((n - 1) // count) + 1 if n > count else 1
    for q in range(min(qmax, r), lo - 1, -1):
        rest = _square_search(n - q * q, count - 1, q)
        if rest is not None:
            return [q] + rest
    return None


def _min_squares(n: int) -> int:
    if n == 0:
        return 0
    if math.isqrt(n) ** 2 == n:
        return 1
    m = n
    while m % 4 == 0:
        m //= 4
    if m % 8 == 7:
        return 4
    if _square_search(n, 2, math.isqrt(n)) is not None:
        return 2
    return 3


def four_squares(p: int) -> PowerDecomposition:
    """Fewest squares summing to ``p``; among those, the lexicographically largest parts."""
    if p < 0:
        raise InvalidArgument("four_squares needs p >= 0")
    c = _min_squares(p)
    parts = _square_search(p, c, math.isqrt(p)) if p else []
    return PowerDecomposition(p, 2, tuple(parts), 1)


class _WaringTables:
    """Per-exponent minimal-part-count tables, grown on demand."""

    def __init__(self):
        self._lock = threading.Lock()
        self._tables: Dict[int, np.ndarray] = {}

    def get(self, k: int, m: int) -> np.ndarray:
        table = self._tables.get(k)
        if table is not None and len(table) > m:
            return table
        with self._lock:
            table = self._tables.get(k)
            if table is None or len(table) <= m:
                size = min(1 << max(10, m.bit_length()), max(m, DEFAULT_WARING_CAP) + 1)
                table = kernels.min_power_parts(k, size)
                self._tables[k] = table
            return table


_TABLES = _WaringTables()


def waring_decompose(m: int, k: int, cap: int = DEFAULT_WARING_CAP) -> PowerDecomposition:
    """Fewest k-th powers summing to ``m`` (largest parts first).

    Squares go through ``four_squares`` and ``k = 1`` is trivial; other
    exponents use a dynamic-programming table, so ``m`` must not exceed ``cap``.
    """
    if m < 0 or k < 1:
        raise InvalidArgument("waring_decompose needs m >= 0 and k >= 1")
    if k == 1:
        return PowerDecomposition(m, 1, (m,) if m else (), 1)
    if k == 2:
        return four_squares(m)
    if m > cap:
        raise ResourceLimit(f"{m} exceeds the Waring table cap {cap}")
    dp = _TABLES.get(k, m)
    parts = []
    n = m
    while n:
        need = dp[n] - 1
        q = integer_kth_root(n, k)
        while dp[n - q ** k] != need:
            q -= 1
        parts.append(q)
        n -= q ** k
    return PowerDecomposition(m, k, tuple(parts), 1)


def reduced_decompose(m: int, k: int, cap: int = DEFAULT_WARING_CAP) -> PowerDecomposition:
    """Like ``waring_decompose`` but usable beyond ``cap``.

    Largest k-th powers are peeled off greedily until the remainder fits the
    table, so the part count may exceed the minimum by a few.
    """
    if m < 0 or k < 1:
        raise InvalidArgument("reduced_decompose needs m >= 0 and k >= 1")
    parts = []
    n = m
    if k >= 3:
        while n > cap:
            q = integer_kth_root(n, k)
            parts.append(q)
            n -= q ** k
    parts.extend(waring_decompose(n, k, cap).parts)
    return PowerDecomposition(m, k, tuple(parts), 1)


def _comm(u: Word, v: Word) -> Word:
    return u.inverse() + v.inverse() + u + v


def commutator_word(i: int, j: int, q: int, sign: int = 1, dim: Optional[int] = None) -> Word:
    """Expanded ``[a_{i,i+1}^q, ..., a_{j-1,j}^q]``, which equals ``a_ij^(sign q^(j-i))``.

    For ``sign = -1`` the two arguments of the outermost commutator are swapped.
    """
    if dim is not None and not (1 <= i < j <= dim):
        raise InvalidArgument(f"a[{i},{j}] is not a generator of T_{dim}")
    if j - i < 2:
        raise InvalidSpan(f"span {j - i} < 2 has no commutator expression")
    if q < 1 or sign not in (1, -1):
        raise InvalidArgument("need q >= 1 and sign = +-1")
    w = Word.single(i, i + 1, q)
    for t in range(i + 1, j):
        x = Word.single(t, t + 1, q)
        w = _comm(x, w) if (sign < 0 and t == j - 1) else _comm(w, x)
    return w


def commutator_length(span: int) -> int:
    """Length of the expanded commutator per unit of ``q``."""
    c = 1
    for _ in range(span - 1):
        c = 2 * c + 2
    return c


def length_constant(dim: int) -> int:
    """K with ``length(short_word(x)) <= K * estimate_T(x)`` on T_dim."""
    return max(hilbert_waring_g(d) * commutator_length(d) for d in range(1, max(dim, 2)))


def _term_word(i: int, j: int, m: int, cap: int, strict: bool) -> Word:
    literal = Word.single(i, j, m)
    d = j - i
    if d == 1 or m == 0:
        return literal
    sign = 1 if m > 0 else -1
    dec = waring_decompose(abs(m), d, cap) if strict else reduced_decompose(abs(m), d, cap)
    if sum(dec.parts) * commutator_length(d) >= abs(m):
        return literal
    w = Word()
    for q in dec.parts:
        w = w + commutator_word(i, j, q, sign)
    return w


def short_word(x: GroupElement, cap: int = DEFAULT_WARING_CAP, strict: bool = False) -> Word:
    """A word for ``x`` of length at most ``length_constant(dim) * (E(x) + 1)``.

    Normal-form terms are emitted in order; each ``a_ij^m`` uses whichever
    is shorter of the literal power and its commutator expansion.  Exponents
    above ``cap`` go through ``reduced_decompose``, or raise ``ResourceLimit``
    when ``strict``.
    """
    nf = normal_form(x)
    w = Word()
    for g in nf.word():
        w = w + _term_word(g.gen.i, g.gen.j, g.exp, cap, strict)
    return w


def short_word_H(h: HeisenbergForm) -> Word:
    """Word in the Heisenberg generators for ``c^p b_k^m_k a_k^n_k ... b_1^m_1 a_1^n_1``.

    ``c^p`` is always written as commutators ``[a_1^q, b_1^q]`` over a
    four-squares decomposition of ``|p|`` (arguments swapped when p < 0).
    """
    k = h.k
    a1 = heisenberg_generator(k, "a", 1)
    b1 = heisenberg_generator(k, "b", 1)
    w = Word()
    for q in four_squares(abs(h.c_exp)).parts:
        u, v = Word([(a1, q)]), Word([(b1, q)])
        w = w + (_comm(u, v) if h.c_exp > 0 else _comm(v, u))
    for t in range(k, 0, -1):
        w = w + Word([(heisenberg_generator(k, "b", t), h.b_exps[t - 1]),
                      (heisenberg_generator(k, "a", t), h.a_exps[t - 1])])
    return w
