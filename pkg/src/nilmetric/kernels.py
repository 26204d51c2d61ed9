"""Backend selection for the hot kernels, plus the lookup tables they share.

The compiled extension ``nilmetric._kernels`` is used when importable; the
pure-Python module is the fallback.  Setting ``NILMETRIC_PURE_PYTHON=1``
forces the fallback.  ``BACKEND`` names the active one.
"""
from __future__ import annotations

import os
from functools import lru_cache
from typing import List, Tuple

from . import _kernels_py
from .core import (
    GeneratorIndex,
    _offsets,
    _positions,
    commutator,
    decreasing_generators,
    generator,
)

try:
    if os.environ.get("NILMETRIC_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure Python backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

# compiled kernels keep entries in int64; beyond this we use Python ints
INT64_SAFE = 1 << 62


def backends():
    """Available kernel modules keyed by name (the Python one always present)."""
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["cython"] = _compiled
    return out


def _active(backend=None):
    if backend is None:
        return _compiled or _kernels_py
    return backends()[backend]


@lru_cache(maxsize=None)
def generator_ranks(dim: int) -> Tuple[GeneratorIndex, ...]:
    """Generators of T_dim by increasing rank (rank 0 is the smallest)."""
    return tuple(reversed(decreasing_generators(dim)))


@lru_cache(maxsize=None)
def rank_of(dim: int) -> dict:
    return {g: r for r, g in enumerate(generator_ranks(dim))}


def commutator_rule(g: GeneratorIndex, h: GeneratorIndex):
    """``[a_g, a_h]`` as ``(generator, sign)``, or None when they commute."""
    (a, b), (c, d) = g, h
    if b == c:
        return GeneratorIndex(a, d), 1
    if a == d:
        return GeneratorIndex(c, b), -1
    return None


@lru_cache(maxsize=None)
def commutator_tables(dim: int) -> Tuple[List[int], List[int]]:
    """Flattened ``corr``/``csign`` tables indexed by ``g_rank * N + h_rank``.

    Every entry, for all four sign combinations, is checked against the
    matrix commutator once, when the table is built.
    """
    gens = generator_ranks(dim)
    ranks = rank_of(dim)
    N = len(gens)
    corr = [-1] * (N * N)
    csign = [0] * (N * N)
    for gi, g in enumerate(gens):
        for hi, h in enumerate(gens):
            rule = commutator_rule(g, h)
            for s in (1, -1):
                for t in (1, -1):
                    got = commutator(generator(dim, g, s), generator(dim, h, t))
                    want = generator(dim, rule[0], rule[1] * s * t) if rule else generator(dim, g, 0)
                    assert got == want, (g, h, s, t)
            if rule:
                corr[gi * N + hi] = ranks[rule[0]]
                csign[gi * N + hi] = rule[1]
    return corr, csign


def collect_units(dim: int, letters, backend=None):
    """Run the collection kernel on ``letters`` given as ``(rank, exp)`` pairs."""
    corr, csign = commutator_tables(dim)
    N = dim * (dim - 1) // 2
    mod = _active(backend)
    if mod is not _kernels_py:
        L = sum(abs(e) for _, e in letters)
        if L and L ** (dim - 1) * 4 >= INT64_SAFE:
            mod = _kernels_py
    return mod.collect_units(N, corr, csign, list(letters))


@lru_cache(maxsize=None)
def _move_table(dim: int, gens: Tuple[GeneratorIndex, ...]):
    off = _offsets(dim)
    moves = []
    for g in gens:
        i, j = g
        pairs = tuple((off[r, j], off[r, i]) for r in range(1, i))
        for s in (1, -1):
            moves.append((pairs, off[i, j], s))
    return tuple(moves)


def bfs_ball(dim: int, gens, radius: int, budget: int, backend=None):
    """Run the BFS kernel; moves are ``g^+1, g^-1`` for each ``g`` in ``gens``."""
    gens = tuple(GeneratorIndex(*g) for g in gens)
    moves = _move_table(dim, gens)
    n_entries = len(_positions(dim))
    mod = _active(backend)
    # entries of a radius-r ball are at most r^(dim-1) in absolute value
    if mod is not _kernels_py and (radius + 1) ** (dim - 1) >= INT64_SAFE >> 4:
        mod = _kernels_py
    return mod.bfs_ball(n_entries, moves, radius, budget)


def min_power_parts(k: int, size: int, backend=None):
    """Table of the fewest k-th powers summing to each ``n < size`` (numpy int64)."""
    return _active(backend).min_power_parts(k, size)
