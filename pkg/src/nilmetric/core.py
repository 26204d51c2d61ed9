"""Exact arithmetic in the unitriangular groups T_n and Heisenberg groups H_k.

Elements are unipotent upper-triangular integer matrices.  Only the strictly
upper-triangular part is stored, densely, in row-major order
``(1,2), (1,3), ..., (1,n), (2,3), ...``.  Python integers keep everything
exact regardless of how large the entries grow.

The Heisenberg group H_k sits inside T_{k+2} as the matrices whose nonzero
off-diagonal entries lie in the first row and the last column:
``a_i -> (1, i+1)``, ``b_i -> (i+1, k+2)`` and ``c -> (1, k+2)``.

Commutators follow ``[x, y] = x^-1 y^-1 x y`` throughout.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .errors import DimensionError, InvalidDimension, InvalidGenerator, NotInSubgroup

__all__ = [
    "GeneratorIndex",
    "Letter",
    "Word",
    "GroupElement",
    "NormalForm",
    "HeisenbergForm",
    "identity",
    "generator",
    "multiply",
    "inverse",
    "commutator",
    "evaluate_word",
    "normal_form",
    "generator_order",
    "order_key",
    "decreasing_generators",
    "heisenberg_generator",
    "heisenberg_to_matrix",
    "matrix_to_heisenberg",
    "random_element",
    "random_word",
    "triangular_relators",
    "heisenberg_relators",
]


class GeneratorIndex(NamedTuple):
    """The elementary generator a_ij, i.e. the identity plus 1 at (i, j)."""

    i: int
    j: int

    @property
    def span(self) -> int:
        return self.j - self.i

    def check(self, dim: int) -> "GeneratorIndex":
        if not (1 <= self.i < self.j <= dim):
            raise InvalidGenerator(f"a[{self.i},{self.j}] is not a generator of T_{dim}")
        return self


class Letter(NamedTuple):
    gen: GeneratorIndex
    exp: int


def _as_gen(g) -> GeneratorIndex:
    if isinstance(g, GeneratorIndex):
        return g
    i, j = g
    return GeneratorIndex(int(i), int(j))


class Word:
    """A run-length encoded word in the generators a_ij.

    Adjacent letters on the same generator are merged and zero exponents
    dropped at construction, so ``Word`` values are always reduced in that
    sense.  ``length`` is the word length, the sum of absolute exponents.
    """

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable = ()):
        out: List[Letter] = []
        for item in letters:
            g, e = item
            g = _as_gen(g)
            e = int(e)
            if e == 0:
                continue
            if out and out[-1].gen == g:
                e += out[-1].exp
                out.pop()
                if e == 0:
                    continue
            out.append(Letter(g, e))
        self.letters: Tuple[Letter, ...] = tuple(out)

    @classmethod
    def single(cls, i: int, j: int, e: int = 1) -> "Word":
        return cls([((i, j), e)])

    @property
    def length(self) -> int:
        return sum(abs(l.exp) for l in self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __repr__(self) -> str:
        body = " ".join(f"a[{l.gen.i},{l.gen.j}]^{l.exp}" for l in self.letters)
        return f"Word({body!r})"

    def inverse(self) -> "Word":
        return Word((l.gen, -l.exp) for l in reversed(self.letters))

    def power(self, n: int) -> "Word":
        if n < 0:
            return self.inverse().power(-n)
        return Word(self.letters * n)

    def max_index(self) -> int:
        return max((l.gen.j for l in self.letters), default=0)

    def units(self) -> Iterator[Tuple[GeneratorIndex, int]]:
        """Yield the word letter by letter with unit exponents."""
        for g, e in self.letters:
            s = 1 if e > 0 else -1
            for _ in range(abs(e)):
                yield g, s


@lru_cache(maxsize=None)
def _positions(dim: int) -> Tuple[Tuple[int, int], ...]:
    return tuple((i, j) for i in range(1, dim + 1) for j in range(i + 1, dim + 1))


@lru_cache(maxsize=None)
def _offsets(dim: int) -> Dict[Tuple[int, int], int]:
    return {p: n for n, p in enumerate(_positions(dim))}


def _check_dim(dim: int) -> int:
    if not isinstance(dim, int) or dim < 2:
        raise InvalidDimension(f"dimension must be an integer >= 2, got {dim!r}")
    return dim


class GroupElement:
    """An element of T_n, stored as its strictly upper-triangular entries.

    Immutable and hashable.  ``entries`` exposes the nonzero entries as a
    dict keyed by 1-based ``(i, j)``; ``x[i, j]`` reads any entry, including
    the implicit zeros and the unit diagonal.
    """

    __slots__ = ("dim", "_v", "_hash")

    def __init__(self, dim: int, entries=None):
        _check_dim(dim)
        self.dim = dim
        if entries is None:
            v = [0] * (dim * (dim - 1) // 2)
        elif isinstance(entries, dict):
            off = _offsets(dim)
            v = [0] * len(off)
            for key, val in entries.items():
                i, j = key
                if (i, j) not in off:
                    raise InvalidGenerator(f"entry ({i},{j}) is not strictly upper-triangular in dim {dim}")
                v[off[i, j]] = int(val)
        else:
            v = [int(t) for t in entries]
            if len(v) != dim * (dim - 1) // 2:
                raise DimensionError(f"expected {dim * (dim - 1) // 2} entries for dim {dim}, got {len(v)}")
        self._v: Tuple[int, ...] = tuple(v)
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, v: Tuple[int, ...]) -> "GroupElement":
        obj = cls.__new__(cls)
        obj.dim = dim
        obj._v = v
        obj._hash = None
        return obj

    @property
    def vector(self) -> Tuple[int, ...]:
        """Entries in row-major order over the positions i < j."""
        return self._v

    @property
    def entries(self) -> Dict[Tuple[int, int], int]:
        return {p: e for p, e in zip(_positions(self.dim), self._v) if e}

    def __getitem__(self, key) -> int:
        i, j = key
        if i == j:
            return 1
        if i > j:
            return 0
        return self._v[_offsets(self.dim)[i, j]]

    def is_identity(self) -> bool:
        return not any(self._v)

    def as_matrix(self) -> List[List[int]]:
        n = self.dim
        return [[self[i, j] for j in range(1, n + 1)] for i in range(1, n + 1)]

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupElement) and self.dim == other.dim and self._v == other._v

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, self._v))
        return self._hash

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def __pow__(self, n: int) -> "GroupElement":
        base = self if n >= 0 else inverse(self)
        n = abs(n)
        result = identity(self.dim)
        while n:
            if n & 1:
                result = multiply(result, base)
            base = multiply(base, base)
            n >>= 1
        return result

    def inverse(self) -> "GroupElement":
        return inverse(self)

    def __repr__(self) -> str:
        return f"GroupElement({self.dim}, {self.entries!r})"


def identity(dim: int) -> GroupElement:
    _check_dim(dim)
    return GroupElement._raw(dim, (0,) * (dim * (dim - 1) // 2))


def generator(dim: int, g, e: int = 1) -> GroupElement:
    g = _as_gen(g).check(_check_dim(dim))
    v = [0] * (dim * (dim - 1) // 2)
    v[_offsets(dim)[g]] = int(e)
    return GroupElement._raw(dim, tuple(v))


def multiply(x: GroupElement, y: GroupElement) -> GroupElement:
    if x.dim != y.dim:
        raise DimensionError(f"cannot multiply elements of dims {x.dim} and {y.dim}")
    n = x.dim
    off = _offsets(n)
    xv, yv = x._v, y._v
    out = []
    for i, j in _positions(n):
        s = xv[off[i, j]] + yv[off[i, j]]
        for k in range(i + 1, j):
            a = xv[off[i, k]]
            if a:
                s += a * yv[off[k, j]]
        out.append(s)
    return GroupElement._raw(n, tuple(out))


def inverse(x: GroupElement) -> GroupElement:
    """Exact inverse by back-substitution on ``x z = I``."""
    n = x.dim
    off = _offsets(n)
    xv = x._v
    z = [0] * len(xv)
    for i in range(n - 1, 0, -1):
        for j in range(i + 1, n + 1):
            s = -xv[off[i, j]]
            for k in range(i + 1, j):
                a = xv[off[i, k]]
                if a:
                    s -= a * z[off[k, j]]
            z[off[i, j]] = s
    return GroupElement._raw(n, tuple(z))


def commutator(x: GroupElement, y: GroupElement) -> GroupElement:
    """``[x, y] = x^-1 y^-1 x y``."""
    return multiply(multiply(inverse(x), inverse(y)), multiply(x, y))


def _apply_letter(v: List[int], dim: int, off, i: int, j: int, e: int) -> None:
    # right multiplication by I + e E_ij adds e * (column i) to column j
    for r in range(1, i):
        a = v[off[r, i]]
        if a:
            v[off[r, j]] += e * a
    v[off[i, j]] += e


def evaluate_word(w: Word, dim: int) -> GroupElement:
    """Product of the word's letters, left to right, as a dim x dim matrix."""
    _check_dim(dim)
    off = _offsets(dim)
    v = [0] * len(off)
    for g, e in w:
        g.check(dim)
        _apply_letter(v, dim, off, g.i, g.j, e)
    return GroupElement._raw(dim, tuple(v))


def order_key(g) -> Tuple[int, int]:
    """Sort key realising the generator order: larger key = larger generator."""
    i, j = g
    return (j - i, j)


def generator_order(g1, g2) -> int:
    """Compare two generators: 1 if ``g1 > g2``, -1 if ``g1 < g2``, 0 if equal.

    Farther from the diagonal is larger; on one diagonal, larger ``j`` is larger.
    """
    k1, k2 = order_key(g1), order_key(g2)
    return (k1 > k2) - (k1 < k2)


@lru_cache(maxsize=None)
def decreasing_generators(dim: int) -> Tuple[GeneratorIndex, ...]:
    """All generators of T_dim, largest first (the normal-form order)."""
    gens = [GeneratorIndex(i, j) for i, j in _positions(_check_dim(dim))]
    return tuple(sorted(gens, key=order_key, reverse=True))


@dataclass(frozen=True)
class NormalForm:
    """Exponents m_ij of the ordered product of a_ij^m_ij, largest generator first.

    For n <= 3 the exponents are the matrix entries.  From n = 4 on they can
    differ: ``a_13`` precedes ``a_34`` in the order and ``a_13 a_34`` has a
    (1,4) entry.  The exponents are always the ones whose ordered product
    reproduces the element.
    """

    dim: int
    exponents: Dict[Tuple[int, int], int] = field(hash=False)

    def __getitem__(self, key) -> int:
        return self.exponents.get(tuple(key), 0)

    def word(self) -> Word:
        return Word((g, self.exponents.get(g, 0)) for g in decreasing_generators(self.dim))

    def nonzero(self) -> Dict[Tuple[int, int], int]:
        return {g: e for g, e in self.exponents.items() if e}

    def to_element(self) -> GroupElement:
        return evaluate_word(self.word(), self.dim)


def normal_form(x: GroupElement) -> NormalForm:
    """Peel generators off the right end, smallest first.

    When ``a_g`` is the smallest generator left, the remaining product's entry
    at ``g`` is exactly ``m_g``: every other factor is larger, and no chain of
    larger generators reaches position ``g``.
    """
    n = x.dim
    off = _offsets(n)
    v = list(x._v)
    exps = {}
    for g in reversed(decreasing_generators(n)):
        m = v[off[g]]
        exps[g] = m
        if m:
            _apply_letter(v, n, off, g.i, g.j, -m)
    return NormalForm(n, exps)


@dataclass(frozen=True)
class HeisenbergForm:
    """Normal form ``c^p b_k^m_k a_k^n_k ... b_1^m_1 a_1^n_1`` of an element of H_k."""

    k: int
    a_exps: Tuple[int, ...]
    b_exps: Tuple[int, ...]
    c_exp: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise InvalidDimension(f"Heisenberg index k must be >= 1, got {self.k}")
        object.__setattr__(self, "a_exps", tuple(int(t) for t in self.a_exps))
        object.__setattr__(self, "b_exps", tuple(int(t) for t in self.b_exps))
        if len(self.a_exps) != self.k or len(self.b_exps) != self.k:
            raise DimensionError(f"H_{self.k} needs {self.k} a- and b-exponents")

    @classmethod
    def zero(cls, k: int) -> "HeisenbergForm":
        return cls(k, (0,) * k, (0,) * k, 0)


def heisenberg_generator(k: int, name: str, index: int = 0) -> GeneratorIndex:
    """Position in T_{k+2} of the Heisenberg generator a_index, b_index or c."""
    if name == "c":
        return GeneratorIndex(1, k + 2)
    if not 1 <= index <= k:
        raise InvalidGenerator(f"{name}_{index} is not a generator of H_{k}")
    if name == "a":
        return GeneratorIndex(1, index + 1)
    if name == "b":
        return GeneratorIndex(index + 1, k + 2)
    raise InvalidGenerator(f"unknown Heisenberg generator {name!r}")


def heisenberg_to_matrix(h: HeisenbergForm) -> GroupElement:
    k = h.k
    entries = {}
    for t in range(1, k + 1):
        entries[1, t + 1] = h.a_exps[t - 1]
        entries[t + 1, k + 2] = h.b_exps[t - 1]
    entries[1, k + 2] = h.c_exp
    return GroupElement(k + 2, entries)


def matrix_to_heisenberg(x: GroupElement, k: int) -> HeisenbergForm:
    if x.dim != k + 2:
        raise DimensionError(f"H_{k} lives in dimension {k + 2}, got {x.dim}")
    for (i, j), e in x.entries.items():
        if i != 1 and j != k + 2:
            raise NotInSubgroup(f"entry ({i},{j}) = {e} lies outside the Heisenberg pattern")
    return HeisenbergForm(
        k,
        tuple(x[1, t + 1] for t in range(1, k + 1)),
        tuple(x[t + 1, k + 2] for t in range(1, k + 1)),
        x[1, k + 2],
    )


def random_element(dim: int, rng: random.Random, bound: int = 10, positions: Optional[Sequence] = None) -> GroupElement:
    """Uniform entries in [-bound, bound] at ``positions`` (default: all)."""
    positions = _positions(dim) if positions is None else [tuple(p) for p in positions]
    return GroupElement(dim, {p: rng.randint(-bound, bound) for p in positions})


def random_word(dim: int, length: int, rng: random.Random, gens: Optional[Sequence] = None) -> Word:
    """A freely reduced word of exactly ``length`` unit letters over ``gens`` and inverses."""
    gens = list(decreasing_generators(dim)) if gens is None else [_as_gen(g) for g in gens]
    letters = []
    while len(letters) < length:
        g, s = rng.choice(gens), rng.choice((1, -1))
        if letters and letters[-1] == (g, -s):
            continue
        letters.append((g, s))
    return Word(letters)


def _comm_word(g, h) -> Word:
    return Word([(g, -1), (h, -1), (g, 1), (h, 1)])


def triangular_relators(n: int) -> List[Tuple[str, Word]]:
    """Relators of T_n, each a word that must evaluate to the identity.

    ``[a_ik, a_kj] a_ij^-1`` for ``i < k < j``, and ``[a_ij, a_kl]`` for
    every ordered pair with ``j != k`` and ``i != l``.
    """
    _check_dim(n)
    gens = _positions(n)
    out = []
    for i, j in gens:
        for k in range(i + 1, j):
            w = _comm_word((i, k), (k, j)) + Word([((i, j), -1)])
            out.append((f"[a{i}{k},a{k}{j}]=a{i}{j}", w))
    for g in gens:
        for h in gens:
            if g != h and g[1] != h[0] and g[0] != h[1]:
                out.append((f"[a{g[0]}{g[1]},a{h[0]}{h[1]}]=1", _comm_word(g, h)))
    return out


def heisenberg_relators(k: int) -> List[Tuple[str, Word]]:
    """Relators of H_k written over its generator positions in T_{k+2}."""
    a = [heisenberg_generator(k, "a", t) for t in range(1, k + 1)]
    b = [heisenberg_generator(k, "b", t) for t in range(1, k + 1)]
    c = heisenberg_generator(k, "c")
    out = []
    for t in range(k):
        out.append((f"[a{t + 1},b{t + 1}]=c", _comm_word(a[t], b[t]) + Word([(c, -1)])))
        out.append((f"[a{t + 1},c]=1", _comm_word(a[t], c)))
        out.append((f"[b{t + 1},c]=1", _comm_word(b[t], c)))
        for u in range(k):
            if u != t:
                out.append((f"[a{t + 1},a{u + 1}]=1", _comm_word(a[t], a[u])))
                out.append((f"[b{t + 1},b{u + 1}]=1", _comm_word(b[t], b[u])))
                out.append((f"[a{t + 1},b{u + 1}]=1", _comm_word(a[t], b[u])))
    return out
