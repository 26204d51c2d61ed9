"""Exact word lengths by breadth-first search of the Cayley graph.

A ball is explored from the identity by right multiplication with each
generator and its inverse.  Each element keeps one incoming edge, so a
geodesic witness word can be read back for anything in the ball.

Ball tables serialise to a line-oriented text format::

    NILBALL1
    dim 3
    gens 1,2 2,3 1,3
    radius 6
    spheres 1 6 ...
    <hex canonical encoding> <length>
    ...

The canonical encoding is the dimension followed by the entries in the
normal-form generator order (largest generator first), each written as a
zigzag LEB128 varint.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from . import kernels
from .collection import log_log_slope
from .core import (
    GeneratorIndex,
    GroupElement,
    Word,
    _check_dim,
    _offsets,
    decreasing_generators,
)
from .errors import DimensionError, InvalidArgument, InvalidGenerator

DEFAULT_BUDGET = 50_000_000
MAGIC = "NILBALL1"


def default_budget() -> int:
    """Element cap for BFS; ``NILMETRIC_BUDGET`` overrides the default."""
    raw = os.environ.get("NILMETRIC_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def full_generators(dim: int) -> Tuple[GeneratorIndex, ...]:
    return decreasing_generators(dim)


def first_diagonal_generators(dim: int) -> Tuple[GeneratorIndex, ...]:
    return tuple(GeneratorIndex(i, i + 1) for i in range(1, dim))


def _varint(n: int, out: bytearray) -> None:
    n = (n << 1) if n >= 0 else ((-n) << 1) - 1
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out.append(b | 0x80)
        else:
            out.append(b)
            return


def _read_varint(data: bytes, pos: int) -> Tuple[int, int]:
    shift = n = 0
    while True:
        b = data[pos]
        pos += 1
        n |= (b & 0x7F) << shift
        shift += 7
        if not b & 0x80:
            break
    return ((n >> 1) if not n & 1 else -((n + 1) >> 1)), pos


def encode_element(x: GroupElement) -> bytes:
    out = bytearray()
    _varint(x.dim, out)
    for g in decreasing_generators(x.dim):
        _varint(x[g], out)
    return bytes(out)


def decode_element(data: bytes) -> GroupElement:
    dim, pos = _read_varint(data, 0)
    entries = {}
    for g in decreasing_generators(dim):
        entries[g], pos = _read_varint(data, pos)
    if pos != len(data):
        raise InvalidArgument("trailing bytes in element encoding")
    return GroupElement(dim, entries)


@dataclass
class BallTable:
    """Exact word lengths of every element within ``radius`` of the identity.

    ``lengths`` is keyed by the element's entry vector (row-major, see
    ``GroupElement.vector``).  ``parent``/``via`` hold the BFS tree when the
    table was computed rather than loaded from disk.
    """

    dim: int
    generating_set: Tuple[GeneratorIndex, ...]
    radius: int
    lengths: Dict[Tuple[int, ...], int]
    sphere_sizes: List[int]
    states: List[Tuple[int, ...]] = field(default_factory=list, repr=False)
    parent: List[int] = field(default_factory=list, repr=False)
    via: List[int] = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self.lengths)

    def __contains__(self, x: GroupElement) -> bool:
        return x.dim == self.dim and x.vector in self.lengths

    def elements(self) -> Iterator[Tuple[GroupElement, int]]:
        for v, n in self.lengths.items():
            yield GroupElement._raw(self.dim, v), n

    def witness(self, x: GroupElement) -> Optional[Word]:
        """A word of exactly the recorded length evaluating to ``x``."""
        if not self.parent:
            raise InvalidArgument("table has no BFS tree (loaded from file?)")
        if x not in self:
            return None
        if not hasattr(self, "_index"):
            self._index = {v: k for k, v in enumerate(self.states)}
        k = self._index[x.vector]
        letters = []
        while self.parent[k] >= 0:
            m = self.via[k]
            letters.append((self.generating_set[m // 2], 1 if m % 2 == 0 else -1))
            k = self.parent[k]
        return Word(reversed(letters))


def bfs_ball(dim: int, gens: Optional[Sequence] = None, radius: int = 1,
             budget: Optional[int] = None, backend: Optional[str] = None) -> BallTable:
    """Complete ball of ``radius`` in T_dim for the generating set ``gens``.

    ``gens`` defaults to every a_ij.  Exceeding ``budget`` raises
    ``ResourceLimit`` whose ``partial`` is the last complete radius.
    """
    _check_dim(dim)
    if radius < 0:
        raise InvalidArgument("radius must be >= 0")
    gens = full_generators(dim) if gens is None else tuple(GeneratorIndex(*g) for g in gens)
    if not gens:
        raise InvalidArgument("generating set is empty")
    for g in gens:
        g.check(dim)
    if len(set(gens)) != len(gens):
        raise InvalidGenerator("generating set has duplicates")
    budget = default_budget() if budget is None else budget
    states, dist, parent, via, spheres = kernels.bfs_ball(dim, gens, radius, budget, backend=backend)
    lengths = dict(zip(states, dist))
    return BallTable(dim, gens, radius, lengths, list(spheres), states, parent, via)


def exact_length(x: GroupElement, table: BallTable) -> Optional[int]:
    """Word length of ``x``, or None when ``x`` lies beyond the table's radius."""
    if x.dim != table.dim:
        raise DimensionError(f"element of dim {x.dim} queried in a dim-{table.dim} ball")
    return table.lengths.get(x.vector)


def sphere_growth(table: BallTable) -> List[Tuple[int, int]]:
    return list(enumerate(table.sphere_sizes))


def write_ball(table: BallTable, dest: Union[str, os.PathLike, io.TextIOBase]) -> None:
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="ascii") as fh:
            write_ball(table, fh)
        return
    records = sorted(
        (n, encode_element(GroupElement._raw(table.dim, v)).hex()) for v, n in table.lengths.items()
    )
    dest.write(f"{MAGIC}\n")
    dest.write(f"dim {table.dim}\n")
    dest.write("gens " + " ".join(f"{g.i},{g.j}" for g in table.generating_set) + "\n")
    dest.write(f"radius {table.radius}\n")
    dest.write("spheres " + " ".join(map(str, table.sphere_sizes)) + "\n")
    for n, enc in records:
        dest.write(f"{enc} {n}\n")


def read_ball(src: Union[str, os.PathLike, io.TextIOBase]) -> BallTable:
    if isinstance(src, (str, os.PathLike)):
        with open(src, encoding="ascii") as fh:
            return read_ball(fh)
    lines = src.read().splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise InvalidArgument(f"not a {MAGIC} file")
    header = {}
    for line in lines[1:5]:
        key, _, rest = line.partition(" ")
        header[key] = rest
    missing = {"dim", "gens", "radius", "spheres"} - set(header)
    if missing:
        raise InvalidArgument(f"ball header lacks {sorted(missing)}")
    dim = int(header["dim"])
    gens = tuple(GeneratorIndex(*map(int, tok.split(","))) for tok in header["gens"].split())
    lengths = {}
    for line in lines[5:]:
        if not line.strip():
            continue
        enc, n = line.split()
        x = decode_element(bytes.fromhex(enc))
        if x.dim != dim:
            raise InvalidArgument("record dimension disagrees with header")
        lengths[x.vector] = int(n)
    return BallTable(dim, gens, int(header["radius"]), lengths,
                     [int(t) for t in header["spheres"].split()])


def growth_exponent(table: BallTable, last: int = 3) -> float:
    """Log-log slope of cumulative ball size against radius over the last ``last`` radii.

    Small radii are dominated by lower-order terms of the growth polynomial,
    so only the outermost spheres are used.
    """
    sizes, total = [], 0
    for r, s in enumerate(table.sphere_sizes):
        total += s
        if r >= 1:
            sizes.append((r, total))
    pts = sizes[-last:]
    if len(pts) < 2:
        raise InvalidArgument("need at least two positive radii to fit a growth exponent")
    return log_log_slope([p[0] for p in pts], [p[1] for p in pts])
