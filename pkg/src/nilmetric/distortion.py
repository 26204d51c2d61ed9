"""Embeddings between the groups and empirical distortion functions.

Every embedding here sends each source generator to a single target
generator, so it is stored as a relabelling of matrix positions.  The
distortion of a subgroup is measured at the level of the metric estimates:
``Delta(n) = max E_inner(x)`` over sampled ``x`` with ``E_outer(image x) <= n``.
The samples are the single-generator witness families ``a_g^m`` plus random
perturbations of them.
"""
from __future__ import annotations

import csv
import io
import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .collection import log_log_slope
from .core import (
    GeneratorIndex,
    GroupElement,
    HeisenbergForm,
    Word,
    _positions,
    evaluate_word,
    generator_order,
    heisenberg_relators,
    heisenberg_to_matrix,
    identity,
    normal_form,
    random_element,
    triangular_relators,
)
from .errors import InvalidArgument, InvalidEmbedding, NotInSubgroup
from .exact import BallTable, bfs_ball, first_diagonal_generators
from .quasimetric import estimate_element, heisenberg_generators

KINDS = ("heis-subset", "heis-into-T", "T-corner", "T-block", "composed")


@dataclass(frozen=True)
class GroupSpec:
    """``H`` with index k (matrices of size k+2) or ``T`` with matrix size n."""

    family: str
    size: int

    @property
    def dim(self) -> int:
        return self.size + 2 if self.family == "H" else self.size

    @property
    def heisenberg_k(self) -> Optional[int]:
        return self.size if self.family == "H" else None

    def generators(self) -> Tuple[GeneratorIndex, ...]:
        if self.family == "H":
            return heisenberg_generators(self.size)
        return tuple(GeneratorIndex(*p) for p in _positions(self.size))

    def relators(self) -> List[Tuple[str, Word]]:
        if self.family == "H":
            return heisenberg_relators(self.size)
        return triangular_relators(self.size)

    def estimate(self, x: GroupElement) -> float:
        return estimate_element(x, self.heisenberg_k).value

    def random(self, rng: random.Random, bound: int) -> GroupElement:
        if self.family == "H":
            k = self.size
            return heisenberg_to_matrix(HeisenbergForm(
                k,
                [rng.randint(-bound, bound) for _ in range(k)],
                [rng.randint(-bound, bound) for _ in range(k)],
                rng.randint(-bound, bound),
            ))
        return random_element(self.size, rng, bound)

    def __str__(self) -> str:
        return f"{self.family}_{self.size}"


@dataclass(frozen=True)
class Embedding:
    """An injective homomorphism given by a map of generator positions."""

    kind: str
    source: GroupSpec
    target: GroupSpec
    params: Tuple[Tuple[str, object], ...]
    predicted_exponent: Fraction
    position_map: Tuple[Tuple[GeneratorIndex, GeneratorIndex], ...] = field(repr=False)

    @property
    def description(self) -> str:
        extra = " ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.kind} {self.source}->{self.target} {extra}".strip()

    def image(self, x: GroupElement) -> GroupElement:
        if x.dim != self.source.dim:
            raise InvalidArgument(f"expected an element of {self.source}, got dim {x.dim}")
        pm = dict(self.position_map)
        out = {}
        for p, v in x.entries.items():
            if p not in pm:
                raise NotInSubgroup(f"entry {p} is outside {self.source}")
            out[pm[p]] = v
        return GroupElement(self.target.dim, out)

    def preimage(self, y: GroupElement) -> GroupElement:
        if y.dim != self.target.dim:
            raise InvalidArgument(f"expected an element of {self.target}, got dim {y.dim}")
        back = {t: s for s, t in self.position_map}
        out = {}
        for p, v in y.entries.items():
            if p not in back:
                raise NotInSubgroup(f"entry {p} = {v} is not in the image")
            out[back[p]] = v
        return GroupElement(self.source.dim, out)

    def inner_estimate(self, x: GroupElement) -> float:
        return self.source.estimate(x)

    def outer_estimate(self, x: GroupElement) -> float:
        return self.target.estimate(self.image(x))

    def image_word(self, w: Word) -> Word:
        pm = dict(self.position_map)
        return Word((pm[g], e) for g, e in w)


def _check_position_map(pm: Dict[GeneratorIndex, GeneratorIndex]) -> None:
    if len(set(pm.values())) != len(pm):
        raise InvalidEmbedding("position map is not injective")


def _make(kind, source, target, params, exponent, pm) -> Embedding:
    _check_position_map(pm)
    pm = {GeneratorIndex(*s): GeneratorIndex(*t) for s, t in pm.items()}
    return Embedding(kind, source, target, tuple(params), Fraction(exponent), tuple(sorted(pm.items())))


def embed_heis_subset(k: int, l: int, K: Sequence[int]) -> Embedding:
    """H_k into H_l, sending a_t, b_t to a_{K[t]}, b_{K[t]} and c to c."""
    K = tuple(int(t) for t in K)
    if not 1 <= k <= l:
        raise InvalidEmbedding(f"need 1 <= k <= l, got k={k}, l={l}")
    if len(K) != k or len(set(K)) != k or not all(1 <= t <= l for t in K):
        raise InvalidEmbedding(f"K must be {k} distinct indices in 1..{l}, got {K}")
    pm = {(1, k + 2): (1, l + 2)}
    for t, s in enumerate(K, 1):
        pm[1, t + 1] = (1, s + 1)
        pm[t + 1, k + 2] = (s + 1, l + 2)
    return _make("heis-subset", GroupSpec("H", k), GroupSpec("H", l),
                 [("k", k), ("l", l), ("K", ",".join(map(str, K)))], 1, pm)


def embed_heis_in_T(k: int) -> Embedding:
    """The matrix inclusion of H_k in T_{k+2}."""
    if k < 1:
        raise InvalidEmbedding(f"need k >= 1, got {k}")
    pm = {g: g for g in heisenberg_generators(k)}
    return _make("heis-into-T", GroupSpec("H", k), GroupSpec("T", k + 2), [("k", k)], k, pm)


def embed_T_corner(k: int, l: int) -> Embedding:
    """T_k as the upper-left block of T_l."""
    if not 2 <= k <= l:
        raise InvalidEmbedding(f"need 2 <= k <= l, got k={k}, l={l}")
    pm = {p: p for p in _positions(k)}
    return _make("T-corner", GroupSpec("T", k), GroupSpec("T", l), [("k", k), ("l", l)], 1, pm)


def _block_map(k: int, l: int, a: int) -> Dict[Tuple[int, int], Tuple[int, int]]:
    shift = l - k
    pm = {}
    for i, j in _positions(k):
        if j <= a:
            pm[i, j] = (i, j)
        elif i > a:
            pm[i, j] = (i + shift, j + shift)
        else:
            pm[i, j] = (i, j + shift)
    return pm


def embed_T_block(k: int, l: int, a: int = 1) -> Embedding:
    """T_k in T_l with the diagonal blocks of sizes a and k-a pushed apart.

    The off-diagonal block moves right by l-k columns, so the entry
    ``(a, a+1)`` of span 1 lands at span ``l-k+1``.
    """
    if not 2 <= k < l:
        raise InvalidEmbedding(f"need 2 <= k < l, got k={k}, l={l}")
    if not 1 <= a <= k - 1:
        raise InvalidEmbedding(f"block split a must lie in 1..{k - 1}, got {a}")
    return _make("T-block", GroupSpec("T", k), GroupSpec("T", l),
                 [("k", k), ("l", l), ("a", a)], l - k + 1, _block_map(k, l, a))


def embed_composed(k: int, l: int, r: int, a: int = 1) -> Embedding:
    """T_k in T_l with distortion exponent r: a block step into T_{k+r-1}, then a corner."""
    if not 2 <= k <= l:
        raise InvalidEmbedding(f"need 2 <= k <= l, got k={k}, l={l}")
    if not isinstance(r, int) or not 1 <= r <= l - k + 1:
        raise InvalidEmbedding(f"r must be an integer in 1..{l - k + 1}, got {r!r}")
    if r == 1:
        pm = {p: p for p in _positions(k)}
    else:
        if not 1 <= a <= k - 1:
            raise InvalidEmbedding(f"block split a must lie in 1..{k - 1}, got {a}")
        pm = _block_map(k, k + r - 1, a)
    return _make("composed", GroupSpec("T", k), GroupSpec("T", l),
                 [("k", k), ("l", l), ("r", r), ("a", a)], r, pm)


def check_homomorphism(e: Embedding, pairs: int = 500, rng: Optional[random.Random] = None,
                       bound: int = 6) -> List[str]:
    """Problems found with ``e`` (an empty list means none).

    Checks that relator images evaluate to the identity, that products are
    preserved on random pairs, and that random elements survive a
    preimage round trip.
    """
    rng = rng or random.Random(0)
    problems = []
    src, tgt = e.source, e.target
    if not e.image(identity(src.dim)).is_identity():
        problems.append("identity not preserved")
    for name, w in src.relators():
        if not evaluate_word(e.image_word(w), tgt.dim).is_identity():
            problems.append(f"relator {name} not preserved")
    for _ in range(pairs):
        x, y = src.random(rng, bound), src.random(rng, bound)
        if e.image(x * y) != e.image(x) * e.image(y):
            problems.append(f"product not preserved for {x!r}, {y!r}")
            break
        if e.preimage(e.image(x)) != x:
            problems.append(f"preimage round trip failed for {x!r}")
            break
    return problems


def cyclic_exponent_T(x: GroupElement) -> int:
    """Distortion exponent of the cyclic subgroup generated by ``x`` in T_n.

    It is ``j - i`` for the smallest generator ``a_ij`` occurring in the
    normal form of ``x``.
    """
    nf = normal_form(x).nonzero()
    if not nf:
        raise InvalidArgument("the identity generates the trivial subgroup")
    smallest = None
    for g in nf:
        if smallest is None or generator_order(g, smallest) < 0:
            smallest = g
    return smallest[1] - smallest[0]


@dataclass(frozen=True)
class Sampler:
    """Random perturbations tried around each witness (``seed`` fixes them)."""

    perturbations: int = 16
    bound: int = 3
    seed: int = 0


@dataclass
class DistortionProfile:
    """``samples`` holds ``(n, max inner estimate)``, with None where nothing was feasible."""

    samples: List[Tuple[int, Optional[float]]]
    fitted_exponent: float
    description: str
    predicted_exponent: Optional[Fraction] = None

    def to_csv(self, dest: Union[str, os.PathLike, io.TextIOBase, None] = None) -> str:
        buf = io.StringIO()
        pred = "" if self.predicted_exponent is None else f"; predicted exponent {self.predicted_exponent}"
        buf.write(f"# {self.description}{pred}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "max_inner_estimate", "log_n", "log_max"])
        for n, v in self.samples:
            if v is None:
                w.writerow([n, "", f"{math.log(n):.12g}", ""])
            else:
                lv = f"{math.log(v):.12g}" if v > 0 else ""
                w.writerow([n, f"{v:.12g}", f"{math.log(n):.12g}", lv])
        text = buf.getvalue()
        if isinstance(dest, (str, os.PathLike)):
            with open(dest, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        elif dest is not None:
            dest.write(text)
        return text


def geometric_grid(n_max: int, start: int = 4) -> List[int]:
    if n_max < start:
        raise InvalidArgument(f"n_max must be at least {start}")
    out, n = [], start
    while n <= n_max:
        out.append(n)
        n *= 2
    return out


def fit_upper_half(samples: Sequence[Tuple[float, Optional[float]]]) -> float:
    pts = [(n, v) for n, v in samples if v is not None and v > 0]
    upper = pts[len(pts) // 2:]
    return log_log_slope([p[0] for p in upper], [p[1] for p in upper])


def _largest_feasible(family: Callable[[int], GroupElement], outer: Callable[[GroupElement], float],
                      n: float) -> int:
    """Largest m >= 0 with ``outer(family(m)) <= n``; outer is nondecreasing in m."""
    if outer(family(1)) > n:
        return 0
    lo, hi = 1, 2
    while outer(family(hi)) <= n:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if outer(family(mid)) <= n:
            lo = mid
        else:
            hi = mid
    return lo


def _profile_point(e: Embedding, n: int, sampler: Sampler) -> Optional[float]:
    rng = random.Random(sampler.seed * 1_000_003 + n)
    best = None
    tops = []
    for g in e.source.generators():
        for s in (1, -1):
            fam = (lambda m, g=g, s=s: GroupElement(e.source.dim, {g: s * m}))
            m = _largest_feasible(fam, e.outer_estimate, n)
            if m:
                x = fam(m)
                tops.append(x)
                v = e.inner_estimate(x)
                best = v if best is None or v > best else best
    for _ in range(sampler.perturbations if tops else 0):
        x = rng.choice(tops) * e.source.random(rng, sampler.bound)
        if e.outer_estimate(x) <= n:
            v = e.inner_estimate(x)
            best = v if best is None or v > best else best
    return best


def _assemble(grid, values, description, predicted) -> DistortionProfile:
    samples, running = [], None
    for n, v in zip(grid, values):
        # feasible sets grow with n, so the running maximum is still a lower bound for Delta(n)
        if v is not None and (running is None or v > running):
            running = v
        samples.append((n, running))
    return DistortionProfile(samples, fit_upper_half(samples), description, predicted)


def distortion_profile(e: Embedding, n_max: int, sampler: Optional[Sampler] = None,
                       workers: int = 1) -> DistortionProfile:
    """Estimate-level distortion of ``e`` on the grid 4, 8, ... up to ``n_max``."""
    sampler = sampler or Sampler()
    grid = geometric_grid(n_max)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(lambda n: _profile_point(e, n, sampler), grid))
    else:
        values = [_profile_point(e, n, sampler) for n in grid]
    return _assemble(grid, values, e.description, e.predicted_exponent)


def cyclic_profile(x: GroupElement, n_max: int, heisenberg_k: Optional[int] = None) -> DistortionProfile:
    """Distortion of ``<x>``: the largest ``|p|`` with ``E(x^p) <= n``, per grid point."""
    if x.is_identity():
        raise InvalidArgument("the identity generates the trivial subgroup")
    grid = geometric_grid(n_max)
    outer = lambda y: estimate_element(y, heisenberg_k).value  # noqa: E731
    values = []
    for n in grid:
        p = max(_largest_feasible(lambda m: x ** m, outer, n),
                _largest_feasible(lambda m: x ** -m, outer, n))
        values.append(float(p) if p else None)
    group = f"H_{heisenberg_k}" if heisenberg_k else f"T_{x.dim}"
    predicted = Fraction(cyclic_exponent_T(x)) if heisenberg_k is None else None
    return _assemble(grid, values, f"cyclic <{x!r}> in {group}", predicted)


def exact_profile(e: Embedding, target_radius: int, source_radius: int,
                  target_gens: Optional[Sequence] = None, source_gens: Optional[Sequence] = None,
                  budget: Optional[int] = None) -> DistortionProfile:
    """Distortion measured with exact word lengths on both sides.

    For ``n = 1..target_radius``, ``Delta(n)`` is the largest source length
    among preimages of target elements of length ``<= n``.  The profile stops
    at the first ``n`` whose preimages leave the source ball.  Generating
    sets default to the first diagonal on both sides (Heisenberg sources use
    ``a_i, b_i``).
    """
    if target_gens is None:
        target_gens = first_diagonal_generators(e.target.dim) if e.target.family == "T" else \
            heisenberg_generators(e.target.size)[:-1]
    if source_gens is None:
        source_gens = first_diagonal_generators(e.source.dim) if e.source.family == "T" else \
            heisenberg_generators(e.source.size)[:-1]
    tgt: BallTable = bfs_ball(e.target.dim, target_gens, target_radius, budget=budget)
    src: BallTable = bfs_ball(e.source.dim, source_gens, source_radius, budget=budget)
    best = [0] * (target_radius + 1)
    escaped = [False] * (target_radius + 1)
    back = {t: s for s, t in e.position_map}
    src_off = {p: q for q, p in enumerate(_positions(e.source.dim))}
    tgt_pos = _positions(e.target.dim)
    for v, n in tgt.lengths.items():
        entries = {}
        inside = True
        for q, val in enumerate(v):
            if val:
                p = tgt_pos[q]
                if p not in back:
                    inside = False
                    break
                entries[back[p]] = val
        if not inside:
            continue
        sv = [0] * len(src_off)
        for p, val in entries.items():
            sv[src_off[p]] = val
        inner = src.lengths.get(tuple(sv))
        if inner is None:
            escaped[n] = True
        elif inner > best[n]:
            best[n] = inner
    samples = []
    running = 0
    for n in range(1, target_radius + 1):
        if escaped[n]:
            break
        running = max(running, best[n])
        samples.append((n, float(running) if running else None))
    return DistortionProfile(samples, fit_upper_half(samples), f"exact {e.description}", e.predicted_exponent)
