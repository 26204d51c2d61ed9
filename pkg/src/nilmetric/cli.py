"""Command-line driver: ``nilmetric <subcommand> ...``.

Exit codes: 0 success, 2 bad input, 3 resource limit, 4 internal check failed.
Elements are JSON documents ``{"dim": 3, "entries": [[1, 3, 9]]}`` (inline or
``@path``); words are whitespace-separated tokens ``a[i,j]^e``, and with
``--heisenberg k`` also ``a_i``, ``b_i`` and ``c``.
"""
from __future__ import annotations

import argparse
import json
import random
import re
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from . import distortion as dist
from .collection import collect
from .core import (
    GeneratorIndex,
    GroupElement,
    Word,
    evaluate_word,
    heisenberg_generator,
    matrix_to_heisenberg,
    normal_form,
    random_word,
)
from .errors import NilMetricError, ResourceLimit
from .exact import bfs_ball, exact_length, first_diagonal_generators, full_generators, write_ball
from .quasimetric import calibrate, estimate_element, heisenberg_generators
from .synthesis import short_word, short_word_H

EXIT_OK, EXIT_INPUT, EXIT_LIMIT, EXIT_INTERNAL = 0, 2, 3, 4

_TOKEN = re.compile(r"^(?:a\[(\d+),(\d+)\]|([ab])_(\d+)|(c))(?:\^([+-]?\d+))?$")


class InputError(NilMetricError, ValueError):
    """Malformed command-line input."""


class InternalError(NilMetricError, RuntimeError):
    """A self-check of the tool failed."""


# ---------------------------------------------------------------- text formats

def parse_word(text: str, heisenberg_k: Optional[int] = None) -> Word:
    letters = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise InputError(f"cannot parse word token {tok!r}")
        i, j, name, idx, c, e = m.groups()
        if i is not None:
            g = GeneratorIndex(int(i), int(j))
        else:
            if heisenberg_k is None:
                raise InputError(f"token {tok!r} needs --heisenberg")
            g = heisenberg_generator(heisenberg_k, "c" if c else name, int(idx or 0))
        letters.append((g, int(e) if e is not None else 1))
    return Word(letters)


def _alias(g: GeneratorIndex, heisenberg_k: Optional[int]) -> str:
    if heisenberg_k is not None:
        k = heisenberg_k
        if g == (1, k + 2):
            return "c"
        if g.i == 1 and 2 <= g.j <= k + 1:
            return f"a_{g.j - 1}"
        if g.j == k + 2 and 2 <= g.i <= k + 1:
            return f"b_{g.i - 1}"
    return f"a[{g.i},{g.j}]"


def format_word(w: Word, heisenberg_k: Optional[int] = None) -> str:
    return " ".join(f"{_alias(l.gen, heisenberg_k)}^{l.exp}" for l in w)


def parse_element(text: str) -> GroupElement:
    """Read an element document given inline, as ``@path``, or as ``-`` for stdin."""
    if text == "-":
        text = sys.stdin.read()
    elif text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
        dim = doc["dim"]
        triples = doc.get("entries", [])
    except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"bad element document: {exc}") from None
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise InputError("element document needs an integer 'dim'")
    entries: Dict[Tuple[int, int], int] = {}
    for t in triples:
        if not (isinstance(t, list) and len(t) == 3 and all(type(v) is int for v in t)):
            raise InputError(f"entry {t!r} is not an [i, j, value] triple of integers")
        i, j, v = t
        if not 1 <= i < j <= dim:
            raise InputError(f"entry ({i},{j}) is not above the diagonal of a {dim}x{dim} matrix")
        if (i, j) in entries:
            raise InputError(f"duplicate entry ({i},{j})")
        entries[i, j] = v
    return GroupElement(dim, entries)


def format_element(x: GroupElement) -> str:
    triples = [[i, j, v] for (i, j), v in sorted(x.entries.items())]
    return json.dumps({"dim": x.dim, "entries": triples}, separators=(",", ":"))


def parse_gens(text: Optional[str], dim: int, heisenberg_k: Optional[int]) -> Tuple[GeneratorIndex, ...]:
    """``full``, ``diag`` (first diagonal; a_i, b_i for Heisenberg) or tokens like ``1,2 2,3``."""
    if text is None or text == "full":
        return heisenberg_generators(heisenberg_k) if heisenberg_k else full_generators(dim)
    if text == "diag":
        return heisenberg_generators(heisenberg_k)[:-1] if heisenberg_k else first_diagonal_generators(dim)
    gens = []
    for tok in text.replace(";", " ").split():
        parts = tok.split(",")
        if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
            raise InputError(f"cannot parse generator {tok!r}")
        gens.append(GeneratorIndex(int(parts[0]), int(parts[1])).check(dim))
    return tuple(gens)


# ---------------------------------------------------------------- helpers

def _dim_for(args) -> Optional[int]:
    if args.heisenberg is not None:
        if args.heisenberg < 1:
            raise InputError("--heisenberg needs k >= 1")
        if args.dim is not None and args.dim != args.heisenberg + 2:
            raise InputError(f"--dim {args.dim} disagrees with --heisenberg {args.heisenberg}")
        return args.heisenberg + 2
    return args.dim


def _read_input(args) -> GroupElement:
    """The element given positionally, by ``--element`` or by ``--word``."""
    if args.input is not None:
        if args.element is not None:
            raise InputError("element given twice")
        args.element = args.input
    if (args.element is None) == (args.word is None):
        raise InputError("give exactly one element document or --word")
    dim = _dim_for(args)
    if args.element is not None:
        x = parse_element(args.element)
        if dim is not None and x.dim != dim:
            raise InputError(f"element has dim {x.dim}, expected {dim}")
    else:
        w = parse_word(args.word, args.heisenberg)
        if dim is None:
            dim = max(2, w.max_index())
        for l in w:
            l.gen.check(dim)
        x = evaluate_word(w, dim)
    if args.heisenberg is not None:
        matrix_to_heisenberg(x, args.heisenberg)
    return x


def _heis_nf_word(x: GroupElement, k: int) -> Word:
    h = matrix_to_heisenberg(x, k)
    letters = [(heisenberg_generator(k, "c"), h.c_exp)]
    for t in range(k, 0, -1):
        letters.append((heisenberg_generator(k, "b", t), h.b_exps[t - 1]))
        letters.append((heisenberg_generator(k, "a", t), h.a_exps[t - 1]))
    return Word(letters)


def _fmt(v: float) -> str:
    return f"{v:.10g}"


# ---------------------------------------------------------------- subcommands

def cmd_nf(args, out) -> int:
    x = _read_input(args)
    k = args.heisenberg
    w = _heis_nf_word(x, k) if k is not None else normal_form(x).word()
    print(format_word(w, k), file=out)
    return EXIT_OK


def cmd_metric(args, out) -> int:
    x = _read_input(args)
    k = args.heisenberg
    est = estimate_element(x, k)
    print(f"E = {_fmt(est.value)}", file=out)
    for key, v in est.terms.items():
        name = key if isinstance(key, str) else _alias(key, None)
        print(f"  {name}: {_fmt(v)}", file=out)
    if args.exact_radius is not None:
        gens = parse_gens(args.gens, x.dim, k)
        table = bfs_ball(x.dim, gens, args.exact_radius, budget=args.budget)
        n = exact_length(x, table)
        if n is None:
            print(f"exact > {args.exact_radius}", file=out)
        else:
            print(f"exact = {n}", file=out)
            consts = calibrate(table=table, heisenberg_k=k).constants
            ok = consts.holds(est.value, n)
            print(f"sandwich C={_fmt(consts.C)} D={_fmt(consts.D)}: {'holds' if ok else 'FAILS'}", file=out)
            if not ok:
                raise InternalError("calibrated constants do not cover an element of their own ball")
    return EXIT_OK


def cmd_collect(args, out) -> int:
    if args.random_length is not None:
        if args.dim is None:
            raise InputError("--random-length needs --dim")
        w = random_word(args.dim, args.random_length, random.Random(args.seed))
        dim = args.dim
        print(f"word {format_word(w)}".rstrip(), file=out)
    else:
        if args.word is None:
            raise InputError("give --word or --random-length")
        w = parse_word(args.word, args.heisenberg)
        dim = _dim_for(args) or max(2, w.max_index())
        for l in w:
            l.gen.check(dim)
    tr = collect(w, dim)
    if tr.result.to_element() != evaluate_word(w, dim):
        raise InternalError("collection disagrees with matrix evaluation")
    print(f"nf {format_word(tr.result.word())}".rstrip(), file=out)
    print(f"length {tr.input_length}", file=out)
    print(f"swaps {tr.swap_count}", file=out)
    for g, c in sorted(tr.max_counts.items()):
        if c:
            print(f"peak {_alias(g, None)} {c}", file=out)
    return EXIT_OK


def cmd_shortword(args, out) -> int:
    x = _read_input(args)
    k = args.heisenberg
    if k is not None:
        w = short_word_H(matrix_to_heisenberg(x, k))
    else:
        w = short_word(x)
    est = estimate_element(x, k)
    print(f"word {format_word(w, k)}".rstrip(), file=out)
    print(f"length {w.length}", file=out)
    print(f"E = {_fmt(est.value)}", file=out)
    if evaluate_word(w, x.dim) != x:
        print("verification FAILED", file=out)
        raise InternalError("synthesised word does not evaluate to the input")
    print("VERIFIED", file=out)
    return EXIT_OK


def cmd_calibrate(args, out) -> int:
    k = args.heisenberg
    dim = _dim_for(args)
    if dim is None:
        raise InputError("give --dim or --heisenberg")
    gens = parse_gens(args.gens, dim, k)
    rep = calibrate(dim, gens, args.radius, heisenberg_k=k, budget=args.budget)
    print(f"ball radius {rep.radius}, {rep.ball_size} elements", file=out)
    print("D\tC\tlower_witness\tupper_witness", file=out)
    for row in rep.rows:
        lw = format_element(row.lower_witness) if row.lower_witness is not None else "-"
        uw = format_element(row.upper_witness) if row.upper_witness is not None else "-"
        print(f"{_fmt(row.D)}\t{_fmt(row.C)}\t{lw}\t{uw}", file=out)
    best = rep.constants
    print(f"best C={_fmt(best.C)} D={_fmt(best.D)}", file=out)
    return EXIT_OK


_EMBEDDINGS = {
    "heis-subset": lambda a: dist.embed_heis_subset(a.k, a.l, _parse_K(a.K, a.k)),
    "heis-in-T": lambda a: dist.embed_heis_in_T(a.k),
    "corner": lambda a: dist.embed_T_corner(a.k, a.l),
    "block": lambda a: dist.embed_T_block(a.k, a.l, a.a),
    "composed": lambda a: dist.embed_composed(a.k, a.l, a.r, a.a),
}


def _parse_K(text: Optional[str], k: int) -> List[int]:
    if text is None:
        return list(range(1, k + 1))
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise InputError(f"cannot parse --K {text!r}") from None


def cmd_distort(args, out) -> int:
    needed = {"heis-subset": ("k", "l"), "heis-in-T": ("k",), "corner": ("k", "l"),
              "block": ("k", "l"), "composed": ("k", "l", "r")}[args.embedding]
    missing = [f"--{n}" for n in needed if getattr(args, n) is None]
    if missing:
        raise InputError(f"{args.embedding} needs {' '.join(missing)}")
    e = _EMBEDDINGS[args.embedding](args)
    sampler = dist.Sampler(perturbations=args.perturbations, seed=args.seed)
    prof = dist.distortion_profile(e, args.nmax, sampler)
    print(e.description, file=out)
    print("n\tmax_inner_estimate", file=out)
    for n, v in prof.samples:
        print(f"{n}\t{'-' if v is None else _fmt(v)}", file=out)
    print(f"fitted exponent {prof.fitted_exponent:.4f}", file=out)
    print(f"predicted exponent {e.predicted_exponent}", file=out)
    if args.csv:
        prof.to_csv(args.csv)
    return EXIT_OK


def cmd_ball(args, out) -> int:
    k = args.heisenberg
    dim = _dim_for(args)
    if dim is None:
        raise InputError("give --dim or --heisenberg")
    gens = parse_gens(args.gens, dim, k)
    table = bfs_ball(dim, gens, args.radius, budget=args.budget)
    print(f"{len(table)} elements within radius {table.radius}", file=out)
    print("spheres " + " ".join(map(str, table.sphere_sizes)), file=out)
    if args.out:
        write_ball(table, args.out)
        print(f"wrote {args.out}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------- argument parsing

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nilmetric", description="Word metrics and distortion in T_n and H_k.")
    p.add_argument("--seed", type=int, default=0, help="seed for every random sampler")
    sub = p.add_subparsers(dest="command", required=True)
    seed_parent = argparse.ArgumentParser(add_help=False)
    seed_parent.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    def group_opts(sp, inputs=True):
        sp.add_argument("--dim", type=int)
        sp.add_argument("--heisenberg", type=int, metavar="K", help="work in H_K inside T_{K+2}")
        if inputs:
            sp.add_argument("input", nargs="?", help="JSON element document, @file, or - for stdin")
            sp.add_argument("--element", help="same as the positional input")
            sp.add_argument("--word", help="word such as 'a[1,2]^3 a[2,3]^-1'")

    def budget_opt(sp):
        sp.add_argument("--budget", type=int, default=None, help="BFS element cap (default $NILMETRIC_BUDGET)")

    sp = sub.add_parser(parents=[seed_parent], name="nf", help="print the normal form")
    group_opts(sp)
    sp.set_defaults(func=cmd_nf)

    sp = sub.add_parser(parents=[seed_parent], name="metric", help="metric estimate, optionally with the exact length")
    group_opts(sp)
    sp.add_argument("--exact-radius", type=int)
    sp.add_argument("--gens", help="full, diag, or list like '1,2 2,3'")
    budget_opt(sp)
    sp.set_defaults(func=cmd_metric)

    sp = sub.add_parser(parents=[seed_parent], name="collect", help="collect a word into normal form")
    group_opts(sp, inputs=False)
    sp.add_argument("--word")
    sp.add_argument("--random-length", type=int, metavar="L", help="collect a random word of length L")
    sp.set_defaults(func=cmd_collect)

    sp = sub.add_parser(parents=[seed_parent], name="shortword", help="short word for an element, checked by evaluation")
    group_opts(sp)
    sp.set_defaults(func=cmd_shortword)

    sp = sub.add_parser(parents=[seed_parent], name="calibrate", help="quasi-metric constants on an exact ball")
    group_opts(sp, inputs=False)
    sp.add_argument("--gens")
    sp.add_argument("--radius", type=int, required=True)
    budget_opt(sp)
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser(parents=[seed_parent], name="distort", help="empirical distortion profile of an embedding")
    sp.add_argument("--embedding", required=True, choices=sorted(_EMBEDDINGS))
    for name in ("k", "l", "r"):
        sp.add_argument(f"--{name}", type=int)
    sp.add_argument("--a", type=int, default=1, help="block split")
    sp.add_argument("--K", help="comma-separated index subset for heis-subset")
    sp.add_argument("--nmax", type=int, default=4096)
    sp.add_argument("--perturbations", type=int, default=16)
    sp.add_argument("--csv")
    sp.set_defaults(func=cmd_distort)

    sp = sub.add_parser(parents=[seed_parent], name="ball", help="compute and export an exact ball")
    group_opts(sp, inputs=False)
    sp.add_argument("--gens")
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--out", help="write a NILBALL1 file")
    budget_opt(sp)
    sp.set_defaults(func=cmd_ball)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args, out)
    except ResourceLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # anything else is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
