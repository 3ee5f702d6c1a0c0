"""Command-line interface.

Exit status: 0 success, 1 mathematical negative (no mate, not certified,
invalid set), 2 usage or input error, 3 search budget exhausted. Verdicts
and results go to standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

import numpy as np

from . import balance, constructions, exact_search, polytope, relations, tower
from .algebra_rank import hrs_bound, indicator_family, verify_independence
from .core import (MofsSet, SquareError, TypeMismatch, format_square, load_any,
                   set_to_json, validate_mofs)

OK, NEGATIVE, USAGE, BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> MofsSet:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return load_any(text)


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _diag(msg: str) -> None:
    print(msg, file=sys.stderr)


def _budget(args) -> exact_search.SearchBudget:
    return exact_search.SearchBudget(node_limit=args.node_limit, time_limit=args.time_limit,
                                     shards=max(1, args.threads))


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _matrix(text: str) -> np.ndarray:
    rows = [_int_list(r) for r in text.split(";") if r.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise UsageError("matrix rows must be ';'-separated with equal lengths")
    return np.array(rows, dtype=np.int64)


# --- subcommands ---------------------------------------------------------

def cmd_construct(args) -> int:
    kind = args.kind
    if kind == "complete":
        if args.q is None or args.h is None:
            raise UsageError("construct complete needs --q and --h")
        mofs = constructions.complete_mofs_prime_power(args.q, args.h)
        _diag(f"built {mofs.k}-MOFS({mofs.n};{mofs.lam})")
        _emit(set_to_json(mofs), args.output)
        return OK
    if kind == "lift":
        if args.matrix is None or args.d is None:
            raise UsageError("construct lift needs --matrix and --d")
        _emit(format_square(constructions.lift_blocks(_matrix(args.matrix), args.d)), args.output)
        return OK
    if args.input is None or args.d is None:
        raise UsageError(f"construct {kind} needs -i and --d")
    base = _read(args.input)
    dilated = constructions.dilate(base, args.d)
    if kind == "dilate":
        cert = constructions.dilation_certificate(base, args.d)
        _diag(f"certificate: {cert.verdict.value} ({cert.reason})")
        _emit(set_to_json(dilated), args.output)
        return OK
    ext = constructions.circulant_extension(dilated, args.d)
    _diag(f"extended {dilated.k}-MOFS({dilated.n};{dilated.lam}) by one square")
    _emit(set_to_json(dilated.with_square(ext)), args.output)
    return OK


def cmd_verify(args) -> int:
    mofs = _read(args.input)
    report = validate_mofs(mofs)
    for line in report.lines():
        _diag(line)
    if report.ok:
        print(f"VALID {mofs.k}-MOFS({mofs.n};{mofs.lam})")
        return OK
    print(f"INVALID ({len(report.square_errors)} square errors, "
          f"{len(report.pair_failures)} non-orthogonal pairs)")
    return NEGATIVE


def cmd_mate(args) -> int:
    mofs = _read(args.input)
    if args.method == "exact":
        res = exact_search.find_mate(mofs, _budget(args))
        _diag(f"{res.status.value} after {res.nodes} nodes {res.reason}".rstrip())
        if res.status is exact_search.Status.FOUND:
            _emit(format_square(res.witness), args.output)
            return OK
        print("NO MATE" if res.status is exact_search.Status.NONE_EXISTS else "UNDECIDED")
        return NEGATIVE if res.status is exact_search.Status.NONE_EXISTS else BUDGET
    if args.method == "balance":
        if mofs.k != 2 or mofs.m != 2:
            raise UsageError("balance method needs exactly two binary squares")
        try:
            F = balance.find_binary_mate(mofs[0], mofs[1], _budget(args))
        except (balance.PartitionNotFound, balance.NotGuaranteed) as exc:
            _diag(str(exc))
            print("NO MATE FOUND")
            return NEGATIVE
        _emit(format_square(F), args.output)
        return OK
    try:
        F = tower.tower_mate(list(mofs))
    except tower.TowerError as exc:
        raise UsageError(str(exc)) from None
    _emit(format_square(F), args.output)
    return OK


def cmd_certify(args) -> int:
    mofs = _read(args.input)
    if args.method == "search":
        verdict = exact_search.is_maximal(mofs, _budget(args))
        if verdict is None:
            print("UNDECIDED (budget exhausted)")
            return BUDGET
        print("MAXIMAL (exhaustive)" if verdict else "NOT MAXIMAL (mate exists)")
        return OK if verdict else NEGATIVE
    if args.method == "relation":
        res = relations.find_jp_relations(mofs, limit=1)
        odd = (mofs.n // mofs.m) % 2 == 1
        if res.relations:
            _diag(f"relation: {res.relations[0]}")
        if res.relations and odd:
            print("MAXIMAL (relation)")
            return OK
        why = "frequency is even" if res.relations else (
            "search truncated" if res.truncated else "no Jedwab-Popatia relation")
        print(f"NOT CERTIFIED ({why})")
        return BUDGET if res.truncated and not res.relations else NEGATIVE
    if args.method == "dilation":
        if args.d is None:
            raise UsageError("certify-max --method dilation needs --d")
        cert = constructions.dilation_certificate(mofs, args.d)
        print(f"{cert.verdict.value}: {cert.reason}")
        good = cert.verdict in (constructions.Verdict.MAXIMAL_BY_COMPLETENESS,
                                constructions.Verdict.MAXIMAL_BY_RELATION)
        return OK if good else NEGATIVE
    bound = hrs_bound(mofs.n, mofs.m)
    if bound.integral and mofs.k == bound.value and validate_mofs(mofs).ok:
        print(f"MAXIMAL (complete, {mofs.k} squares meet the bound)")
        return OK
    print(f"NOT CERTIFIED ({mofs.k} squares, bound {bound.value})")
    return NEGATIVE


def cmd_bound(args) -> int:
    mofs = _read(args.input)
    res = verify_independence(indicator_family(mofs))
    bound = hrs_bound(mofs.n, mofs.m)
    print(f"rank {res.rank} of {res.size} vectors"
          + (" (independent)" if res.independent else " (dependent)"))
    print(f"{mofs.k} squares, bound {bound.value}")
    return OK if res.independent and mofs.k <= bound.value else NEGATIVE


def cmd_classify(args) -> int:
    mofs = _read(args.input)
    if mofs.k < 2 or mofs.m != 2:
        raise UsageError("classify-pair needs two binary squares")
    pair = (mofs[args.squares[0]], mofs[args.squares[1]])
    prof = balance.pair_profile(pair, args.r1, args.r2)
    lines = [f"rows {args.r1},{args.r2}: psi = {prof.psi1}, {prof.psi2}",
             "A' =", *("  " + " ".join(map(str, r)) for r in prof.Aprime),
             "A =", *("  " + " ".join(map(str, r)) for r in prof.A)]
    label = balance.classify_exception(prof.A, mofs.n)
    lines.append(f"exception: {label or 'none'}")
    w = balance.find_balancer(prof.A, prof.m, 0, 0)
    lines.append("balanceable: " + ("yes" if w else "no"))
    if w:
        lines.append("B =")
        lines.extend("  " + " ".join(map(str, r)) for r in w.B)
    shifts = sorted(balance.achievable_shifts(prof.A, prof.m, radius=1))
    lines.append("shifts: " + " ".join(f"({p},{q})" for p, q in shifts))
    print("\n".join(lines))
    return OK


def cmd_relations(args) -> int:
    mofs = _read(args.input)
    if args.jp:
        res = relations.find_jp_relations(mofs, limit=args.limit)
        for rel in res.relations:
            print(rel)
        _diag(f"{len(res.relations)} relations, states {res.states_visited}"
              + (", truncated" if res.truncated else ""))
        if res.truncated and not res.relations:
            return BUDGET
        return OK if res.relations else NEGATIVE
    space = relations.relation_space(mofs)
    print(f"dimension {space.dimension}")
    for rel in space.relations()[: args.limit]:
        print(rel)
    return OK


def cmd_decompose(args) -> int:
    x = _int_list(args.x)
    try:
        pieces = polytope.decompose(x, args.m, args.beta)
    except polytope.DecompositionError as exc:
        raise UsageError(str(exc)) from None
    for p in pieces:
        print(",".join(map(str, p)))
    return OK


def cmd_census(args) -> int:
    n, m = args.n, args.m
    count = exact_search.count_squares(n, m)
    print(f"squares of type ({n};{n // m}): {count}")
    if args.bachelor:
        res = exact_search.find_bachelor(n, _budget(args))
        if res.status is exact_search.Status.FOUND:
            print(f"bachelor found after {res.candidates_checked} normalized candidates")
            sys.stdout.write(format_square(res.square))
        elif res.status is exact_search.Status.NONE_EXISTS:
            print(f"no bachelor among {res.candidates_checked} normalized squares")
        else:
            print("UNDECIDED (budget exhausted)")
            return BUDGET
    if args.samples:
        from .sampling import random_binary_square
        rng = np.random.default_rng(args.seed)
        mated = 0
        for _ in range(args.samples):
            F = random_binary_square(n, rng)
            res = exact_search.find_mate(MofsSet([F]), _budget(args))
            mated += res.status is exact_search.Status.FOUND
        print(f"random squares with a mate: {mated}/{args.samples} (seed {args.seed})")
    return OK


# --- parser --------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, suppress) -> None:
    """Budget flags, accepted both before and after the subcommand."""
    env_nodes = os.environ.get("MOFS_NODE_LIMIT")
    nodes = int(env_nodes) if env_nodes else exact_search.DEFAULT_NODE_LIMIT

    def d(value):
        return suppress if suppress is not None else value

    p.add_argument("--threads", type=int, default=d(1),
                   help="worker processes for exhaustive search (default 1)")
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomized steps (default 0)")
    p.add_argument("--node-limit", type=int, default=d(nodes),
                   help="search node budget (default from MOFS_NODE_LIMIT)")
    p.add_argument("--time-limit", type=float, default=d(None),
                   help="search time budget in seconds")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mofs",
        description="Construct, verify, extend and certify sets of mutually orthogonal "
                    "frequency squares.",
        epilog="Exit status: 0 success, 1 negative result, 2 usage error, 3 budget exhausted. "
               "MOFS_NODE_LIMIT sets the default search node budget.")
    _add_common(p, None)
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common, argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def io(sp, need_input=True):
        if need_input:
            sp.add_argument("-i", "--input", required=True,
                            help="set JSON, square text or join text ('-' for stdin)")
        sp.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    c = sub.add_parser("construct", parents=[common],
                        help="build complete, dilated, lifted or extended sets")
    c.add_argument("kind", choices=["complete", "dilate", "lift", "circulant-extension"])
    c.add_argument("-i", "--input", default=None)
    c.add_argument("-o", "--output", default=None)
    c.add_argument("--q", type=int)
    c.add_argument("--h", type=int)
    c.add_argument("--d", type=int)
    c.add_argument("--matrix", help="lift input as 'a,b;c,d'")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", parents=[common],
                        help="check squares and pairwise orthogonality")
    io(v)
    v.set_defaults(func=cmd_verify)

    mt = sub.add_parser("mate", parents=[common],
                        help="find a square orthogonal to every input square")
    io(mt)
    mt.add_argument("--method", choices=["exact", "balance", "tower"], default="exact")
    mt.set_defaults(func=cmd_mate)

    cm = sub.add_parser("certify-max", parents=[common],
                        help="certify that a set has no orthogonal extension")
    io(cm)
    cm.add_argument("--method", choices=["search", "relation", "dilation", "bound"],
                    default="search")
    cm.add_argument("--d", type=int, help="dilation factor for --method dilation")
    cm.set_defaults(func=cmd_certify)

    cb = sub.add_parser("certify-bound", parents=[common],
                        help="rank of the indicator family against the size bound")
    io(cb)
    cb.set_defaults(func=cmd_bound)

    cp = sub.add_parser("classify-pair", parents=[common],
                        help="count matrices and balance data of a row pair")
    io(cp)
    cp.add_argument("--r1", type=int, required=True)
    cp.add_argument("--r2", type=int, required=True)
    cp.add_argument("--squares", type=int, nargs=2, default=[0, 1])
    cp.set_defaults(func=cmd_classify)

    rl = sub.add_parser("relations", parents=[common],
                        help="GF(2) relation space or Jedwab-Popatia relations")
    io(rl)
    rl.add_argument("--jp", action="store_true")
    rl.add_argument("--limit", type=int, default=None)
    rl.set_defaults(func=cmd_relations)

    dp = sub.add_parser("decompose-polytope", parents=[common],
                        help="split an integer point into P(f(m)) points")
    dp.add_argument("--m", type=int, required=True)
    dp.add_argument("--beta", type=int, required=True)
    dp.add_argument("--x", required=True, help="comma-separated coordinates x_0..x_2m")
    dp.set_defaults(func=cmd_decompose)

    cs = sub.add_parser("census", parents=[common],
                        help="small-order survey of squares")
    cs.add_argument("--n", type=int, required=True)
    cs.add_argument("--m", type=int, default=2)
    cs.add_argument("--bachelor", action="store_true", help="search for a square with no mate")
    cs.add_argument("--samples", type=int, default=0, help="random squares to test for mates")
    cs.set_defaults(func=cmd_census)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SquareError, TypeMismatch, constructions.ConstructionError,
            ValueError) as exc:
        _diag(f"error: {exc}")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
