"""Batch command-line driver.

Commands: enumerate, verify, om, flag, sample, embed, homology.
Exit codes: 0 success, 1 property failure, 2 resource limit, 3 parse
error, 4 math error (rank/containment/coatom).
"""

from __future__ import annotations

import argparse
import gzip
import json
import sys
from fractions import Fraction

from . import flags as fl
from . import homology as hm
from . import macphersonian as mp
from . import omcore as om
from . import posets as ps
from . import verify as vf
from .errors import (
    BudgetExceeded,
    EmptyBelowSet,
    InvalidFlag,
    LimitExceeded,
    MacpError,
    NonUniqueMax,
    NotACoatom,
    NotContained,
    RankDeficient,
)

EXIT_FAIL, EXIT_LIMIT, EXIT_PARSE, EXIT_MATH = 1, 2, 3, 4


class CliParseError(Exception):
    pass


def _rational(v) -> Fraction:
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError as exc:
            raise CliParseError(f"bad rational {v!r}") from exc
    raise CliParseError(f"rationals must be ints or 'p/q' strings, got {v!r}")


def _parse_matrix(text: str, rows: int):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliParseError(f"bad JSON matrix: {exc}") from exc
    if rows == 1:
        if not isinstance(data, list) or not data:
            raise CliParseError("expected a JSON array")
        return tuple(_rational(v) for v in data)
    if not isinstance(data, list) or len(data) != rows:
        raise CliParseError(f"expected {rows} rows")
    out = tuple(tuple(_rational(v) for v in row) for row in data)
    if len({len(r) for r in out}) != 1:
        raise CliParseError("ragged matrix")
    return out


def _fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fmt_matrix(matrix) -> list:
    return [[_fmt_fraction(v) for v in row] for row in matrix]


def _emit(args, payload: dict):
    text = (
        json.dumps(payload, indent=2, sort_keys=True)
        if args.format == "json"
        else "\n".join(f"{k}: {payload[k]}" for k in sorted(payload))
    )
    if getattr(args, "out", None):
        opener = gzip.open if args.out.endswith(".gz") else open
        with opener(args.out, "wt") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_text(value: str) -> str:
    if value.startswith("@"):
        with open(value[1:]) as fh:
            return fh.read().strip()
    return value


def cmd_enumerate(args) -> int:
    if args.flags:
        fp = vf.macp12(args.n)
        body = fp.to_poset().to_json()
        ranks = fp.rank
    else:
        poset = vf.macp2(args.n)
        body = poset.to_poset().to_json()
        ranks = poset.h
    fvec = [0] * (max(ranks, default=0) + 1)
    for r in ranks:
        fvec[r] += 1
    payload = {
        "n": args.n,
        "kind": "macp12" if args.flags else "macp2",
        "count": len(ranks),
        "f_vector": fvec,
        **body,
    }
    _emit(args, payload)
    return 0


def cmd_verify(args) -> int:
    report = vf.run_suite(
        args.suite, args.n, seed=args.seed, budget=args.budget, threads=args.threads
    )
    _emit(args, report)
    return 0 if report["pass"] else EXIT_FAIL


def cmd_om(args) -> int:
    matrix = _parse_matrix(_load_text(args.matrix), 2)
    result = om.mu(matrix)
    _emit(args, {"om": result.key, "h": result.h})
    return 0


def cmd_flag(args) -> int:
    y = _parse_matrix(_load_text(args.y), 1)
    x = _parse_matrix(_load_text(args.x), 2)
    f = fl.nu(y, x)
    _emit(args, {"flag": f.key, "rank": fl.flag_rank(f)})
    return 0


def cmd_sample(args) -> int:
    if args.om:
        m = om.Rank2OM.from_string(_load_text(args.om))
        mats = mp.sample_cell(m, args.count, args.seed)
        for mat in mats:
            if om.mu(mat) != m:
                raise AssertionError("sample round trip failed")
        payload = {"om": m.key, "matrices": [_fmt_matrix(x) for x in mats]}
    else:
        f = fl.FlagOM.from_string(_load_text(args.flag))
        pairs = fl.sample_flag_cell(f, args.count, args.seed)
        for y, x in pairs:
            if fl.nu(y, x) != f:
                raise AssertionError("flag sample round trip failed")
        payload = {
            "flag": f.key,
            "samples": [
                {"y": [_fmt_fraction(v) for v in y], "x": _fmt_matrix(x)}
                for y, x in pairs
            ],
        }
    _emit(args, payload)
    return 0


def cmd_embed(args) -> int:
    f = fl.FlagOM.from_string(_load_text(args.flag))
    image = fl.iota_embed(f)
    _emit(args, {"flag": f.key, "iota": image.key})
    return 0


def cmd_homology(args) -> int:
    with open(args.complex) as fh:
        data = json.load(fh)
    if isinstance(data, dict) and "hasse" in data:
        poset = ps.Poset(
            list(range(len(data["elements"]))),
            _up_from_hasse(len(data["elements"]), data["hasse"]),
        )
        complex_ = ps.order_complex(poset)
    else:
        faces = [tuple(f) for f in data]
        verts = sorted({v for f in faces for v in f})
        complex_ = ps.SimplicialComplex.from_faces(verts, faces)
    _emit(args, hm.homology_report(complex_, args.sphere_dim))
    return 0


def _up_from_hasse(m: int, hasse) -> list:
    up = [1 << i for i in range(m)]
    children = [[] for _ in range(m)]
    for i, j in hasse:
        children[i].append(j)
    changed = True
    while changed:
        changed = False
        for i in range(m):
            row = up[i]
            for j in children[i]:
                row |= up[j]
            if row != up[i]:
                up[i] = row
                changed = True
    return up


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="macp", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--out", help="write the report to a file (.gz supported)")

    p = sub.add_parser("enumerate", help="write a MacP poset as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--flags", action="store_true", help="enumerate MacP(1,2,n)")
    common(p)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("verify", help="run an exhaustive property suite")
    p.add_argument("suite", choices=vf.SUITES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**6)
    p.add_argument("--threads", type=int, default=1)
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("om", help="oriented matroid of a 2 x n rational matrix")
    p.add_argument("--matrix", required=True, help="JSON rows, entries int or 'p/q'")
    common(p)
    p.set_defaults(fn=cmd_om)

    p = sub.add_parser("flag", help="flag of a (row, matrix) pair")
    p.add_argument("--y", required=True)
    p.add_argument("--x", required=True)
    common(p)
    p.set_defaults(fn=cmd_flag)

    p = sub.add_parser("sample", help="sample open cells, round-trip verified")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--om", help="OM text format or @file")
    g.add_argument("--flag", help="flag text format or @file")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("embed", help="embed a flag into MacP(2, n+1)")
    p.add_argument("--flag", required=True)
    common(p)
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("homology", help="GF(2) homology of a complex or poset file")
    p.add_argument("--complex", required=True)
    p.add_argument("--sphere-dim", type=int, default=None)
    common(p)
    p.set_defaults(fn=cmd_homology)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (LimitExceeded, BudgetExceeded) as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (CliParseError, ValueError) as exc:
        print(f"parse: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (
        RankDeficient,
        NotContained,
        NotACoatom,
        InvalidFlag,
        EmptyBelowSet,
        NonUniqueMax,
    ) as exc:
        print(f"math: {exc}", file=sys.stderr)
        return EXIT_MATH
    except MacpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
