"""Command-line front end.

Exit codes: 0 success, 1 a check or verification failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .algebra import (
    LieAlgebra,
    MalformedAlgebraError,
    derived_series,
    is_nilpotent,
    is_solvable,
    jacobi_violation,
    lower_central_series,
    nilindex,
)
from .automorphisms import AutomorphismShape, automorphism_violation
from .derivations import derivation_space
from .families import (
    FAMILY_2M3,
    ExtensionSpec,
    FamilyParameterError,
    FamilyParams,
    build_family,
    build_Q,
)
from .linalg import format_scalar, parse_scalar
from .verify import SUITES, fingerprint, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def max_m() -> int:
    raw = os.environ.get("LIEKIT_MAX_M", "6")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"LIEKIT_MAX_M must be an integer, got {raw!r}") from None


def check_m(m: int) -> int:
    if m < 2:
        raise InputError(f"m must be >= 2, got {m}")
    if m > max_m():
        raise InputError(f"m = {m} exceeds LIEKIT_MAX_M = {max_m()}")
    return m


def rational(text: str) -> Fraction:
    try:
        return parse_scalar(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def keyed_rational(text: str) -> tuple[int, Fraction]:
    key, sep, val = text.partition("=")
    if not sep or not key.strip().isdigit():
        raise argparse.ArgumentTypeError(f"expected K=VALUE with integer K, got {text!r}")
    return int(key), rational(val)


def m_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        a, b = int(lo), int(hi if sep else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if a > b:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return range(a, b + 1)


def write_json(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def load_json(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedAlgebraError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None


def load_algebra(path: str) -> tuple[LieAlgebra, ExtensionSpec | None]:
    obj = load_json(path)
    g = LieAlgebra.from_json_obj(obj)
    spec = ExtensionSpec.from_json_obj(obj) if isinstance(obj, dict) and "H" in obj else None
    return g, spec


FAMILY_NAMES = {"q": "q", "g2m3": FAMILY_2M3, **{f"g{k}": k for k in range(1, 8)}}


def cmd_construct(args) -> int:
    m = check_m(args.m)
    fam = FAMILY_NAMES[args.family]
    if fam == "q":
        if any(v is not None for v in (args.beta, args.mu, args.nu, args.gamma)) or args.d:
            raise InputError("Q takes no family parameters")
        g = build_Q(m)
        obj = g.to_json_obj()
    else:
        try:
            params = FamilyParams(
                fam, m, beta=args.beta,
                mu=args.mu if args.mu is not None else 0,
                nu=args.nu if args.nu is not None else 0,
                d=dict(args.d or []),
                gamma=args.gamma if args.gamma is not None else 0,
            )
        except FamilyParameterError as exc:
            raise InputError(str(exc)) from None
        issue = params.normal_form_issue()
        if issue:
            raise InputError(issue)
        if args.nu is not None and fam not in (2, 3, 4):
            raise InputError(f"family {fam} has no nu parameter")
        build = build_family(params)
        g = build.algebra
        obj = build.spec.to_json_obj()
    write_json(obj, args.output)
    print(f"dim {g.dim}, brackets {g.bracket_count()}", file=sys.stderr if not args.output else sys.stdout)
    return EXIT_OK


def cmd_check(args) -> int:
    g, _ = load_algebra(args.file)
    if args.what == "jacobi":
        bad = jacobi_violation(g)
        ok = bad is None
        detail = "" if ok else f" (J({', '.join(g.names[i - 1] for i in bad)}) != 0)"
    elif args.what == "solvable":
        ok = is_solvable(g)
        detail = f" (derived dims {[S.dim for S in derived_series(g)]})"
    else:
        ok = is_nilpotent(g)
        detail = f" (lower central dims {[S.dim for S in lower_central_series(g)]})"
    print(f"{args.what}: {'pass' if ok else 'fail'}{detail}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_derivations(args) -> int:
    g, _ = load_algebra(args.file)
    write_json(derivation_space(g).to_json_obj(), args.output)
    return EXIT_OK


def cmd_series(args) -> int:
    g, _ = load_algebra(args.file)
    ds, lcs = derived_series(g), lower_central_series(g)
    obj = {
        "derived_dims": [S.dim for S in ds],
        "lcs_dims": [S.dim for S in lcs],
        "solvable": ds[-1].dim == 0,
        "nilpotent": lcs[-1].dim == 0,
        "nilindex": nilindex(g),
        "derived_series": [S.to_json() for S in ds],
        "lower_central_series": [S.to_json() for S in lcs],
    }
    write_json(obj, args.output)
    return EXIT_OK


def cmd_automorph(args) -> int:
    if args.matrix:
        if not args.algebra:
            raise InputError("--matrix needs --algebra")
        g, _ = load_algebra(args.algebra)
        rows = load_json(args.matrix)
        try:
            A = tuple(tuple(parse_scalar(v) for v in r) for r in rows)
        except (TypeError, ValueError) as exc:
            raise MalformedAlgebraError(f"bad matrix: {exc}", "$") from None
        if len(A) != g.dim or any(len(r) != g.dim for r in A):
            raise InputError(f"matrix must be {g.dim}x{g.dim}")
    else:
        if args.m is None or args.p is None or args.q is None:
            raise InputError("give --m, --p and --q, or --matrix with --algebra")
        m = check_m(args.m)
        try:
            A = AutomorphismShape(m, args.p, args.q, dict(args.a1 or []), dict(args.a2 or [])).realize()
        except ValueError as exc:
            raise InputError(str(exc)) from None
        g = build_Q(m)
    bad = automorphism_violation(g, A)
    obj = {
        "matrix": [[format_scalar(v) for v in r] for r in A],
        "p": format_scalar(A[0][0]),
        "q": format_scalar(A[1][1]) if g.dim > 1 else None,
        "is_automorphism": bad is None,
        "violation": bad if bad in (None, "singular") else [g.names[i - 1] for i in bad],
    }
    write_json(obj, args.output)
    return EXIT_OK if bad is None else EXIT_FAIL


def cmd_verify(args) -> int:
    for m in args.m_range:
        check_m(m)
    result = run_suite(args.suite, args.m_range)
    for e in result["entries"]:
        rep = e["report"]
        subj = rep["subject"].get("label") or ", ".join(f"{k}={v}" for k, v in rep["subject"].items())
        status = "ok" if e["met"] else "UNMET"
        line = f"[{status}] {e['suite']}: {subj}: {e['verdict']} (expected {e['expect']})"
        failed = [c for c in rep["checks"] if not c["pass"]]
        if failed:
            line += f"; first failing check {failed[0]['name']} {json.dumps(failed[0]['witness'])}"
        print(line)
    print(f"{result['expectations'] - result['unmet']}/{result['expectations']} expectations met")
    if args.output:
        write_json(result, args.output)
    return EXIT_OK if result["ok"] else EXIT_FAIL


def cmd_fingerprint(args) -> int:
    g, spec = load_algebra(args.file)
    write_json(fingerprint(g, spec).to_json_obj(), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="liekit", description="Exact Lie algebra toolkit for Q_(2m+1) and its solvable extensions.")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("construct", help="build Q_(2m+1) or one of its extensions")
    c.add_argument("--family", required=True, choices=list(FAMILY_NAMES))
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--beta", type=rational)
    c.add_argument("--mu", type=rational)
    c.add_argument("--nu", type=rational)
    c.add_argument("--gamma", type=rational)
    c.add_argument("--d", type=keyed_rational, action="append", metavar="K=VALUE")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("check", help="run a structural check on an algebra file")
    c.add_argument("file")
    c.add_argument("--what", required=True, choices=["jacobi", "solvable", "nilpotent"])
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("derivations", help="derivation space report")
    c.add_argument("file")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_derivations)

    c = sub.add_parser("series", help="derived and lower central series")
    c.add_argument("file")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_series)

    c = sub.add_parser("automorph", help="realize or check an automorphism")
    c.add_argument("--m", type=int)
    c.add_argument("--p", type=rational)
    c.add_argument("--q", type=rational)
    c.add_argument("--a1", type=keyed_rational, action="append", metavar="K=VALUE", help="first-row entry a_(1,K)")
    c.add_argument("--a2", type=keyed_rational, action="append", metavar="K=VALUE", help="second-row entry a_(2,K)")
    c.add_argument("--matrix", help="JSON file with matrix rows of scalar strings")
    c.add_argument("--algebra", help="algebra file for --matrix")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_automorph)

    c = sub.add_parser("verify", help="run a certification suite")
    c.add_argument("--suite", required=True, choices=list(SUITES))
    c.add_argument("--m-range", type=m_range, required=True, metavar="A..B")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("fingerprint", help="isomorphism-invariant fingerprint")
    c.add_argument("file")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_fingerprint)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MalformedAlgebraError as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
