"""Command line front end: ``periodgram <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 a computation failed.
JSON output is key-sorted, so equal inputs and seeds give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import random
import sys
from fractions import Fraction

import mpmath

from . import bases, contiguity, diameter, gram, lattice, regions, vandermonde
from ._validation import check_exponents, check_family, check_int, check_precision
from .exactnum import format_rational
from .fekete import fekete_maximize

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE = 0, 2, 3


class InputError(ValueError):
    pass


def _parse_s(text: str) -> tuple[int, ...]:
    try:
        return check_exponents(int(p) for p in text.split(","))
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad exponent vector {text!r}: {exc}") from None


def _dump(obj, args) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=str) + "\n"


def _emit(text: str, args) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(args) -> contiguity.MellinTable:
    path = args.cache or os.environ.get("PERIODGRAM_CACHE")
    table = contiguity.MellinTable(path)
    contiguity.set_default_table(table)
    return table


def _save(table: contiguity.MellinTable) -> None:
    if table.path:
        table.save()


# ---------------------------------------------------------------------------
# commands


def cmd_integral(args) -> int:
    s = _parse_s(args.s)
    check_precision(args.precision)
    table = _table(args)
    form = table.integral(s)
    out = {
        "s": list(s),
        "const_part": format_rational(form.const),
        "xi_part": format_rational(form.xi),
        "numeric": mpmath.nstr(form.evaluate(args.precision).value, args.precision),
    }
    if args.oracle:
        out["oracle"] = contiguity.quad_oracle(s)
    _save(table)
    _emit(_dump(out, args), args)
    return EXIT_OK


def _row_text(row: dict) -> dict:
    return {k: ("" if v is None else v) for k, v in row.items()}


def cmd_table(args) -> int:
    check_family(args.family, ("two_param", "two_copies", "five_param", "two_param_g", "one_param"))
    check_precision(args.precision)
    n_min = check_int(args.n_min, "n-min", minimum=0 if args.family == "five_param" else 1)
    n_max = check_int(args.n_max, "n-max", minimum=n_min)
    table = _table(args)
    rows = []
    for n in range(n_min, n_max + 1):
        try:
            r = gram.report(args.family, n, args.precision, args.exact_limit, args.workers, table)
            rows.append(r.row() | {"d_n_exact": r.d_n_exact})
        except (ArithmeticError, RuntimeError) as exc:
            rows.append({"n": n, "error": f"{type(exc).__name__}: {exc}"})
    _save(table)
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(gram.TABLE_COLUMNS) + ["error"],
                                extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(_row_text(row))
        _emit(buf.getvalue(), args)
    else:
        _emit(_dump({"family": args.family, "rows": rows}, args), args)
    return EXIT_COMPUTE if any("error" in r for r in rows) else EXIT_OK


def cmd_gram(args) -> int:
    check_family(args.family)
    check_precision(args.precision)
    table = _table(args)
    r = gram.report(args.family, args.n, args.precision, args.exact_limit, args.workers, table)
    out = r.to_json()
    if args.entries:
        out["entries"] = gram.build_gram(args.family, args.n, table).to_json()
    _save(table)
    _emit(_dump(out, args), args)
    return EXIT_OK


def _fekete_basis(args) -> bases.ModuleBasis:
    if args.family == "rectangular":
        return bases.rectangular_basis(*([args.n] * args.dim))
    if args.family == "homogeneous":
        return bases.homogeneous_basis(args.n, args.dim)
    if args.family in ("two_param", "two_param_g"):
        return bases.family_basis(args.family, args.n)
    raise InputError(f"no Fekete basis for family {args.family!r}")


def cmd_fekete(args) -> int:
    basis = _fekete_basis(args)
    kw = {"eps": args.eps} if args.region == "tau_eps" else {}
    if args.region in regions.MAPS:
        kw["source"] = args.source
    region = regions.make_region(args.region, **kw)
    res = fekete_maximize(basis, region, restarts=args.restarts, sweeps=args.sweeps,
                          seed=args.seed, pool_size=args.pool_size, workers=args.workers)
    out = res.to_json() | {"region": region.kind, "seed": args.seed}
    _emit(_dump(out, args), args)
    return EXIT_OK


def cmd_bounds(args) -> int:
    digits = check_precision(args.precision)
    if args.which == "tau_eps":
        out = diameter.tau_eps_bounds(args.eps, digits).to_json()
        out["crossover"] = diameter.tau_eps_crossover()
    elif args.which == "zeta2-region":
        out = diameter.zeta2_region_bound(digits).to_json()
    elif args.which == "eta":
        out = diameter.eta_critical(digits).to_json()
    else:
        out = diameter.intuitive_threshold(args.r, args.w, digits).to_json()
    _emit(_dump(out, args), args)
    return EXIT_OK


def cmd_minkowski(args) -> int:
    check_family(args.family)
    table = _table(args)
    g = gram.build_gram(args.family, args.n, table)
    ig = lattice.integerize(g)
    form = lattice.extract_small_form(ig, args.precision)
    num, den = ig.delta_factored()
    out = form.to_json() | {"family": args.family, "n": args.n, "delta": f"{num}/{den}"}
    _save(table)
    _emit(_dump(out, args), args)
    return EXIT_OK


def _random_matrix(rng: random.Random, rows: int, cols: int):
    return [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(cols)] for _ in range(rows)]


def cmd_amalgam_check(args) -> int:
    m = check_int(args.m, "m", minimum=1)
    n = check_int(args.n, "n", minimum=1)
    rng = random.Random(args.seed)
    trials = []
    for _ in range(check_int(args.trials, "trials", minimum=1)):
        pair = vandermonde.AmalgamPair.of(_random_matrix(rng, m * n, m), _random_matrix(rng, m * n, n))
        brute = gram.rational_det(vandermonde.amalgam(pair))
        formula = vandermonde.amalgam_det_formula(pair)
        trials.append({"brute": format_rational(brute), "formula": format_rational(formula),
                       "equal": brute == formula})
    out = {"m": m, "n": n, "h": vandermonde.h_constant(m, n), "seed": args.seed,
           "all_equal": all(t["equal"] for t in trials), "trials": trials}
    _emit(_dump(out, args), args)
    return EXIT_OK if out["all_equal"] else EXIT_COMPUTE


def oracle_cases(max_sum: int):
    """Every ``s`` in N^5 with ``sum(s) <= max_sum``."""
    for s in itertools.product(range(max_sum + 1), repeat=5):
        if sum(s) <= max_sum:
            yield s


def cmd_oracle_check(args) -> int:
    max_sum = check_int(args.max_sum, "max-sum", minimum=0, maximum=12)
    table = _table(args)
    worst, failures, count = 0.0, [], 0
    for s in oracle_cases(max_sum):
        exact = float(table.integral(s).evaluate(30).value)
        approx = contiguity.quad_oracle(s, tol=min(args.tol / 10, 1e-10))
        err = abs(exact - approx)
        worst = max(worst, err)
        count += 1
        if err > args.tol:
            failures.append({"s": list(s), "exact": exact, "oracle": approx})
    _save(table)
    out = {"cases": count, "max_abs_error": worst, "tol": args.tol, "failures": failures}
    _emit(_dump(out, args), args)
    return EXIT_OK if not failures else EXIT_COMPUTE


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None,
                        help="decimal digits of numeric output (50; 30 for bounds)")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized procedures")
    common.add_argument("--exact-limit", type=int, default=gram.DEFAULT_EXACT_LIMIT,
                        help="largest Gram size handled by exact elimination")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    common.add_argument("--cache", help="memo file for exact integrals (overrides PERIODGRAM_CACHE)")
    common.add_argument("--output", "-o", help="write to a file instead of stdout")
    common.set_defaults(format="json")

    parser = argparse.ArgumentParser(prog="periodgram", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integral", parents=[common], help="exact I(s) = a + b*zeta(2)")
    p.add_argument("--s", required=True, help="five comma separated exponents")
    p.add_argument("--oracle", action="store_true", help="also report a quadrature value")
    p.set_defaults(func=cmd_integral)

    p = sub.add_parser("table", parents=[common], help="determinant table for a family")
    p.add_argument("--family", required=True)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("gram", parents=[common], help="one Gram determinant report")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--entries", action="store_true", help="include the exact matrix")
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("fekete", parents=[common], help="maximize |det V| over a region")
    p.add_argument("--family", default="two_param",
                   choices=["two_param", "two_param_g", "rectangular", "homogeneous"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, default=2, help="variables for rectangular/homogeneous")
    p.add_argument("--region", default="image")
    p.add_argument("--source", default="image", help="source region of a mapped region")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--sweeps", type=int, default=30)
    p.add_argument("--pool-size", type=int, default=512)
    p.set_defaults(func=cmd_fekete)

    p = sub.add_parser("bounds", parents=[common], help="closed-form diameter bounds")
    p.add_argument("--which", required=True, choices=["tau_eps", "zeta2-region", "eta", "threshold"])
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--w", type=float, default=2.0)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("minkowski", parents=[common], help="small integral linear form")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_minkowski)

    p = sub.add_parser("amalgam-check", parents=[common], help="permutation formula vs determinant")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=cmd_amalgam_check)

    p = sub.add_parser("oracle-check", parents=[common], help="exact integrals vs quadrature")
    p.add_argument("--max-sum", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision is None:
        args.precision = 30 if args.command == "bounds" else 50
    try:
        return args.func(args)
    except (InputError, ValueError, TypeError, contiguity.PoleError) as exc:
        print(f"periodgram: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, RuntimeError) as exc:
        print(f"periodgram: computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
