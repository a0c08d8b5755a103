"""Command-line front end.

Exit codes: 0 success, 1 a verification failed its tolerance, 2 usage or
domain error.  Floats are always written with 15 significant digits so that
output bytes depend only on the inputs.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import best_constant, extremal, high_dim, layer_cake, maximal_1d, strong_max
from .step_fn import DomainError, PNormParams, random_step_function, read_csv

FMT = ".15g"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, FMT)


def json_record(d: dict) -> str:
    """Flat JSON object with fixed-precision numbers (json.dumps would use repr)."""
    parts = []
    for k, v in d.items():
        if isinstance(v, float) and not math.isfinite(v):
            val = "null"
        elif isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool):
            val = fmt(v)
        elif isinstance(v, bool):
            val = "true" if v else "false"
        else:
            val = '"' + str(v).replace("\\", "\\\\").replace('"', '\\"') + '"'
        parts.append(f'"{k}": {val}')
    return "{" + ", ".join(parts) + "}\n"


def _params(p: float) -> PNormParams:
    try:
        return PNormParams(p)
    except DomainError as e:
        raise UsageError(str(e)) from e


def _load(path: str):
    try:
        f = read_csv(path)
    except (OSError, ValueError, StopIteration) as e:
        raise UsageError(f"cannot read step function from {path}: {e}") from e
    if not f.is_nonnegative():
        raise UsageError(f"{path}: maximal operators need nonnegative values")
    return f


def cmd_best_constant(args, out) -> int:
    params = _params(args.p)
    bc = best_constant.solve_cp(params)
    if args.format == "csv":
        d = bc.as_dict()
        out.write(",".join(d) + "\n" + ",".join(fmt(v) for v in d.values()) + "\n")
    else:
        out.write(json_record(bc.as_dict()))
    return EXIT_OK


def cmd_maximal(args, out) -> int:
    f = _load(args.input)
    op = {"left": maximal_1d.left_max, "right": maximal_1d.right_max,
          "uncentered": maximal_1d.uncentered_max}[args.op]
    text = maximal_1d.node_csv(op(f), FMT)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def _random_inputs(args):
    rng = np.random.default_rng(args.seed)
    for _ in range(args.trials):
        m = int(rng.integers(1, args.max_cells + 1))
        yield random_step_function(rng, m), rng


def cmd_verify(args, out) -> int:
    out.write("lemma,lambda,lhs,rhs,slack,pass\n")
    ok = True
    rows = []
    if args.lemma in (1, 2):
        if args.input:
            f = _load(args.input)
            rng = np.random.default_rng(args.seed)
            inputs = [(f, rng)]
        else:
            inputs = list(_random_inputs(args))
        for f, rng in inputs:
            if args.lam:
                lams = args.lam
            else:
                top = max(float(np.max(f.values)), 1e-300)
                lams = np.sort(rng.uniform(0.01 * top, 1.2 * top, size=args.n_lambda)).tolist()
            for lam in lams:
                if not lam > 0:
                    raise UsageError("lambda must be positive")
                if args.lemma == 1:
                    rows.extend(layer_cake.lemma1_check(f, lam))
                else:
                    rows.append(layer_cake.lemma2_check(f, lam))
    else:
        params = _params(args.p)
        if args.input:
            g = _load(args.input)
            f = _load(args.weight) if args.weight else None
            pairs = [(f, g)]
        else:
            rng = np.random.default_rng(args.seed)
            pairs = []
            for _ in range(args.trials):
                f = random_step_function(rng, int(rng.integers(1, args.max_cells + 1)))
                g = random_step_function(rng, int(rng.integers(1, args.max_cells + 1)))
                pairs.append((f, g))
        for f, g in pairs:
            if f is not None:
                lhs, rhs = layer_cake.lemma3_first(f, g, params)
                rows.append(layer_cake.IdentityReport("3-first", lhs, rhs))
            lhs, rhs = layer_cake.lemma3_second(g, params)
            rows.append(layer_cake.IdentityReport("3-second", lhs, rhs))
    for r in rows:
        ok &= r.passed
        lam = "" if r.lam is None else fmt(r.lam)
        out.write(",".join([r.lemma, lam, fmt(r.lhs), fmt(r.rhs), fmt(r.slack), fmt(r.passed)]) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_opnorm_sweep(args, out) -> int:
    params = _params(args.p)
    try:
        rows = extremal.sweep(params, args.eps, args.N, args.cells_per_decade)
    except DomainError as e:
        raise UsageError(str(e)) from e
    out.write(extremal.sweep_csv(rows, FMT))
    return EXIT_OK


def cmd_strong(args, out) -> int:
    params = _params(args.p)
    if args.dim < 1:
        raise UsageError("--dim must be >= 1")
    try:
        spec = extremal.ExtremalSpec(params, args.eps, args.N, args.cells_per_decade)
    except DomainError as e:
        raise UsageError(str(e)) from e
    out.write(strong_max.strong_csv([strong_max.strong_ratio(params, args.dim, spec)], FMT))
    return EXIT_OK


def cmd_highdim(args, out) -> int:
    params = _params(args.p)
    if args.n_max < 5:
        raise UsageError("--n-max must be >= 5")
    out.write(high_dim.growth_csv(high_dim.growth_table(params, args.n_max), FMT))
    return EXIT_OK


def _float_list(s: str) -> list[float]:
    try:
        return [float(t) for t in s.split(",") if t.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maxnorm", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("best-constant", help="sharp constant c_p and its cross-check")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_best_constant)

    sp = sub.add_parser("maximal", help="maximal function at the breakpoints of a step function")
    sp.add_argument("--input", required=True, help="step function CSV (x,value)")
    sp.add_argument("--op", choices=("left", "right", "uncentered"), default="uncentered")
    sp.add_argument("--output", help="write CSV here instead of standard output")
    sp.set_defaults(func=cmd_maximal)

    sp = sub.add_parser("verify", help="check the level-set lemmas")
    sp.add_argument("--lemma", type=int, choices=(1, 2, 3), required=True)
    sp.add_argument("--input", help="step function CSV; random inputs when omitted")
    sp.add_argument("--weight", help="lemma 3: weight function f for the first identity")
    sp.add_argument("--lambda", dest="lam", type=float, action="append",
                    help="level (repeatable); random levels when omitted")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--max-cells", type=int, default=64)
    sp.add_argument("--n-lambda", type=int, default=5)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("opnorm-sweep", help="norm ratios along the extremal family")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--eps", type=_float_list, required=True, help="comma-separated, decreasing")
    sp.add_argument("--N", type=_float_list, required=True, help="comma-separated, increasing")
    sp.add_argument("--cells-per-decade", type=int, default=200)
    sp.set_defaults(func=cmd_opnorm_sweep)

    sp = sub.add_parser("strong", help="strong maximal ratio on the product extremal function")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--eps", type=float, default=1e-3)
    sp.add_argument("--N", type=float, default=1e3)
    sp.add_argument("--cells-per-decade", type=int, default=200)
    sp.set_defaults(func=cmd_strong)

    sp = sub.add_parser("highdim", help="dimensional lower bound and growth table")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--n-max", type=int, required=True)
    sp.set_defaults(func=cmd_highdim)
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, DomainError) as e:
        err.write(f"maxnorm {args.command}: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
