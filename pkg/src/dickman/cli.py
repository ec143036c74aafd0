"""Command line: sample | simulate {dou,supdou,ppk-ou,bt-ou,ar1} | pdf-table | verify.

CSV output is UTF-8 with '.' decimals, LF line endings and one header row;
floats are written with 17 significant digits.  Exit codes: 0 success or all
criteria passed, 1 some criterion failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import distribution as dd
from . import dou, driven, supou, verify
from .distribution import DickmanParams
from .errors import ParameterError
from .rng import SEED_MAX, check_seed, make_rng

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _seed(s):
    try:
        return check_seed(int(s))
    except (ValueError, ParameterError):
        raise argparse.ArgumentTypeError(f"seed must be an integer in [0, {SEED_MAX}]")


def _positive(s):
    v = float(s)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be positive, got {s}")
    return v


def _count(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {s}")
    return v


def _fmt(v) -> str:
    return repr(float(v)) if math.isfinite(v) else str(v)


def _csv(header, columns) -> str:
    rows = zip(*columns)
    return header + "\n" + "".join(",".join(_fmt(v) for v in row) + "\n" for row in rows)


def _emit(text: str, out, stdout):
    if out in (None, "-"):
        stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _grid_csv(path) -> str:
    return _csv("t,value", [path.times, path.values])


def _check_grid(args):
    if not args.dt < args.T:
        raise ParameterError(f"need dt < T, got dt={args.dt}, T={args.T}")


# ---------------------------------------------------------------------------


def cmd_sample(args, stdout):
    p = DickmanParams(args.theta, args.a)
    x = dd.sample(p, make_rng(args.seed), size=args.n, method=args.method, tol=args.tol)
    _emit(_csv("value", [x]), args.out, stdout)
    return EXIT_OK


def _pi_from_args(args):
    if args.pi == "gamma":
        return supou.GammaShapeRate.from_alpha_beta(args.alpha, args.beta if args.beta is not None else args.alpha)
    if args.pi == "degenerate":
        return supou.Degenerate(args.lam)
    if not args.rates or not args.weights or len(args.rates) != len(args.weights):
        raise ParameterError("--pi discrete needs --rates and --weights of equal length")
    return supou.Discrete.from_pairs(list(zip(args.rates, args.weights)))


def cmd_simulate(args, stdout):
    rng = make_rng(args.seed)
    if args.process == "ar1":
        chain = dou.ar1_simulate(DickmanParams(args.theta, args.a), args.c, args.n, rng)
        _emit(_csv("t,value", [np.arange(chain.values.size), chain.values]), args.out, stdout)
        return EXIT_OK
    _check_grid(args)
    if args.process == "dou":
        path = dou.simulate_grid(DickmanParams(args.theta, args.a), args.lam, args.T, args.dt, rng)
    elif args.process == "supdou":
        shots, path = supou.simulate_supdou(DickmanParams(args.theta, args.a), _pi_from_args(args), args.T, args.dt,
                                            rng, t_min=args.t_min, past=args.past)
        if args.events_out:
            _emit(_csv("S,R", [shots.S, shots.R]), args.events_out, stdout)
    else:
        if args.process == "ppk-ou":
            ev = driven.simulate_ppk_ou(driven.OrderKParams(args.theta, args.k, args.lam), args.T, rng, args.mode)
        else:
            ev = driven.simulate_bt_ou(driven.BellTouchardParams(args.alpha, args.nu, args.lam), args.T, rng, args.mode)
        path = ev.on_grid(args.dt)
    _emit(_grid_csv(path), args.out, stdout)
    return EXIT_OK


def cmd_pdf_table(args, stdout):
    p = DickmanParams(args.theta, args.a)
    n = int(round(args.x_max / args.step))
    x = args.step * np.arange(1, n + 1)
    _emit(_csv("x,pdf,cdf", [x, dd.pdf(p, x), dd.cdf(p, x)]), args.out, stdout)
    return EXIT_OK


def cmd_verify(args, stdout):
    tol = verify.Tolerances(**{k: getattr(args, k) for k in verify.Tolerances.__dataclass_fields__})
    ids = verify.select(args.only)

    def progress(r):
        if not args.quiet:
            print(r.line(), file=sys.stderr, flush=True)

    results = verify.run(ids, args.seed, tol, progress)
    rep = verify.report(results, args.seed, tol)
    if args.out not in (None, "-") or args.quiet:
        if args.out not in (None, "-"):
            _emit(verify.dumps(rep), args.out, stdout)
    else:
        stdout.write(verify.dumps(rep))
    return EXIT_OK if rep["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dickman", description="Generalized Dickman laws, DOU and supOU processes.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--seed", type=_seed, default=0)
        sp.add_argument("--out", default=None, help="output path (default stdout)")

    sp = sub.add_parser("sample", help="i.i.d. GD(theta, a) draws, column 'value'")
    sp.add_argument("--theta", type=_positive, required=True)
    sp.add_argument("--a", type=_positive, default=1.0)
    sp.add_argument("--n", type=_count, required=True)
    sp.add_argument("--method", choices=("arrivals", "perpetuity"), default="arrivals")
    sp.add_argument("--tol", type=_positive, default=dd.DEFAULT_TOL)
    common(sp)
    sp.set_defaults(func=cmd_sample)

    sim = sub.add_parser("simulate", help="grid path of a process, columns 't,value'")
    simsub = sim.add_subparsers(dest="process", required=True, parser_class=_Parser)

    def grid(sp, T=100.0, dt=0.01):
        sp.add_argument("--T", type=_positive, default=T)
        sp.add_argument("--dt", type=_positive, default=dt)
        sp.add_argument("--lambda", dest="lam", type=_positive, default=1.0)

    sp = simsub.add_parser("dou", help="DOU process (grid algorithm)")
    sp.add_argument("--theta", type=_positive, required=True)
    sp.add_argument("--a", type=_positive, default=1.0)
    grid(sp)
    common(sp)

    sp = simsub.add_parser("supdou", help="supDOU process; pi is gamma(1+alpha, beta) unless --pi says otherwise")
    sp.add_argument("--theta", type=_positive, required=True)
    sp.add_argument("--a", type=_positive, default=1.0)
    sp.add_argument("--pi", choices=("gamma", "degenerate", "discrete"), default="gamma")
    sp.add_argument("--alpha", type=_positive, default=1.0)
    sp.add_argument("--beta", type=_positive, default=None, help="gamma rate (default alpha)")
    sp.add_argument("--rates", type=_positive, nargs="+")
    sp.add_argument("--weights", type=_positive, nargs="+")
    sp.add_argument("--t-min", dest="t_min", type=float, default=None)
    sp.add_argument("--past", choices=("auto", "truncate", "exact"), default="auto")
    sp.add_argument("--events-out", dest="events_out", default=None, help="CSV of shots 'S,R'")
    grid(sp, dt=0.1)
    common(sp)

    sp = simsub.add_parser("ppk-ou", help="OU driven by the Poisson process of order k")
    sp.add_argument("--theta", type=_positive, required=True)
    sp.add_argument("--k", type=_count, required=True)
    sp.add_argument("--mode", choices=driven.MODES, default="direct")
    grid(sp)
    common(sp)

    sp = simsub.add_parser("bt-ou", help="OU driven by the Bell-Touchard process")
    sp.add_argument("--alpha", type=_positive, required=True)
    sp.add_argument("--nu", type=_positive, required=True)
    sp.add_argument("--mode", choices=driven.MODES, default="direct")
    grid(sp)
    common(sp)

    sp = simsub.add_parser("ar1", help="AR(1) chain with GD(theta, a) marginal, columns 't,value' (t = step)")
    sp.add_argument("--theta", type=_positive, required=True)
    sp.add_argument("--a", type=_positive, default=1.0)
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--n", type=_count, required=True)
    common(sp)
    sim.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("pdf-table", help="x, pdf, cdf at x = step, 2 step, ..., x_max")
    sp.add_argument("--theta", type=_positive, required=True)
    sp.add_argument("--a", type=_positive, default=1.0)
    sp.add_argument("--x-max", dest="x_max", type=_positive, default=10.0)
    sp.add_argument("--step", type=_positive, default=0.01)
    common(sp)
    sp.set_defaults(func=cmd_pdf_table)

    sp = sub.add_parser("verify", help="run the acceptance criteria, JSON report")
    sp.add_argument("--only", default=None, help="comma list of criterion ids and/or groups: " + ",".join(verify.GROUPS))
    sp.add_argument("--quiet", action="store_true", help="no progress lines; JSON only to --out")
    defaults = verify.Tolerances()
    for name in verify.Tolerances.__dataclass_fields__:
        sp.add_argument("--" + name.replace("_", "-"), dest=name, type=_positive, default=getattr(defaults, name))
    sp.add_argument("--seed", type=_seed, default=verify.DEFAULT_SEED)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, stdout)
    except _UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as e:
        print(f"dickman: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return int(e.code or 0)


if __name__ == "__main__":
    sys.exit(main())
