"""Command-line interface: ``mdepth <command> [options]``.

Exit status is 0 on success, 2 on usage errors and 1 on data errors; errors
are reported on stderr as a one-line JSON object ``{"error", "message"}``.
Tabular results are CSV, structured ones JSON; ``--plot`` additionally
renders an SVG figure next to them.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io as mio
from .depth import Sample, circle_directions, direction_grid, expectile_depth, expectile_depth_2d_exact
from .depth import mdepth_grid, parallel_map
from .errors import MDepthError
from .loss import check_order, parse_loss
from .regions import depth_region_2d, m_median
from .regression import RegressionData, conditional_region_2d, parse_engine
from .regression import simulate_cigar, simulate_hetero
from .risk import (
    check_monotonicity,
    check_subadditivity,
    check_superadditivity,
    risk_halfspace,
    upper_envelope_2d,
)
from .univariate import Series, m_quantile

__all__ = ["main", "build_parser"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _arg(fn, what):
    def conv(text):
        try:
            return fn(text)
        except (ValueError, TypeError) as exc:
            raise argparse.ArgumentTypeError(f"invalid {what} {text!r}: {exc}") from None

    return conv


def _vector(text):
    return np.array([float(v) for v in text.split(",")], dtype=float)


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise ValueError("must be positive")
    return v


ALPHA = _arg(check_order, "order")
LOSS = _arg(parse_loss, "loss")
VECTOR = _arg(_vector, "vector")
COUNT = _arg(_positive_int, "count")
ENGINE = _arg(parse_engine, "engine")


def build_parser():
    p = _Parser(prog="mdepth", description="Halfspace M-depth, M-quantile regions and expectile tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_cmd(name, help_):
        c = sub.add_parser(name, help=help_)
        c.add_argument("--input", required=True, help="headed CSV data file")
        c.add_argument("--cols", help="columns to use (names or 0-based indices, comma separated)")
        return c

    c = data_cmd("mq", "univariate M-quantile of one column")
    c.add_argument("--col", default="0", help="column name or index")
    c.add_argument("--loss", type=LOSS, default=parse_loss("quadratic"))
    c.add_argument("--alpha", type=ALPHA, required=True)

    c = data_cmd("depth", "depth of the rows of --points")
    c.add_argument("--points", required=True, help="headed CSV of query points")
    c.add_argument("--loss", type=LOSS, default=parse_loss("quadratic"))
    g = c.add_mutually_exclusive_group()
    g.add_argument("--directions", type=COUNT, default=500, help="grid size L (default 500)")
    g.add_argument("--optimize", action="store_true", help="optimize over directions (quadratic loss)")
    c.add_argument("--out", help="output CSV (default stdout)")

    c = data_cmd("region", "bivariate depth region(s)")
    c.add_argument("--alpha", type=ALPHA, nargs="+", required=True)
    c.add_argument("--loss", type=LOSS, default=parse_loss("quadratic"))
    c.add_argument("--directions", type=COUNT, default=500)
    c.add_argument("--out", help="output JSON (default stdout)")
    c.add_argument("--plot", help="also write an SVG figure here")

    c = data_cmd("median", "M-median")
    c.add_argument("--loss", type=LOSS, default=parse_loss("quadratic"))
    c.add_argument("--directions", type=COUNT, default=500)

    c = data_cmd("risk", "expectile risk halfspaces, upper envelope and coherency checks")
    c.add_argument("--alpha", type=ALPHA, required=True)
    c.add_argument("--u", type=VECTOR, action="append", help="direction 'u1,u2' (repeatable)")
    c.add_argument("--envelope", type=COUNT, help="upper envelope over L positive directions")
    c.add_argument("--pair", help="second CSV sample: report additivity (and monotonicity) checks")
    c.add_argument("--out", help="output JSON (default stdout)")
    c.add_argument("--plot", help="SVG of the envelope")

    c = sub.add_parser("regress", help="conditional expectile regions")
    c.add_argument("--input", required=True)
    c.add_argument("--xcols", default="", help="covariate columns (may be empty)")
    c.add_argument("--ycols", required=True, help="two response columns")
    c.add_argument("--alpha", type=ALPHA, nargs="+", required=True)
    c.add_argument("--at", type=VECTOR, nargs="+", default=None, help="covariate values 'x1,...,xp'")
    c.add_argument("--engine", type=ENGINE, default=parse_engine("linear"), help="linear | local:H[:kernel]")
    c.add_argument("--directions", type=COUNT, default=200)
    c.add_argument("--out", help="output JSON (default stdout)")
    c.add_argument("--plot", help="SVG with the regions at every --at value")

    c = sub.add_parser("simulate", help="synthetic samples")
    c.add_argument("--model", choices=["cigar", "hetero"], required=True)
    c.add_argument("--n", type=COUNT, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--out", help="output CSV (default stdout)")

    c = data_cmd("meantest", "statistic T_n = 1/2 - ED(mu0, P_n)")
    c.add_argument("--mu0", type=VECTOR, required=True)
    return p


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args):
    header, X = mio.read_csv(args.input)
    return mio.select_columns(header, X, args.cols)


def _cmd_mq(args):
    header, X = mio.read_csv(args.input)
    names, col = mio.select_columns(header, X, [args.col])
    theta = m_quantile(Series(col[:, 0]), args.loss, args.alpha)
    out = {"column": names[0], "loss": str(args.loss), "alpha": args.alpha, "theta": theta}
    _emit(mio.dump_json(out) + "\n", None)


def _cmd_depth(args):
    header, X = _load(args)
    sample = Sample(X)
    _, P = mio.read_csv(args.points)
    if P.shape[1] != sample.d:
        raise UsageError(f"points have {P.shape[1]} columns, data has {sample.d}")
    if args.optimize:
        if args.loss.kind != "quadratic":
            raise UsageError("--optimize is available for quadratic loss only")
        if sample.d == 2:
            vals = parallel_map(lambda z: expectile_depth_2d_exact(sample, z).value, P)
        else:
            vals = parallel_map(lambda z: expectile_depth(sample, z, with_certificate=False).value, P)
    else:
        U = direction_grid(args.directions, sample.d)
        vals = parallel_map(lambda z: mdepth_grid(sample, args.loss, z, U).value, P)
    _emit(mio.format_csv(header + ["depth"], np.column_stack([P, vals])), args.out)


def _region_json(region, alpha, loss):
    return {"alpha": alpha, "loss": str(loss), **region.to_dict()}


def _cmd_region(args):
    header, X = _load(args)
    sample = Sample(X)
    regions = [depth_region_2d(sample, args.loss, a, args.directions) for a in args.alpha]
    docs = [_region_json(r, a, args.loss) for r, a in zip(regions, args.alpha)]
    _emit(mio.dump_json(docs[0] if len(docs) == 1 else docs) + "\n", args.out)
    if args.plot:
        from .plotting import write_region_svg

        write_region_svg(regions, sample, args.plot, labels=[f"alpha={a:g}" for a in args.alpha])


def _cmd_median(args):
    _, X = _load(args)
    med = m_median(Sample(X), args.loss, args.directions)
    _emit(mio.dump_json({"loss": str(args.loss), "median": [float(v) for v in med]}) + "\n", None)


def _cmd_risk(args):
    _, X = _load(args)
    sample = Sample(X)
    out = {"alpha": args.alpha}
    dirs = args.u or []
    if args.pair:
        hy, Y = mio.read_csv(args.pair)
        _, Y = mio.select_columns(hy, Y, args.cols)
        reports = []
        for u in dirs or [np.ones(sample.d)]:
            if args.alpha <= 0.5:
                reports.append(check_subadditivity(X, Y, args.alpha, u))
            if args.alpha >= 0.5:
                reports.append(check_superadditivity(X, Y, args.alpha, u))
            if np.all(X <= Y) and np.all(np.asarray(u) >= 0):
                reports.append(check_monotonicity(X, Y, args.alpha, u))
        out["reports"] = [r.to_dict() for r in reports]
    if dirs:
        out["halfspaces"] = [risk_halfspace(sample, args.alpha, u).to_dict() for u in dirs]
    env = None
    if args.envelope:
        env = upper_envelope_2d(sample, args.alpha, args.envelope)
        out["envelope"] = env.to_dict()
    if len(out) == 1:
        raise UsageError("nothing to do: give --u, --envelope and/or --pair")
    _emit(mio.dump_json(out) + "\n", args.out)
    if args.plot:
        if env is None:
            raise UsageError("--plot needs --envelope")
        from .plotting import write_region_svg

        write_region_svg(env, sample, args.plot, title=f"upper envelope, alpha={args.alpha:g}")


def _cmd_regress(args):
    header, M = mio.read_csv(args.input)
    _, X = mio.select_columns(header, M, args.xcols or []) if args.xcols else ([], np.empty((len(M), 0)))
    _, Y = mio.select_columns(header, M, args.ycols)
    if Y.shape[1] != 2:
        raise UsageError("--ycols must name exactly two response columns")
    data = RegressionData(X, Y)
    at = args.at if args.at is not None else [np.empty(0)]
    for x in at:
        if x.size != data.p:
            raise UsageError(f"--at needs {data.p} covariate value(s), got {x.size}")
    U = circle_directions(args.directions)
    docs, regions, labels = [], [], []
    for x in at:
        for a in args.alpha:
            reg = conditional_region_2d(data, a, x, directions=U, engine=args.engine)
            d = reg.to_dict()
            docs.append({"x": [float(v) for v in x], "alpha": a, "vertices": d["vertices"],
                         "halfspaces": d["halfspaces"]})
            regions.append(reg)
            labels.append(f"x={','.join(f'{v:g}' for v in x)}, alpha={a:g}")
    _emit(mio.dump_json(docs) + "\n", args.out)
    if args.plot:
        from .plotting import write_region_svg

        write_region_svg(regions, Y, args.plot, labels=labels)


def _cmd_simulate(args):
    if args.model == "cigar":
        if args.n < 2:
            raise UsageError("cigar needs --n >= 2")
        header, M = ["x", "y"], simulate_cigar(args.n, args.seed).data
    else:
        data = simulate_hetero(args.n, args.seed)
        header, M = ["x", "y1", "y2"], np.column_stack([data.covariates, data.responses])
    _emit(mio.format_csv(header, M), args.out)


def _cmd_meantest(args):
    _, X = _load(args)
    sample = Sample(X)
    if args.mu0.size != sample.d:
        raise UsageError(f"--mu0 needs {sample.d} coordinates")
    if sample.d == 2:
        res = expectile_depth_2d_exact(sample, args.mu0)
    else:
        res = expectile_depth(sample, args.mu0, with_certificate=False)
    depth = float(res.value)
    out = {"mu0": [float(v) for v in args.mu0], "depth": depth, "T_n": 0.5 - depth, "n": sample.n}
    _emit(mio.dump_json(out) + "\n", None)


_COMMANDS = {
    "mq": _cmd_mq,
    "depth": _cmd_depth,
    "region": _cmd_region,
    "median": _cmd_median,
    "risk": _cmd_risk,
    "regress": _cmd_regress,
    "simulate": _cmd_simulate,
    "meantest": _cmd_meantest,
}


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": str(message)}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail("usage", exc, 2)
    except BrokenPipeError:
        # downstream reader (e.g. ``head``) went away; stay quiet
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0
    except (MDepthError, ValueError, ArithmeticError, OSError) as exc:
        return _fail(type(exc).__name__, exc, 1)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
