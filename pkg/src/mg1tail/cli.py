"""Command-line front end.

Subcommands:
  approx     one approximation value at one x, plus regime classification
  sweep      CSV/JSON table of every approximation over an x grid
  threshold  transition threshold and related diagnostics for a model
  simulate   Monte Carlo estimate of the waiting-time tail
  compare    side-by-side table of all methods against Monte Carlo
  geom       geometric-sum threshold report

Exit codes: 0 success, 2 usage error, 3 unsupported model/method
combination, 4 output I/O failure.

The env var MG1_SEED supplies the default --seed.  An optional
``--config PATH`` file of ``key = value`` lines supplies defaults for any
flag (keys use the flag name with dashes or underscores); explicit flags
win over the file, the file wins over built-in defaults.

CSV sweeps open with ``# key = value`` metadata comment lines followed by a
header row; floats carry 17 significant digits so parsing reproduces the
in-memory values exactly.  Column order is fixed: x, heavy_traffic,
heavy_tail, h, j, then h_clt when the model has finite variance, then
mc_estimate and mc_rel_err when --simulate is given, then regime.  JSON
output is one object {"metadata": ..., "rows": [...]} with the same field
names.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .approx import (
    approximation_point,
    h_approx,
    h_clt,
    heavy_tail,
    heavy_traffic,
    j_approx,
)
from .distributions import (
    ExponentialIntegrated,
    ParetoIntegratedTail,
    QueueModel,
    parse_model,
    variance_integrated,
)
from .errors import NoCrossingError, ResourceBudgetError, UnsupportedModelError
from .geom import GeomModel, geom_gamma, geom_tail_approx, geom_threshold
from .light_tails import corrected_heavy_traffic, cramer_lundberg_tail
from .mc import ak_estimate, crude_mc, geom_crude_mc
from .transition import (
    crossing_point,
    kappa,
    regime_classify,
    threshold_rho,
    threshold_x,
)

_METHODS = ("ht", "tail", "h", "j", "h-clt", "cl", "corrected-ht", "geom")


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _fmt_meta(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return str(v).lower()
    return _fmt(v)


def _require(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise ValueError(f"--{n.replace('_', '-')} is required")


def _queue(args) -> QueueModel:
    return QueueModel(model=parse_model(args.dist), rho=args.rho)


def _regime_string(q: QueueModel, x: float) -> str:
    try:
        return regime_classify(q, x).regime.value
    except UnsupportedModelError:
        return "na"


def _print_estimate(est):
    print(f"estimate {_fmt(est.estimate)}")
    print(f"half_width {_fmt(est.half_width)}")
    print(f"rel_err {_fmt(est.rel_err)}")
    print(f"n_samples {est.n_samples}")
    print(f"seed {est.seed}")
    print(f"method {est.method.value}")
    print(f"converged {str(est.converged).lower()}")


def cmd_approx(args) -> int:
    _require(args, "dist", "rho", "x", "method")
    q = _queue(args)
    x = args.x
    if args.method == "ht":
        value = heavy_traffic(q, x)
    elif args.method == "tail":
        value = heavy_tail(q, x)
    elif args.method == "h":
        value = h_approx(q, x)
    elif args.method == "j":
        value = j_approx(q, x)
    elif args.method == "h-clt":
        value = h_clt(q, x)
    elif args.method == "cl":
        value = cramer_lundberg_tail(q.model, q.rho, x)
    elif args.method == "corrected-ht":
        value = corrected_heavy_traffic(q.model, q.rho, x)
    else:  # geom: same formula with p = 1 - rho
        g = GeomModel(y_model=q.model, p=1.0 - q.rho)
        value = geom_tail_approx(g, x)
    print(f"value {_fmt(value)}")
    print(f"regime {_regime_string(q, x)}")
    return 0


def cmd_threshold(args) -> int:
    _require(args, "dist", "rho")
    q = _queue(args)
    print(f"kappa {_fmt(kappa(q.model))}")
    print(f"threshold_x {_fmt(threshold_x(q, c=args.c))}")
    try:
        print(f"crossing_point {_fmt(crossing_point(q))}")
    except NoCrossingError:
        print("crossing_point none")
    if args.x is not None:
        rt = threshold_rho(q.model, args.x, c=args.c)
        rep = regime_classify(q, args.x)
        print(f"rho_threshold {_fmt(rt.value)}")
        print(f"rho_threshold_in_range {str(rt.in_range).lower()}")
        print(f"c_value {_fmt(rep.c_value)}")
        print(f"regime {rep.regime.value}")
    return 0


def cmd_simulate(args) -> int:
    _require(args, "dist", "rho", "x")
    q = _queue(args)
    if args.method == "crude":
        est = crude_mc(q, args.x, n_samples=args.n_samples, seed=args.seed)
    else:
        est = ak_estimate(
            q,
            args.x,
            target_rel_err=args.rel_err,
            confidence=args.confidence,
            seed=args.seed,
            max_samples=args.max_samples,
        )
    _print_estimate(est)
    return 0


def _sweep_grid(args) -> np.ndarray:
    if args.points < 1:
        raise ValueError(f"--points must be >= 1, got {args.points}")
    if args.x_max < args.x_min:
        raise ValueError("--x-max must be >= --x-min")
    if args.points == 1:
        return np.array([float(args.x_min)])
    if args.log_grid:
        if args.x_min <= 0:
            raise ValueError("--log-grid needs --x-min > 0")
        return np.geomspace(args.x_min, args.x_max, args.points)
    return np.linspace(args.x_min, args.x_max, args.points)


def _write_table(path: str, fmt: str, meta: dict, rows: list) -> None:
    if fmt == "json":
        text = json.dumps({"metadata": meta, "rows": rows}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        for k, v in meta.items():
            buf.write(f"# {k} = {_fmt_meta(v)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        if rows:
            writer.writerow(list(rows[0].keys()))
            for row in rows:
                writer.writerow([_fmt_meta(v) for v in row.values()])
        text = buf.getvalue()
    with open(path, "w", newline="") as f:
        f.write(text)


def cmd_sweep(args) -> int:
    _require(args, "dist", "rho", "x_min", "x_max", "points", "out")
    q = _queue(args)
    xs = _sweep_grid(args)
    include_clt = math.isfinite(variance_integrated(q.model))
    rows = []
    for x in xs:
        x = float(x)
        pt = approximation_point(q, x)
        row = {
            "x": x,
            "heavy_traffic": pt.heavy_traffic,
            "heavy_tail": pt.heavy_tail,
            "h": pt.h,
            "j": pt.j,
        }
        if include_clt:
            row["h_clt"] = pt.h_clt
        if args.simulate:
            est = ak_estimate(q, x, target_rel_err=args.rel_err, seed=args.seed)
            row["mc_estimate"] = est.estimate
            row["mc_rel_err"] = est.rel_err
        row["regime"] = _regime_string(q, x)
        rows.append(row)
    try:
        tx = threshold_x(q)
    except UnsupportedModelError:
        tx = None
    try:
        cp = crossing_point(q)
    except (UnsupportedModelError, NoCrossingError):
        cp = None
    meta = {
        "model": args.dist,
        "rho": args.rho,
        "seed": args.seed,
        "simulate": bool(args.simulate),
        "rel_err": args.rel_err,
        "threshold_x": tx,
        "crossing_point": cp,
        "version": __version__,
    }
    _write_table(args.out, args.format, meta, rows)
    return 0


def cmd_compare(args) -> int:
    _require(args, "dist", "rho", "x")
    q = _queue(args)
    x = args.x
    est = ak_estimate(
        q,
        x,
        target_rel_err=args.rel_err,
        confidence=args.confidence,
        seed=args.seed,
        max_samples=args.max_samples,
    )
    pt = approximation_point(q, x)
    entries = [
        ("heavy_traffic", pt.heavy_traffic),
        ("heavy_tail", pt.heavy_tail),
        ("h", pt.h),
        ("j", pt.j),
    ]
    if pt.h_clt is not None:
        entries.append(("h_clt", pt.h_clt))
    if isinstance(q.model, ExponentialIntegrated):
        entries.append(("cramer_lundberg", cramer_lundberg_tail(q.model, q.rho, x)))
    try:
        g = GeomModel(y_model=q.model, p=1.0 - q.rho)
        entries.append(("geom", geom_tail_approx(g, x)))
    except (UnsupportedModelError, ValueError):
        pass
    print(f"x {_fmt(x)}")
    print(
        f"mc_estimate {_fmt(est.estimate)}  rel_err {_fmt(est.rel_err)}  "
        f"n_samples {est.n_samples}  converged {str(est.converged).lower()}"
    )
    print(f"{'method':<16}{'value':>24}{'ratio_to_mc':>16}")
    for name, value in entries:
        ratio = value / est.estimate if est.estimate > 0 else math.inf
        print(f"{name:<16}{value:>24.10g}{ratio:>16.6g}")
    return 0


def cmd_geom(args) -> int:
    _require(args, "betaY", "p")
    g = GeomModel(y_model=ParetoIntegratedTail(alpha=args.betaY + 1.0), p=args.p)
    y = geom_threshold(g, c=args.c)
    print(f"tau {_fmt(g.tau)}")
    print(f"threshold_y {_fmt(y)}")
    if args.x is not None:
        x = args.x
        ratio = x / y
        if ratio < 0.9:
            band = "below-threshold"
        elif ratio <= 1.1:
            band = "threshold-boundary"
        else:
            band = "above-threshold"
        print(f"x {_fmt(x)}")
        print(f"x_over_threshold {_fmt(ratio)}")
        print(f"band {band}")
        print(f"gamma {_fmt(geom_gamma(g, x))}")
        print(f"approx {_fmt(geom_tail_approx(g, x))}")
        if args.simulate:
            _print_estimate(geom_crude_mc(g, x, n_samples=args.n_samples, seed=args.seed))
    return 0


def build_parser(seed_default: int):
    parser = argparse.ArgumentParser(
        prog="mg1tail",
        description="Waiting-time tail approximations for the M/G/1 queue.",
    )
    parser.add_argument(
        "--version", action="version", version=f"mg1tail {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = []

    def add(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=fn)
        sp.add_argument("--config", help="defaults file of `key = value` lines")
        subparsers.append(sp)
        return sp

    def model_flags(sp):
        sp.add_argument(
            "--dist",
            help="model literal: pareto-it:alpha=A | exp:rate=R | lattice:file=PATH",
        )
        sp.add_argument("--rho", type=float, help="traffic intensity in (0,1)")

    sp = add("approx", cmd_approx, "evaluate one approximation at one x")
    model_flags(sp)
    sp.add_argument("--x", type=float)
    sp.add_argument("--method", choices=_METHODS)

    sp = add("sweep", cmd_sweep, "write a table of approximations over an x grid")
    model_flags(sp)
    sp.add_argument("--x-min", type=float)
    sp.add_argument("--x-max", type=float)
    sp.add_argument("--points", type=int)
    sp.add_argument("--log-grid", action="store_true")
    sp.add_argument("--out", help="output path")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--simulate", action="store_true")
    sp.add_argument("--rel-err", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=seed_default)

    sp = add("threshold", cmd_threshold, "transition threshold diagnostics")
    model_flags(sp)
    sp.add_argument("--x", type=float)
    sp.add_argument("--c", type=float, default=1.0)

    sp = add("simulate", cmd_simulate, "Monte Carlo estimate of P(W > x)")
    model_flags(sp)
    sp.add_argument("--x", type=float)
    sp.add_argument("--method", choices=("ak", "crude"), default="ak")
    sp.add_argument("--n-samples", type=int, default=1_000_000)
    sp.add_argument("--rel-err", type=float, default=0.05)
    sp.add_argument("--confidence", type=float, default=0.99)
    sp.add_argument("--max-samples", type=int, default=50_000_000)
    sp.add_argument("--seed", type=int, default=seed_default)

    sp = add("compare", cmd_compare, "all methods against Monte Carlo")
    model_flags(sp)
    sp.add_argument("--x", type=float)
    sp.add_argument("--rel-err", type=float, default=0.05)
    sp.add_argument("--confidence", type=float, default=0.99)
    sp.add_argument("--max-samples", type=int, default=50_000_000)
    sp.add_argument("--seed", type=int, default=seed_default)

    sp = add("geom", cmd_geom, "geometric-sum threshold report")
    sp.add_argument("--betaY", type=float, help="summand tail index (> 2)")
    sp.add_argument("--p", type=float, help="geometric parameter in (0,1)")
    sp.add_argument("--x", type=float)
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--simulate", action="store_true")
    sp.add_argument("--n-samples", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=seed_default)

    return parser, subparsers


def _coerce(text: str):
    t = text.strip()
    low = t.lower()
    if low in {"true", "yes", "on"}:
        return True
    if low in {"false", "no", "off"}:
        return False
    for cast in (int, float):
        try:
            return cast(t)
        except ValueError:
            pass
    return t


def _load_config(path: str) -> dict:
    cfg = {}
    with open(path) as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{line_no}: expected `key = value`")
            cfg[key.strip().replace("-", "_")] = _coerce(value)
    return cfg


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        seed_default = int(os.environ.get("MG1_SEED", "0"))
    except ValueError:
        print("error: MG1_SEED must be an integer", file=sys.stderr)
        return 2
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    parser, subparsers = build_parser(seed_default)
    if known.config is not None:
        try:
            cfg = _load_config(known.config)
        except OSError as e:
            print(f"error: cannot read config: {e}", file=sys.stderr)
            return 4
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
        all_dests = set()
        for sp in [parser, *subparsers]:
            dests = {a.dest for a in sp._actions}
            all_dests |= dests
            sp.set_defaults(**{k: v for k, v in cfg.items() if k in dests})
        unknown = set(cfg) - all_dests
        if unknown:
            print(f"error: unknown config keys: {sorted(unknown)}", file=sys.stderr)
            return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (UnsupportedModelError, ResourceBudgetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
