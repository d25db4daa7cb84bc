"""Command-line interface.

Every subcommand parses its arguments, calls one library function per
output row and writes the result as CSV (default) or JSON. Floats are
written with ``repr`` so the printed value round-trips to the library
result exactly.

Exit codes: 0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .datasets import load_dataset, resolve_fitted
from .distributions import Distribution, parse_dist
from .erratum import notes_for
from .errors import ParseError, WvarentError
from .quadrature import QuadratureConfig

COMMANDS = ("measure", "residual", "transform", "system", "phr", "simulate", "estimate", "curves")


class UsageError(Exception):
    """Bad command line; exit status 2."""


# -- configuration ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Snapshot of one invocation, serialisable to JSON and back."""

    subcommand: str
    args: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    quadrature: Dict[str, float] = field(default_factory=dict)
    output_format: str = "csv"

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))

    def quadrature_config(self) -> QuadratureConfig:
        return QuadratureConfig(**self.quadrature)


# -- argument helpers --------------------------------------------------------------------------


def parse_grid(text: str) -> List[float]:
    """``0.1,0.2,0.3`` or ``start:stop:count`` (inclusive linspace)."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
            if num < 1:
                raise ValueError
            return [float(v) for v in np.linspace(start, stop, num)]
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ParseError(f"bad grid {text!r}; expected 'a,b,c' or 'start:stop:count'") from None
    if not vals:
        raise ParseError("empty grid")
    return vals


def parse_int_grid(text: str) -> List[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ParseError(f"bad integer list {text!r}") from None
    if not vals:
        raise ParseError("empty list")
    return vals


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("WVARENT_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"WVARENT_SEED must be an integer, got {env!r}") from None


def _num(v):
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


# -- subcommand implementations -----------------------------------------------------------------
#
# Each returns (columns, rows) where rows are lists aligned with columns.


def _build_dist(args) -> Distribution:
    dist = parse_dist(args.dist)
    if getattr(args, "map", None):
        from .transforms import TransformedDistribution, parse_map
        dist = TransformedDistribution(dist, parse_map(args.map))
    if getattr(args, "structure", None):
        from .systems import DistortedDistribution, parse_structure
        dist = DistortedDistribution(dist, parse_structure(args.structure))
    if getattr(args, "phr", None) is not None:
        from .phr import PHRModel
        dist = PHRModel(dist, args.phr)
    return dist


def cmd_measure(args, cfg):
    from . import measures as m
    dist = parse_dist(args.dist)
    w = m.parse_weight(args.weight)
    name = args.measure
    if name == "SE":
        return ["measure", "value"], [[name, m.shannon_entropy(dist, cfg)]]
    if name == "VE":
        return ["measure", "value"], [[name, m.varentropy(dist, cfg)]]
    if name == "WSE":
        return ["measure", "value"], [[name, m.weighted_entropy(dist, w, cfg)]]
    if name == "WVE":
        return ["measure", "value"], [[name, m.weighted_varentropy(dist, w, cfg)]]
    if name == "WVE-closed":
        return ["measure", "value"], [[name, m.closed_form_wve(dist, printed=args.printed)]]
    if name == "bound-upper":
        _need(args, "alpha", "beta")
        r = m.wve_upper_bound(dist, args.alpha, args.beta, cfg)
        return ["measure", "value", "bound", "condition", "holds"], \
            [[name, r.measure, r.bound, r.condition_holds, r.holds]]
    raise UsageError(f"unknown measure {name!r}")


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n for n in missing))


def cmd_residual(args, cfg):
    from . import residual as r
    from .measures import parse_weight
    dist = parse_dist(args.dist)
    ts = parse_grid(args.t)
    name = args.measure
    rows = []
    if name in ("WRSE", "WRVE"):
        w = parse_weight(args.weight)
        fn = r.wrse if name == "WRSE" else r.wrve
        return ["t", "value"], [[t, fn(dist, t, w, cfg)] for t in ts]
    if name == "RVE":
        return ["t", "value"], [[t, r.rve(dist, t, cfg)] for t in ts]
    if name == "WRVE-closed":
        return ["t", "value"], [[t, r.closed_form_wrve(dist, t, printed=args.printed)] for t in ts]
    if name == "dWRVE":
        for t in ts:
            d = r.wrve_derivative(dist, t, cfg)
            rows.append([t, d.formula_value, d.finite_difference_value, d.derived_value])
        return ["t", "formula", "finite_difference", "derived"], rows
    if name == "bound-upper":
        _need(args, "alpha", "beta")
        for t in ts:
            b = r.wrve_upper_bound(dist, t, args.alpha, args.beta, cfg)
            rows.append([t, b.measure, b.bound, b.condition_holds])
        return ["t", "value", "bound", "condition"], rows
    if name == "bound-lower":
        for t in ts:
            b = r.wrve_lower_bound(dist, t, cfg)
            rows.append([t, b.measure, b.bound, b.condition_holds])
        return ["t", "value", "bound", "condition"], rows
    raise UsageError(f"unknown measure {name!r}")


def cmd_transform(args, cfg):
    from . import transforms as tr
    from .measures import IDENTITY, ic_moments
    from .residual import wrve
    dist = parse_dist(args.dist)
    phi = tr.parse_map(args.map)
    law = tr.TransformedDistribution(dist, phi)
    if args.measure == "WVE":
        value = tr.wve_monotone(dist, phi, printed=args.printed, cfg=cfg)
        direct = ic_moments(law, IDENTITY, None, cfg).varentropy
        return ["map", "value", "direct"], [[phi.label, value, direct]]
    if args.measure == "WRVE":
        _need(args, "t")
        rows = [[t, tr.wrve_monotone(dist, phi, t, cfg), wrve(law, t, cfg=cfg)] for t in parse_grid(args.t)]
        return ["t", "value", "direct"], rows
    raise UsageError(f"unknown measure {args.measure!r}")


def cmd_system(args, cfg):
    from . import systems as s
    comp = parse_dist(args.dist)
    q = s.parse_structure(args.structure)
    name = args.measure
    if name == "WVE":
        return ["structure", "u_form", "direct"], \
            [[q.label, s.wve_coherent(q, comp, cfg), s.wve_system_direct(q, comp, cfg)]]
    if name == "compare":
        c = s.wve_comparison_condition(q, comp, cfg=cfg)
        return ["structure", "system", "component", "conclusion", "verified"], \
            [[q.label, c.system_value, c.component_value, c.conclusion or "", c.verified]]
    if name == "bounds":
        _need(args, "alpha", "beta")
        b = s.wve_coherent_bounds(q, comp, args.alpha, args.beta, args.floor, cfg)
        return ["structure", "value", "beta1u", "bound_wse", "bound_wve", "bound_density_floor",
                "condition", "floor_condition", "near_boundary"], \
            [[q.label, b.value, b.beta1u, b.bound_wse, b.bound_wve, b.bound_density_floor,
              b.condition_holds, b.floor_holds, b.near_boundary]]
    raise UsageError(f"unknown measure {name!r}")


def cmd_phr(args, cfg):
    from . import phr
    from .distributions import Exponential
    base = parse_dist(args.dist)
    model = phr.PHRModel(base, args.a)
    fn = phr.wrse_phr if args.measure == "WRSE" else phr.wrve_phr
    rows = []
    closed = args.measure == "WRVE" and isinstance(base, Exponential)
    for t in parse_grid(args.t):
        row = [t, fn(model, t, cfg)]
        if closed:
            row.append(phr.phr_exponential_wrve(args.a, base.lam, t))
        rows.append(row)
    return (["t", "value", "closed_form"] if closed else ["t", "value"]), rows


def _report_rows(report):
    from .estimation import CSV_COLUMNS
    return list(CSV_COLUMNS), [[r.t, r.n, r.bias, r.mse, r.true_value, r.replications, r.failures]
                               for r in report.rows]


def cmd_simulate(args, cfg):
    from .estimation import BandwidthRule, monte_carlo_study
    dist = parse_dist(args.dist)
    rule = BandwidthRule.parse(args.bandwidth)
    report = monte_carlo_study(dist, parse_grid(args.t), parse_int_grid(args.n), args.reps,
                               rule, seed=args.seed_value, workers=args.workers)
    return _report_rows(report)


def cmd_estimate(args, cfg):
    from .estimation import KernelEstimate, bootstrap_study, wrve_estimate
    from .residual import wrve
    ds = load_dataset(args.data)
    ts = parse_grid(args.t)
    bn = args.bn
    if bn is None:
        if math.isnan(ds.bandwidth):
            raise UsageError("--bn is required for this dataset")
        bn = ds.bandwidth
    fitted_spec = args.fitted or (ds.fitted or None)
    fitted = resolve_fitted(fitted_spec) if fitted_spec else None
    if args.bootstrap is None:
        est = KernelEstimate(np.asarray(ds.values), bn)
        rows = []
        for t in ts:
            rows.append([t, len(ds), wrve_estimate(est, t), wrve(fitted, t, cfg=cfg) if fitted else None])
        return ["t", "n", "estimate", "true_value"], rows
    if fitted is None:
        raise UsageError("--fitted is required with --bootstrap")
    report = bootstrap_study(ds.values, fitted, ts, bn, args.bootstrap, seed=args.seed_value,
                             workers=args.workers)
    return _report_rows(report)


def cmd_curves(args, cfg):
    from .residual import rve, wrve
    dist = _build_dist(args)
    rows = []
    for t in parse_grid(args.t):
        rows.append([t, wrve(dist, t, cfg=cfg), rve(dist, t, cfg)])
    return ["t", "WRVE", "RVE"], rows


HANDLERS = {"measure": cmd_measure, "residual": cmd_residual, "transform": cmd_transform,
            "system": cmd_system, "phr": cmd_phr, "simulate": cmd_simulate,
            "estimate": cmd_estimate, "curves": cmd_curves}


# -- parser ---------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--rel-tol", type=float, default=QuadratureConfig.rel_tol)
    g.add_argument("--abs-tol", type=float, default=QuadratureConfig.abs_tol)
    g.add_argument("--tail-mass", type=float, default=QuadratureConfig.tail_mass)
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--out", help="write the report here instead of stdout")
    g.add_argument("--seed", type=int, help="random seed (falls back to $WVARENT_SEED, then 0)")
    g.add_argument("--workers", type=int, default=1, help="worker processes for studies")

    p = _Parser(prog="wvarent", description="Weighted (residual) varentropy toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, description=help_)

    s = add("measure", "weighted entropy / varentropy of a distribution")
    s.add_argument("--dist", required=True, help="e.g. exp:lambda=2, unif:a=0,b=1")
    s.add_argument("--weight", default="x", help="x | x2 | unit | affine:a,b | cubquad:alpha,beta")
    s.add_argument("--measure", default="WVE", choices=("SE", "VE", "WSE", "WVE", "WVE-closed", "bound-upper"))
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--printed", action="store_true", help="closed forms as published")

    s = add("residual", "residual measures on a grid of ages t")
    s.add_argument("--dist", required=True)
    s.add_argument("--t", required=True, help="'0.1,0.2' or 'start:stop:count'")
    s.add_argument("--weight", default="x")
    s.add_argument("--measure", default="WRVE",
                   choices=("WRSE", "WRVE", "RVE", "WRVE-closed", "dWRVE", "bound-upper", "bound-lower"))
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--printed", action="store_true")

    s = add("transform", "measures of Y = phi(X) via identities, with direct quadrature alongside")
    s.add_argument("--dist", required=True)
    s.add_argument("--map", required=True, help="identity | square | power:p | affine:a,b | expneg:c | reflect:c")
    s.add_argument("--measure", default="WVE", choices=("WVE", "WRVE"))
    s.add_argument("--t")
    s.add_argument("--printed", action="store_true")

    s = add("system", "coherent systems with i.i.d. components")
    s.add_argument("--dist", required=True, help="component distribution")
    s.add_argument("--structure", required=True, help="series:n | parallel:n | koutofn:k,n | table:path")
    s.add_argument("--measure", default="WVE", choices=("WVE", "compare", "bounds"))
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--floor", type=float, help="density lower bound L for the floor bound")

    s = add("phr", "proportional hazard rate model")
    s.add_argument("--dist", required=True, help="baseline distribution")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--t", required=True)
    s.add_argument("--measure", default="WRVE", choices=("WRSE", "WRVE"))

    s = add("simulate", "Monte Carlo bias/MSE study of the kernel estimator")
    s.add_argument("--dist", required=True)
    s.add_argument("--t", required=True)
    s.add_argument("--n", required=True, help="sample sizes, e.g. 50,100,200")
    s.add_argument("--reps", type=int, default=500)
    s.add_argument("--bandwidth", default="silverman", help="silverman | fixed:<b>")

    s = add("estimate", "kernel estimate on data, optionally with a bootstrap study")
    s.add_argument("--data", required=True, help="builtin:nano | builtin:covid | path")
    s.add_argument("--fitted", help="distribution spec or builtin:<dataset>")
    s.add_argument("--t", required=True)
    s.add_argument("--bn", type=float)
    s.add_argument("--bootstrap", type=int, help="number of bootstrap resamples")

    s = add("curves", "plot-ready (t, WRVE, RVE) columns")
    s.add_argument("--dist", required=True)
    s.add_argument("--t", required=True)
    s.add_argument("--map", help="transform the distribution first")
    s.add_argument("--structure", help="system lifetime with this structure")
    s.add_argument("--phr", type=float, help="PHR constant a applied last")
    return p


# -- output -------------------------------------------------------------------------------------


def render(config: RunConfig, columns, rows, notes) -> str:
    if config.output_format == "json":
        obj = {"config": asdict(config),
               "rows": [dict(zip(columns, r)) for r in rows],
               "erratum_notes": notes}
        return json.dumps(obj, default=_json_default, allow_nan=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_num(v) for v in r])
    return buf.getvalue()


def _json_default(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    raise TypeError(type(v).__name__)


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.seed_value = _seed(args)
        quad = {"rel_tol": args.rel_tol, "abs_tol": args.abs_tol, "tail_mass": args.tail_mass}
        try:
            cfg = QuadratureConfig(**quad)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        skip = {"command", "rel_tol", "abs_tol", "tail_mass", "format", "out", "seed", "seed_value"}
        snapshot = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
        config = RunConfig(args.command, snapshot, args.seed_value, quad, args.format)
        columns, rows = HANDLERS[args.command](args, cfg)
    except UsageError as exc:
        _report_error(stderr, "UsageError", str(exc))
        return 2
    except ParseError as exc:
        _report_error(stderr, type(exc).__name__, str(exc))
        return 2
    except WvarentError as exc:
        _report_error(stderr, type(exc).__name__, str(exc))
        return 1
    except ValueError as exc:
        # invalid option values caught by constructors outside the error hierarchy
        _report_error(stderr, "UsageError", str(exc))
        return 2
    text = render(config, columns, rows, notes_for(args.command))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0


def _report_error(stream, name, message):
    stream.write(json.dumps({"error": name, "message": message}) + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
