"""Command line interface.

Subcommands: ``compute`` (exact values), ``estimate`` (kernel estimates from a
data file), ``simulate`` (Monte Carlo bias/MSE study), ``analyze`` (Weibull
fit, KS check and bootstrap) and ``curve`` (theoretical and estimated
dynamic entropy over a range of t).

Exit codes: 0 success, 2 invalid input, 3 divergent entropy integral,
4 failed fit.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .distributions import Weibull, make_distribution
from .entropy import check_alpha, crmhe, dcrmhe, tabulated_crmhe
from .errors import (
    CRMHEError,
    DivergentEntropy,
    DomainError,
    FitError,
    InvalidParameterError,
)
from .inference import analyze, fit_weibull_mle, load_dataset
from .kernel import KernelEstimatorConfig, estimate_dcrmhe, silverman_bandwidth
from .simulation import SimulationPlan, load_plan, run_simulation

INTERFACE_VERSION = "1.0"

FAMILY_HELP = """\
distribution families and --params order:
  uniform  low,high      (0 <= low < high)
  exp      rate
  pareto1  scale,shape   S(x) = (scale/x)^shape, x >= scale
  pareto2  scale,shape   S(x) = (1 + x/scale)^-shape
  gpd      shape,scale   S(x) = (1 + shape*x/scale)^-(1 + 1/shape), shape > -1
  weibull  shape,scale   S(x) = exp(-(x/scale)^shape)
"""


class UsageError(CRMHEError):
    pass


# -- formatting ----------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    return value


def _config_hash(payload: dict) -> str:
    blob = json.dumps(_jsonable(payload), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def make_record(command: str, options: dict, rows: list[dict], seed=None, **extra) -> dict:
    record = {
        "command": command,
        "options": options,
        "config_hash": _config_hash({"command": command, **options}),
        "seed": seed,
        "version": __version__,
        "results": rows,
    }
    record.update(extra)
    return record


def render_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    columns = list(rows[0])
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def render_json(record: dict) -> str:
    return json.dumps(_jsonable(record), indent=2) + "\n"


def render_table(record: dict) -> str:
    lines = []
    for key in ("fit", "bandwidth_note"):
        if key in record:
            lines.append(f"{key}: {json.dumps(_jsonable(record[key]))}")
    rows = record["results"]
    if rows:
        columns = list(rows[0])

        def cell(v):
            if isinstance(v, float):
                return "nan" if math.isnan(v) else f"{v:.6g}"
            return "" if v is None else str(v)

        table = [columns] + [[cell(r.get(c)) for c in columns] for r in rows]
        widths = [max(len(r[i]) for r in table) for i in range(len(columns))]
        for r in table:
            lines.append("  ".join(v.rjust(w) for v, w in zip(r, widths)).rstrip())
    for w in record.get("warnings", ()):
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


# -- argument helpers -------------------------------------------------------------------


def _float_list(text: str | None) -> list[float]:
    if text is None or not text.strip():
        return []
    try:
        return [float(p) for p in text.replace(";", ",").split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"could not parse number list {text!r}") from None


def _int_list(text: str | None) -> list[int]:
    values = _float_list(text)
    if any(v != int(v) for v in values):
        raise UsageError(f"expected integers, got {text!r}")
    return [int(v) for v in values]


def _kernel_config(args) -> KernelEstimatorConfig:
    return KernelEstimatorConfig(
        kernel=args.kernel, bandwidth=args.bandwidth, grid_points=args.grid_points
    )


def _kernel_options(cfg: KernelEstimatorConfig) -> dict:
    return {"kernel": cfg.kernel, "bandwidth": cfg.bandwidth, "grid_points": cfg.grid_points}


def _dist_label(dist) -> str:
    return f"{dist.family}({','.join(format(p, 'g') for p in dist.params)})"


def _t_range(start: float, stop: float, step: float) -> list[float]:
    if not step > 0:
        raise UsageError("step must be positive")
    if stop < start:
        raise UsageError("t range stop must not be below start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


# -- commands -------------------------------------------------------------------------------


def cmd_compute(args) -> dict:
    """Closed-form and quadrature values side by side."""
    dist = make_distribution(args.dist, args.params)
    alpha = check_alpha(args.alpha)
    ts = _float_list(args.t) or [0.0]
    rows = []
    for t in ts:
        if t < 0:
            raise UsageError("t must be non-negative")
        quad = dcrmhe(dist, alpha, t, method="quadrature")
        try:
            closed = dcrmhe(dist, alpha, t, method="closed_form").value
        except InvalidParameterError:
            closed = None
        row = {
            "dist": _dist_label(dist),
            "alpha": alpha,
            "t": t,
            "closed_form": closed,
            "quadrature": quad.value,
            "difference": None if closed is None else closed - quad.value,
            "quadrature_error": quad.estimated_abs_error,
        }
        if t == 0.0:
            try:
                row["tabulated"] = tabulated_crmhe(dist, alpha)
            except InvalidParameterError:
                row["tabulated"] = None
        rows.append(row)
    options = {"dist": dist.family, "params": list(dist.params), "alpha": alpha, "t": ts}
    return make_record("compute", options, rows)


def cmd_estimate(args) -> dict:
    data = load_dataset(args.data)
    alpha = check_alpha(args.alpha)
    config = _kernel_config(args)
    ts = _float_list(args.t) or [0.0]
    try:
        h = silverman_bandwidth(data.values) if config.bandwidth is None else config.bandwidth
    except CRMHEError as exc:
        raise InvalidParameterError(str(exc)) from None
    rows = []
    for t in ts:
        row = {
            "alpha": alpha,
            "t": t,
            "estimate": None,
            "bandwidth": h,
            "bandwidth_rule": config.bandwidth_rule,
            "kernel": config.kernel,
            "grid_points": config.intervals,
            "estimated_abs_error": None,
            "error": "",
        }
        try:
            value = estimate_dcrmhe(data.values, alpha, t, config)
            row["estimate"] = value.value
            row["estimated_abs_error"] = value.estimated_abs_error
        except CRMHEError as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    options = {"data": str(args.data), "n": len(data), "alpha": alpha, "t": ts, **_kernel_options(config)}
    return make_record("estimate", options, rows)


def _build_plan(args) -> SimulationPlan:
    if args.plan:
        plan = load_plan(args.plan)
        updates = {}
        if args.seed is not None:
            updates["master_seed"] = args.seed
        if args.reps is not None:
            updates["reps"] = args.reps
        if updates:
            fields = {**plan.__dict__, **updates}
            plan = SimulationPlan(**fields)
        return plan
    if args.seed is None:
        raise UsageError("--seed is required: every randomized run must be reproducible")
    if not (args.dist and args.params and args.alpha is not None and args.n):
        raise UsageError("simulate needs --plan or all of --dist, --params, --alpha, --n, --seed")
    return SimulationPlan(
        dist=make_distribution(args.dist, args.params),
        alpha=args.alpha,
        n_values=tuple(_int_list(args.n)),
        t_values=tuple(_float_list(args.t)),
        reps=args.reps if args.reps is not None else 10_000,
        master_seed=args.seed,
        config=_kernel_config(args),
    )


def cmd_simulate(args) -> dict:
    plan = _build_plan(args)
    report = run_simulation(plan, workers=args.threads)
    return make_record("simulate", plan.describe(), report.rows(), seed=plan.master_seed)


def cmd_analyze(args) -> dict:
    if args.seed is None:
        raise UsageError("--seed is required: every randomized run must be reproducible")
    data = load_dataset(args.data)
    alpha = check_alpha(args.alpha)
    ts = _float_list(args.t)
    if not ts:
        raise UsageError("--t needs at least one truncation time")
    config = _kernel_config(args)
    rep = analyze(data, alpha, ts, args.reps, args.seed, config, args.resample_size, args.threads)
    rows = []
    for row, point in zip(rep.bootstrap.rows, rep.point_estimates):
        rows.append(
            {
                "t": row.t,
                "theoretical": row.theoretical,
                "estimate": point,
                "bootstrap_mean": row.mean_estimate,
                "bias": row.bias,
                "mse": row.mse,
                "reps": row.reps,
                "error": row.error,
            }
        )
    fit = {
        "family": "weibull",
        "shape": rep.fit.shape,
        "scale": rep.fit.scale,
        "ks_statistic": rep.fit.ks_statistic,
        "ks_p_value": rep.fit.ks_p_value,
        "n": rep.fit.n,
    }
    options = {
        "data": str(args.data),
        "n": len(data),
        "alpha": alpha,
        "t": ts,
        "reps": args.reps,
        "resample_size": rep.bootstrap.resample_size,
        **_kernel_options(config),
    }
    return make_record("analyze", options, rows, seed=args.seed, fit=fit, warnings=list(rep.warnings))


def cmd_curve(args) -> dict:
    alpha = check_alpha(args.alpha)
    ts = _t_range(args.t_start, args.t_stop, args.step)
    dist = None
    data = None
    extra = {}
    if args.dist:
        dist = make_distribution(args.dist, args.params or "")
    if args.data:
        data = load_dataset(args.data)
        if dist is None:
            fit = fit_weibull_mle(data)
            dist = Weibull(fit.shape, fit.scale)
            extra["fit"] = {"family": "weibull", "shape": fit.shape, "scale": fit.scale}
    if dist is None and data is None:
        raise UsageError("curve needs --dist/--params or --data")
    config = _kernel_config(args)
    rows = []
    for t in ts:
        row = {"t": t, "theoretical": None, "estimate": None, "error": ""}
        problems = []
        try:
            row["theoretical"] = dcrmhe(dist, alpha, t).value
        except DivergentEntropy:
            raise
        except CRMHEError as exc:
            problems.append(f"theoretical: {exc}")
        if data is not None:
            try:
                row["estimate"] = estimate_dcrmhe(data.values, alpha, t, config).value
            except CRMHEError as exc:
                problems.append(f"estimate: {exc}")
        row["error"] = "; ".join(problems)
        rows.append(row)
    options = {
        "dist": _dist_label(dist),
        "data": str(args.data) if args.data else None,
        "alpha": alpha,
        "t_start": args.t_start,
        "t_stop": args.t_stop,
        "step": args.step,
        **_kernel_options(config),
    }
    return make_record("curve", options, rows, **extra)


# -- parser -----------------------------------------------------------------------------------


def _add_output(p):
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit the full JSON record")
    fmt.add_argument("--csv", action="store_true", help="emit the result table as CSV")
    p.add_argument("-o", "--output", help="write to this file instead of standard output")


def _add_kernel(p):
    p.add_argument("--kernel", choices=["gaussian", "epanechnikov"], default="gaussian")
    p.add_argument("--bandwidth", type=float, default=None, help="fixed bandwidth (default: Silverman)")
    p.add_argument("--grid-points", type=int, default=2048, help="Simpson subintervals (default 2048)")


def _add_threads(p):
    p.add_argument(
        "--threads", type=int, default=os.cpu_count() or 1, help="worker processes (default: all cores)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crmhe",
        description="Cumulative residual Mathai-Haubold entropy: exact values, kernel estimates, "
        "simulation and bootstrap studies.",
        epilog=FAMILY_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--version", action="version", version=f"crmhe {__version__} (interface {INTERFACE_VERSION})"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="exact static/dynamic entropy", epilog=FAMILY_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--dist", required=True)
    p.add_argument("--params", required=True, help="comma-separated parameters")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t", default=None, help="truncation time(s), comma-separated (default 0)")
    _add_output(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("estimate", help="kernel estimate from a data file")
    p.add_argument("--data", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t", default=None, help="truncation time(s), comma-separated (default 0)")
    _add_kernel(p)
    _add_output(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="Monte Carlo bias/MSE study", epilog=FAMILY_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--plan", help="key = value plan file")
    p.add_argument("--dist")
    p.add_argument("--params")
    p.add_argument("--alpha", type=float)
    p.add_argument("--n", help="sample sizes, comma-separated")
    p.add_argument("--t", default=None, help="truncation times; omit for the static estimator")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    _add_kernel(p)
    _add_threads(p)
    _add_output(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="Weibull fit, KS check and bootstrap of the estimator")
    p.add_argument("--data", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t", required=True, help="truncation times, comma-separated")
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--resample-size", type=int, default=None, help="default: dataset size")
    _add_kernel(p)
    _add_threads(p)
    _add_output(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("curve", help="theoretical and estimated dynamic entropy over t")
    p.add_argument("--dist")
    p.add_argument("--params")
    p.add_argument("--data")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t-start", type=float, default=0.0)
    p.add_argument("--t-stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    _add_kernel(p)
    _add_output(p)
    p.set_defaults(func=cmd_curve)
    return parser


EXIT_CODES = (
    (FitError, 4),
    (DivergentEntropy, 3),
    (UsageError, 2),
    (InvalidParameterError, 2),
    (DomainError, 2),
    (CRMHEError, 2),
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        record = args.func(args)
    except CRMHEError as exc:
        code = next(c for cls, c in EXIT_CODES if isinstance(exc, cls))
        print(f"crmhe {args.command}: {exc}", file=sys.stderr)
        return code
    if args.csv:
        text = render_csv(record["results"])
    elif args.json:
        text = render_json(record)
    else:
        text = render_table(record)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
