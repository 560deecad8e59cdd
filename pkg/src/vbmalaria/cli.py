"""Command-line front end.

Every analysis is a subcommand; parameters come from a named default or a
JSON file, with ``--set key=value`` overrides (aliases: b, pi). Tabular
results are CSV with a header row, reports are JSON, and numbers use the
shortest round-trip decimal representation, so identical argv and seed give
byte-identical outputs. ``--plot PATH.png`` renders a figure alongside the
delimited output where a figure makes sense.

Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bifurcation, equilibria, model, sensitivity, simulate, stability
from .errors import ParameterError
from .params import ModelParams, load_params


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class RunConfig:
    """Shared per-invocation settings resolved from argv."""

    params: ModelParams
    output: str | None
    fmt: str | None  # None means the subcommand's natural format
    seed: int


def _run_config(args) -> RunConfig:
    params = load_params(args.params)
    overrides = {}
    for item in args.set or []:
        if "=" not in item:
            raise ParameterError(f"--set expects key=value; got {item!r}")
        key, _, value = item.partition("=")
        try:
            overrides[key.strip()] = float(value)
        except ValueError:
            raise ParameterError(f"--set {key.strip()}: {value!r} is not a number") from None
    if overrides:
        params = params.replace(**overrides)
    return RunConfig(params=params, output=args.output, fmt=args.format,
                     seed=args.seed)


def _build_params(args) -> ModelParams:
    return _run_config(args).params


def _report(doc: dict, args) -> None:
    """Emit a report document as JSON (default) or flat field,value CSV."""
    if getattr(args, "format", None) == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["field", "value"])
        for key, value in doc.items():
            cell = _fmt(value) if isinstance(value, float) else json.dumps(value)
            writer.writerow([key, cell])
        _emit(buf.getvalue().rstrip("\n"), args.output)
    else:
        _emit(json.dumps(doc, indent=2), args.output)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text + ("" if text.endswith("\n") else "\n"))
    else:
        print(text)


def _plot_path(args, fallback: str) -> str | None:
    """Resolve --plot: absent -> None; bare flag -> next to the output."""
    if args.plot is None:
        return None
    if args.plot:
        return args.plot
    if args.output:
        return str(Path(args.output).with_suffix(".png"))
    return fallback


def _float_list(raw: str, lo: float, hi: float, n: int) -> np.ndarray:
    if raw:
        return np.array([float(x) for x in raw.split(",")])
    return np.linspace(lo, hi, n)


def _cmd_r0(args) -> int:
    params = _build_params(args)
    _emit(_fmt(equilibria.basic_reproduction_number(params)), args.output)
    return 0


def _cmd_equilibria(args) -> int:
    params = _build_params(args)
    _report(equilibria.endemic_equilibria(params).to_dict(), args)
    return 0


def _cmd_stability(args) -> int:
    params = _build_params(args)
    eq = equilibria.endemic_equilibria(params)
    dfe_verdict = stability.classify(params, eq.dfe, which="full")
    doc = {
        "r0": eq.r0,
        "dfe": dfe_verdict.to_dict(),
        "endemic": [
            {"i_v_star": e.state.i_v,
             **stability.classify(params, e.state, which="full").to_dict()}
            for e in eq.endemic
        ],
    }
    _report(doc, args)
    return 0


def _cmd_bifurcate(args) -> int:
    params = _build_params(args)
    _report(bifurcation.bifurcation_report(params).to_dict(), args)
    return 0


def _cmd_sweep(args) -> int:
    params = _build_params(args)
    grid = _float_list(args.p2_values, args.p2_min, args.p2_max, args.p2_points)
    points = bifurcation.sweep_branch(params, grid)
    if args.format == "json":
        doc = {"saddle_node_r0": bifurcation.saddle_node_r0(params),
               "points": [
                   {"p2": pt.p2, "r0": pt.r0,
                    "roots": [{"i_v_star": r.i_v_star, "stable": r.stable,
                               "dominant_eigenvalue": r.dominant_eigenvalue}
                              for r in pt.roots]}
                   for pt in points]}
        _emit(json.dumps(doc, indent=2), args.output)
    else:
        out = args.output or "branch.csv"
        bifurcation.write_branch_csv(points, out)
        summary = {"points": len(points),
                   "saddle_node_r0": bifurcation.saddle_node_r0(params),
                   "branch_csv": str(out)}
        print(json.dumps(summary, indent=2))
    plot = _plot_path(args, "branch.png")
    if plot:
        from . import plots
        plots.plot_branch_diagram(points, plot)
    return 0


def _cmd_simulate(args) -> int:
    params = _build_params(args)
    ic = np.array([float(x) for x in args.ic.split(",")])
    samples = np.linspace(0.0, args.t_end, args.samples) if args.samples else None
    traj = simulate.integrate(params, args.system, ic, args.t_end,
                              rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                              sample_times=samples)
    if args.format == "json":
        columns = (("s_h", 0), ("i_h", 1), ("s_v", 2), ("i_v", 3)) \
            if traj.system == "full" else (("s_h", 0), ("i_h", 1), ("i_v", 2))
        doc = {"system": traj.system,
               "steps_accepted": traj.steps_accepted,
               "steps_rejected": traj.steps_rejected,
               "t": [float(t) for t in traj.times]}
        for name, idx in columns:
            doc[name] = [float(v) for v in traj.states[:, idx]]
        _emit(json.dumps(doc, indent=2), args.output)
    else:
        out = args.output or "trajectory.csv"
        simulate.write_trajectory_csv(traj, out)
        print(json.dumps({"rows": len(traj.times),
                          "steps_accepted": traj.steps_accepted,
                          "steps_rejected": traj.steps_rejected,
                          "trajectory_csv": str(out)}, indent=2))
    plot = _plot_path(args, "trajectory.png")
    if plot:
        from . import plots
        plots.plot_trajectory(traj, plot)
    return 0


def _cmd_certify(args) -> int:
    params = _build_params(args)
    rng = np.random.default_rng(args.seed)
    cap_h = model.human_capacity(params)
    v_total = model.vector_capacity(params)
    ics = []
    for _ in range(args.trajectories):
        u = rng.uniform(0.01, 0.99, 3)
        s_h = u[0] * cap_h
        i_h = u[1] * (cap_h - s_h)
        i_v = u[2] * v_total
        ics.append(model.reduced_state(params, s_h, i_h, i_v))
    cert = stability.certify_global_stability(
        params, ics, horizon=args.horizon, sampling=args.sampling,
        keep_series=bool(args.g_series))
    _report(cert.to_dict(), args)
    if args.g_series:
        stability.write_g_series_csv(cert, args.g_series)
    plot = _plot_path(args, "certificate.png")
    if plot:
        from . import plots
        plots.plot_certificate(cert, plot)
    return 0 if cert.passed else 2


def _cmd_sensitivity(args) -> int:
    params = _build_params(args)
    _report(sensitivity.sensitivity_indices(params).to_dict(), args)
    return 0


def _cmd_surface(args) -> int:
    params = _build_params(args)
    b_max = args.b_max
    if b_max is None:
        # theta diverges where beta(b) = 0, so its default grid stops short
        b_max = 0.99 if (args.quantity == "theta" and params.beta_min == 0.0) else 1.0
    pi_vals = np.linspace(args.pi_min, args.pi_max, args.pi_points)
    b_vals = np.linspace(args.b_min, b_max, args.b_points)
    values = sensitivity.grid_surface(params, pi_vals, b_vals, args.quantity)
    if args.format == "json":
        doc = {"quantity": args.quantity,
               "pi": [float(x) for x in pi_vals],
               "b": [float(x) for x in b_vals],
               "values": [[float(v) for v in row] for row in values]}
        _emit(json.dumps(doc, indent=2), args.output)
    else:
        out = args.output or f"surface_{args.quantity}.csv"
        sensitivity.write_surface_csv(pi_vals, b_vals, values, out)
        print(json.dumps({"shape": list(values.shape), "surface_csv": str(out)},
                         indent=2))
    plot = _plot_path(args, f"surface_{args.quantity}.png")
    if plot:
        from . import plots
        plots.plot_surface(pi_vals, b_vals, values, args.quantity, plot)
    return 0


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", default="table1",
                        help="named default ('table1') or JSON file path")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a parameter field (aliases: b, pi)")
    common.add_argument("--output", help="write the main artifact here instead of stdout")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for any randomized choices")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="override the subcommand's natural output format")
    common.add_argument("--plot", metavar="PATH.png", nargs="?", const="",
                        help="also render a figure next to the output "
                             "(path optional: defaults to the output name with .png)")

    parser = argparse.ArgumentParser(
        prog="vbmalaria",
        description="Vector-bias malaria model with bed-net control: "
                    "analysis and certification toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("r0", parents=[common], help="basic reproduction number")
    sub.add_parser("equilibria", parents=[common],
                   help="disease-free + endemic equilibria with case label (JSON)")
    sub.add_parser("stability", parents=[common],
                   help="eigenvalue classification of every equilibrium (JSON)")
    sub.add_parser("bifurcate", parents=[common],
                   help="criticality report: p2_crit, theta, direction (JSON)")

    p = sub.add_parser("sweep", parents=[common],
                       help="endemic branch over a p2 grid (CSV + saddle node)")
    p.add_argument("--p2-min", type=float, default=0.01)
    p.add_argument("--p2-max", type=float, default=1.0)
    p.add_argument("--p2-points", type=int, default=100)
    p.add_argument("--p2-values", help="explicit comma-separated p2 grid")

    p = sub.add_parser("simulate", parents=[common], help="integrate one trajectory (CSV)")
    p.add_argument("--system", choices=("full", "reduced"), default="full")
    p.add_argument("--ic", required=True,
                   help="comma-separated initial compartments (4 full / 3 reduced)")
    p.add_argument("--t-end", type=float, default=2000.0)
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--abs-tol", type=float, default=1e-8)
    p.add_argument("--samples", type=int, default=201,
                   help="output rows (0 = record every accepted step)")

    p = sub.add_parser("certify", parents=[common],
                       help="global-stability certificate over random interior starts (JSON)")
    p.add_argument("--trajectories", type=int, default=20)
    p.add_argument("--horizon", type=float, default=2000.0)
    p.add_argument("--sampling", type=float, default=1.0)
    p.add_argument("--g-series", metavar="PATH.csv",
                   help="also write the sampled g1/g2 series")

    sub.add_parser("sensitivity", parents=[common],
                   help="derivatives, indices, coverage thresholds (JSON)")

    p = sub.add_parser("surface", parents=[common], help="R0 or theta over a (pi, b) grid (CSV)")
    p.add_argument("--quantity", choices=("R0", "theta"), default="R0")
    p.add_argument("--pi-min", type=float, default=1.0)
    p.add_argument("--pi-max", type=float, default=5.0)
    p.add_argument("--pi-points", type=int, default=101)
    p.add_argument("--b-min", type=float, default=0.0)
    p.add_argument("--b-max", type=float, default=None)
    p.add_argument("--b-points", type=int, default=101)

    return parser


_HANDLERS = {
    "r0": _cmd_r0,
    "equilibria": _cmd_equilibria,
    "stability": _cmd_stability,
    "bifurcate": _cmd_bifurcate,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "certify": _cmd_certify,
    "sensitivity": _cmd_sensitivity,
    "surface": _cmd_surface,
}


def run(argv=None) -> int:
    """Entry point; returns the process exit status."""
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(run())
