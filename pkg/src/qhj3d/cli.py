"""Command-line front end: verification sweeps, trajectories, metric reports.

    qhj3d verify <scenario> [--grid NX,NY,NZ] [--out report.json]
    qhj3d trajectory <scenario> [--r0 x,y,z] [--t-end T] [--out traj.csv]
                                [--plot-script traj.gp]
    qhj3d metric <scenario> --at "x,y,z[;x,y,z...]" [--out metric.json]

Exit codes: 0 success, 2 scenario validation failure, 3 numerical failure
(threshold violation, singularity, step underflow), 4 I/O failure.

All file writes are atomic (temp file + rename), trajectories are CSV with
a fixed header, and machine-readable reports are JSON; numbers keep full
double precision so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import __version__
from .dynamics import (
    SINGULARITY,
    IntegratorConfig,
    Termination,
    Trajectory,
    integrate_first_order,
)
from .errors import (
    NodalPoint,
    NodeSingularity,
    NonRiemannianPoint,
    OutOfDomain,
    QhjError,
    ScenarioError,
)
from .hj_core import continuity_identity_residual, qshje_residual, sample
from .metric import TWELVE_EQUATION_LABELS, canonical_jacobian, metric_at, verify_transformation
from .scenario import Scenario, build_action, parse_point_list, parse_scenario
from .schrodinger import wronskian

CSV_HEADER = "t,x,y,z,vx,vy,vz,dS0dx,dS0dy,dS0dz,law_residual,energy_residual"


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".qhj3d-", dir=directory)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _g17(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    grid: tuple[int, int, int]
    bounds: tuple[tuple[float, float], ...]
    points_total: int
    points_evaluated: int
    nodal_skips: int
    singular_skips: int
    max_qshje: float
    mean_qshje: float
    max_continuity_identity: float
    max_continuity_divergence: float
    wronskian_drift: tuple[float, float, float]
    signature_census: dict[str, int]
    qshje_tol: float
    continuity_tol: float
    wronskian_tol: float
    passed: bool

    def to_dict(self):
        return dataclasses.asdict(self)


def run_verify(scenario: Scenario, grid=None, out=None) -> VerificationReport:
    """Sweep a grid: residuals, Wronskian drift, metric signature census.

    Nodal and momentum-singular points are skipped and counted; the skip
    counts plus the census total the grid size."""
    action = build_action(scenario)
    spec = scenario.verify
    grid = tuple(grid) if grid is not None else spec.grid
    axes_pts = [np.linspace(lo, hi, n) for (lo, hi), n in zip(spec.bounds, grid)]

    total = evaluated = nodal = singular = 0
    max_q = mean_q = max_ci = 0.0
    census: dict[str, int] = {}
    for x in axes_pts[0]:
        for y in axes_pts[1]:
            for z in axes_pts[2]:
                total += 1
                r = (float(x), float(y), float(z))
                try:
                    q = abs(qshje_residual(action, r))
                    ci = continuity_identity_residual(action, r)
                    met = metric_at(action, r)
                except NodalPoint:
                    nodal += 1
                    continue
                except (NodeSingularity, OutOfDomain):
                    singular += 1
                    continue
                evaluated += 1
                max_q = max(max_q, q)
                mean_q += q
                max_ci = max(max_ci, ci)
                sig = "".join(met.signature)
                census[sig] = census.get(sig, 0) + 1
    mean_q = mean_q / evaluated if evaluated else math.nan

    # Divergence-mode continuity on a coarse subsample (finite differences
    # need interior room, so points at the bounds are inset toward center).
    max_div = 0.0
    mids = [0.5 * (lo + hi) for lo, hi in spec.bounds]
    for x in np.linspace(*spec.bounds[0], 3):
        for y in np.linspace(*spec.bounds[1], 3):
            for z in np.linspace(*spec.bounds[2], 3):
                r = tuple(m + (float(c) - m) * (1.0 - 1e-3)
                          for c, m in zip((x, y, z), mids))
                try:
                    max_div = max(max_div, continuity_identity_residual(action, r, mode="divergence"))
                except QhjError:
                    continue

    drifts = []
    for pair, (lo, hi) in zip(action.field.pairs, spec.bounds):
        p_lo = max(lo, pair.domain[0])
        p_hi = min(hi, pair.domain[1])
        xs = np.linspace(p_lo, p_hi, 101)
        ref = pair.wronskian_ref
        drift = max(abs(wronskian(pair, float(xx)) - ref) for xx in xs)
        drifts.append(drift / max(abs(ref), 1e-300))
    drifts = tuple(drifts)

    passed = (max_q < spec.qshje_tol and max_ci < spec.continuity_tol
              and all(d < spec.wronskian_tol for d in drifts))
    report = VerificationReport(
        grid=grid, bounds=spec.bounds, points_total=total,
        points_evaluated=evaluated, nodal_skips=nodal, singular_skips=singular,
        max_qshje=max_q, mean_qshje=mean_q, max_continuity_identity=max_ci,
        max_continuity_divergence=max_div, wronskian_drift=drifts,
        signature_census=census, qshje_tol=spec.qshje_tol,
        continuity_tol=spec.continuity_tol, wronskian_tol=spec.wronskian_tol,
        passed=passed,
    )
    if out:
        _atomic_write(out, json.dumps(report.to_dict(), indent=2) + "\n")
    return report


# ---------------------------------------------------------------------------
# trajectory
# ---------------------------------------------------------------------------

def _trajectory_csv(action, trajectory: Trajectory) -> str:
    lines = [CSV_HEADER]
    for i, st in enumerate(trajectory.states):
        s = sample(action, st.position)
        row = [st.t, *st.position, *st.velocity, *s.grad_s0,
               trajectory.law_residuals[i], trajectory.energy_residuals[i]]
        lines.append(",".join(_g17(v) for v in row))
    return "\n".join(lines) + "\n"


def _termination_dict(term: Termination):
    return {
        "status": term.status,
        "kind": term.kind,
        "t": term.t,
        "position": list(term.position) if term.position is not None else None,
    }


def run_trajectory(scenario: Scenario, r0=None, t_end=None, out="trajectory.csv",
                   plot_script=None) -> Trajectory:
    """Integrate the scenario trajectory and write CSV + termination sidecar.

    A starting point on a node (or momentum singularity) yields an empty
    trajectory whose termination records a singularity event at t = 0."""
    action = build_action(scenario)
    spec = scenario.trajectory
    r0 = tuple(r0) if r0 is not None else spec.r0
    config = IntegratorConfig(
        t_end=float(t_end) if t_end is not None else spec.t_end,
        rel_tol=spec.rel_tol, abs_tol=spec.abs_tol,
        max_step=spec.max_step, singularity_eps=spec.singularity_eps,
    )
    try:
        trajectory = integrate_first_order(action, r0, config)
    except (NodalPoint, NodeSingularity) as exc:
        kind = "amplitude" if isinstance(exc, NodalPoint) else "node"
        trajectory = Trajectory(
            states=[], law_residuals=np.array([]), energy_residuals=np.array([]),
            termination=Termination(SINGULARITY, kind=kind, t=0.0, position=tuple(r0)),
        )

    _atomic_write(out, _trajectory_csv(action, trajectory))
    sidecar = os.path.splitext(out)[0] + ".json"
    payload = {
        "termination": _termination_dict(trajectory.termination),
        "r0": list(r0),
        "t_end": config.t_end,
        "states": len(trajectory.states),
        "max_law_residual": trajectory.max_law_residual if trajectory.states else None,
        "max_energy_residual": trajectory.max_energy_residual if trajectory.states else None,
    }
    _atomic_write(sidecar, json.dumps(payload, indent=2) + "\n")
    if plot_script:
        _atomic_write(plot_script, _gnuplot_script(out))
    return trajectory


def _gnuplot_script(csv_path: str) -> str:
    name = os.path.basename(csv_path)
    return "\n".join([
        f"# trajectory plot for {name}",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 't'",
        f"plot '{name}' using 1:2 with lines, \\",
        f"     '{name}' using 1:3 with lines, \\",
        f"     '{name}' using 1:4 with lines",
    ]) + "\n"


# ---------------------------------------------------------------------------
# metric
# ---------------------------------------------------------------------------

def run_metric(scenario: Scenario, points, out=None) -> dict:
    """Metric, canonical Jacobian and 12-equation residuals per point."""
    action = build_action(scenario)
    rows = []
    for p in points:
        entry: dict = {"point": list(p)}
        try:
            met = metric_at(action, p)
        except QhjError as exc:
            entry["error"] = f"{type(exc).__name__}: {exc}"
            rows.append(entry)
            continue
        entry["a_upper"] = met.a_upper.tolist()
        entry["a_lower"] = met.a_lower.tolist()
        entry["signature"] = "".join(met.signature)
        try:
            jac = canonical_jacobian(met)
        except NonRiemannianPoint as exc:
            entry["jacobian"] = None
            entry["error"] = f"NonRiemannianPoint: signature {''.join(exc.signature)}"
        else:
            residuals = verify_transformation(jac, met)
            entry["jacobian"] = jac.entries.tolist()
            entry["residuals"] = dict(zip(TWELVE_EQUATION_LABELS, residuals.tolist()))
            entry["max_residual"] = float(np.max(residuals))
        rows.append(entry)
    report = {"points": rows}
    if out:
        _atomic_write(out, json.dumps(report, indent=2) + "\n")
    return report


def _print_metric_report(report):
    for entry in report["points"]:
        point = ", ".join(_g17(c) for c in entry["point"])
        print(f"point ({point}):")
        if "a_upper" not in entry:
            print(f"  {entry['error']}")
            continue
        print(f"  a_upper   = {entry['a_upper']}")
        print(f"  a_lower   = {entry['a_lower']}")
        print(f"  signature = {entry['signature']}")
        if entry.get("jacobian") is None:
            print(f"  {entry['error']}")
        else:
            for row in entry["jacobian"]:
                print(f"  J {row}")
            print(f"  max 12-equation residual = {entry['max_residual']:.3e}")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _load_scenario(path: str) -> Scenario:
    with open(path) as handle:
        return parse_scenario(handle.read())


def _build_parser():
    parser = argparse.ArgumentParser(prog="qhj3d",
                                     description="Quantum trajectory engine driven by scenario files")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="residual/metric sweep over a grid")
    p_verify.add_argument("scenario")
    p_verify.add_argument("--grid", help="NX,NY,NZ grid point counts")
    p_verify.add_argument("--out", default="verify_report.json")

    p_traj = sub.add_parser("trajectory", help="integrate a quantum trajectory")
    p_traj.add_argument("scenario")
    p_traj.add_argument("--r0", help="starting point x,y,z")
    p_traj.add_argument("--t-end", type=float, dest="t_end")
    p_traj.add_argument("--out", default="trajectory.csv")
    p_traj.add_argument("--plot-script", dest="plot_script",
                        help="write a gnuplot script referencing the CSV")

    p_metric = sub.add_parser("metric", help="metric and Jacobian at points")
    p_metric.add_argument("scenario")
    p_metric.add_argument("--at", required=True, help="x,y,z[;x,y,z...]")
    p_metric.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        scenario = _load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4

    try:
        if args.command == "verify":
            grid = None
            if args.grid:
                grid = tuple(int(v) for v in args.grid.split(","))
                if len(grid) != 3:
                    print("--grid needs NX,NY,NZ", file=sys.stderr)
                    return 2
            report = run_verify(scenario, grid=grid, out=args.out)
            print(f"grid {report.grid} over {report.bounds}")
            print(f"points: {report.points_evaluated} evaluated, "
                  f"{report.nodal_skips} nodal, {report.singular_skips} singular")
            print(f"max |qshje residual|      = {report.max_qshje:.3e}  (tol {report.qshje_tol:g})")
            print(f"max continuity (identity) = {report.max_continuity_identity:.3e}  (tol {report.continuity_tol:g})")
            print(f"max continuity (diverg.)  = {report.max_continuity_divergence:.3e}")
            print(f"wronskian drift per axis  = {[f'{d:.3e}' for d in report.wronskian_drift]}")
            print(f"signature census          = {report.signature_census}")
            print("PASS" if report.passed else "FAIL")
            return 0 if report.passed else 3

        if args.command == "trajectory":
            r0 = tuple(float(v) for v in args.r0.split(",")) if args.r0 else None
            if r0 is not None and len(r0) != 3:
                print("--r0 needs x,y,z", file=sys.stderr)
                return 2
            trajectory = run_trajectory(scenario, r0=r0, t_end=args.t_end,
                                        out=args.out, plot_script=args.plot_script)
            term = trajectory.termination
            print(f"{len(trajectory.states)} states -> {args.out}")
            print(f"termination: {term.status}" + (f" ({term.kind})" if term.kind else "")
                  + (f" at t = {term.t:.6g}" if term.t is not None else ""))
            if trajectory.states:
                print(f"max law residual    = {trajectory.max_law_residual:.3e}")
                print(f"max energy residual = {trajectory.max_energy_residual:.3e}")
            return 3 if term.status == SINGULARITY else 0

        if args.command == "metric":
            points = parse_point_list(args.at, "--at")
            report = run_metric(scenario, points, out=args.out)
            _print_metric_report(report)
            return 0
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except QhjError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
