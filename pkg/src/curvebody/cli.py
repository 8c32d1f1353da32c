"""Command-line entry point.

Subcommands::

    curvebody check             <config.json> [--out DIR]
    curvebody simulate-reduced  <config.json> [--out DIR] [--force] [--strict-b]
    curvebody simulate-full     <config.json> [--out DIR] [--project]
    curvebody cross-validate    <config.json> [--out DIR] [--force]
    curvebody scan              <scan.json>   [--out DIR]

Exit codes: 0 success/admissible, 1 criterion check failed, 2 usage or
validation error, 3 runtime singularity (or step collapse).

Configs are single JSON documents with a top-level ``"schema_version":
"1"``.  Angles are radians; a ``"regular": {"n": N, "phase": p}`` shorthand
generates the polygon angles internally.  Emitted CSV uses the shortest
round-trip decimal form of each 64-bit float, so identical configs give
byte-identical files.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import diagnostics, dynamics, model
from .errors import CurvebodyError, ValidationError
from .integrator import COMPLETED, IntegrationSettings, integrate_adaptive

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_SINGULAR = 3


# --- config ingestion --------------------------------------------------------


@dataclass
class RunConfig:
    """Everything needed to reproduce one run."""

    polygon: model.PolygonConfig
    initial: dict | None
    settings: IntegrationSettings
    t_span: tuple
    rho_grid: np.ndarray | None
    tol_b: float
    tol_c: float
    max_deviation: float
    strict_b: bool
    project: bool
    z_sign: int
    raw: dict

    def initial_state(self):
        if self.initial is None:
            raise ValidationError("config lacks an 'initial' section")
        return model.synthesize_initial(
            self.polygon,
            rho0=self.initial["rho0"],
            rho_dot0=self.initial.get("rho_dot0", 0.0),
            theta_dot0=self.initial.get("theta_dot0", 0.0),
            z_sign=self.z_sign,
        )


def _require(cond, message):
    if not cond:
        raise ValidationError(message)


def _load_json(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {path}: {exc}") from exc
    _require(isinstance(doc, dict), "config must be a JSON object")
    _require(
        doc.get("schema_version") == SCHEMA_VERSION,
        f"config schema_version must be {SCHEMA_VERSION!r}, "
        f"got {doc.get('schema_version')!r}",
    )
    return doc


def _parse_polygon(section):
    _require(isinstance(section, dict), "'polygon' must be an object")
    sigma = section.get("sigma")
    k = section.get("k", 3)
    if "regular" in section:
        reg = section["regular"]
        _require(isinstance(reg, dict) and "n" in reg,
                 "'regular' shorthand needs {'n': N, 'phase': p}")
        n = reg["n"]
        masses = section.get("masses")
        return model.regular_polygon(
            n, phase=reg.get("phase", 0.0), masses=masses, sigma=sigma, k=k,
        )
    _require("beta" in section and "masses" in section,
             "'polygon' needs 'beta' and 'masses' (or a 'regular' shorthand)")
    return model.PolygonConfig(
        masses=section["masses"], beta=section["beta"], sigma=sigma, k=k,
    )


def load_run_config(path):
    doc = _load_json(path)
    _require("polygon" in doc, "config lacks a 'polygon' section")
    polygon = _parse_polygon(doc["polygon"])

    integration = doc.get("integration", {})
    _require(isinstance(integration, dict), "'integration' must be an object")
    try:
        settings = IntegrationSettings(**integration)
    except TypeError as exc:
        raise ValidationError(f"bad 'integration' section: {exc}") from exc

    t_span = doc.get("t_span", [0.0, 10.0])
    _require(isinstance(t_span, (list, tuple)) and len(t_span) == 2,
             "'t_span' must be [t0, t1]")

    criterion = doc.get("criterion", {})
    rho_grid = criterion.get("rho_grid")
    if rho_grid is not None:
        rho_grid = np.asarray(rho_grid, dtype=float)
        _require(rho_grid.size > 0, "'criterion.rho_grid' must be non-empty")

    initial = doc.get("initial")
    if initial is not None:
        _require(isinstance(initial, dict) and "rho0" in initial,
                 "'initial' needs at least 'rho0'")

    modes = doc.get("modes", {})
    return RunConfig(
        polygon=polygon,
        initial=initial,
        settings=settings,
        t_span=(float(t_span[0]), float(t_span[1])),
        rho_grid=rho_grid,
        tol_b=float(criterion.get("tol_b", diagnostics.DEFAULT_TOL_B)),
        tol_c=float(criterion.get("tol_c", diagnostics.DEFAULT_TOL_C)),
        max_deviation=float(doc.get("cross_validation", {}).get("max_deviation", 1e-6)),
        strict_b=bool(modes.get("strict_b", False)),
        project=bool(modes.get("project", False)),
        z_sign=int(modes.get("z_sign", 1)),
        raw=doc,
    )


# --- emission ----------------------------------------------------------------


def _fmt(x):
    return repr(float(x))


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _termination_dict(termination):
    return {
        "kind": termination.kind,
        "time": termination.time,
        "message": termination.message,
    }


def write_reduced_csv(path, trajectory, k):
    fiber = k - 2
    header = ["time", "rho", "rho_dot", "theta", "theta_dot"]
    header += [f"z_{i + 1}" for i in range(fiber)]
    header += [f"zdot_{i + 1}" for i in range(fiber)]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for t, y in zip(trajectory.times, trajectory.samples):
            fh.write(",".join([_fmt(t)] + [_fmt(v) for v in y]) + "\n")


def write_full_csv(path, trajectory, n, k):
    header = ["time"]
    for i in range(n):
        header += [f"q_{i + 1}_{c + 1}" for c in range(k)]
        header += [f"qdot_{i + 1}_{c + 1}" for c in range(k)]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for t, y in zip(trajectory.times, trajectory.samples):
            row = [_fmt(t)]
            for i in range(n):
                row += [_fmt(v) for v in y[i * k:(i + 1) * k]]
                row += [_fmt(v) for v in y[n * k + i * k: n * k + (i + 1) * k]]
            fh.write(",".join(row) + "\n")


def criterion_report_dict(report, config_echo=None):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "criterion_report",
        "verdict": report.verdict,
        "first_failure": report.first_failure,
        "tol_b": report.tol_b,
        "tol_c": report.tol_c,
        "points": [
            {
                "rho": p.rho,
                "b_spread_abs": p.b_spread_abs,
                "b_spread_rel": p.b_spread_rel,
                "c_max": p.c_max,
                "error": p.error,
            }
            for p in report.points
        ],
        "note": report.note,
        "config": config_echo,
    }


def _criterion_spread_series(polygon, rho_values):
    """Relative spread of the radial coefficients at each sampled size.

    Flat at roundoff for admissible configurations; visibly large along
    off-criterion (--force) runs, which is exactly what the conservation
    plot needs to expose.  Singular sizes yield None entries.
    """
    spreads = []
    for rho in rho_values:
        try:
            terms = dynamics.criterion_terms(polygon, float(rho))
        except CurvebodyError:
            spreads.append(None)
            continue
        b = terms.b
        spreads.append(float((np.max(b) - np.min(b)) / np.max(np.abs(b))))
    return spreads


def run_summary_dict(kind, run_config, trajectory, off_criterion):
    polygon = run_config.polygon
    series = diagnostics.conservation_series(trajectory, kind, polygon)
    if kind == "reduced":
        rho = trajectory.samples[:, 0]
    else:
        rho = np.hypot(trajectory.samples[:, 0], trajectory.samples[:, 1])
    extremes = {
        "constraint_drift_max": float(np.max(series.constraint_drift)),
        "rho_min": float(np.min(rho)),
        "rho_max": float(np.max(rho)),
    }
    series_out = {
        "times": [float(t) for t in series.times],
        "constraint_drift": [float(v) for v in series.constraint_drift],
    }
    if kind == "reduced":
        series_out["criterion_spread"] = _criterion_spread_series(polygon, rho)
    if series.angular_momentum is not None:
        extremes["angular_momentum_drift_rel_max"] = diagnostics.relative_drift(
            series.angular_momentum
        )
        series_out["angular_momentum"] = [float(v) for v in series.angular_momentum]
    if series.wedge_c12 is not None:
        extremes["wedge_c12_drift_rel_max"] = diagnostics.relative_drift(
            series.wedge_c12
        )
        series_out["wedge_c12"] = [float(v) for v in series.wedge_c12]
    if series.tangency_drift is not None:
        extremes["tangency_drift_max"] = float(np.max(series.tangency_drift))
        series_out["tangency_drift"] = [float(v) for v in series.tangency_drift]
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "termination": _termination_dict(trajectory.termination),
        "off_criterion": off_criterion,
        "sigma": polygon.sigma,
        "masses": [float(v) for v in polygon.masses],
        "extremes": extremes,
        "series": series_out,
        "config": run_config.raw,
    }


# --- commands ----------------------------------------------------------------


def cmd_check(run_config, out_dir):
    report = diagnostics.criterion_report(
        run_config.polygon, run_config.rho_grid,
        tol_b=run_config.tol_b, tol_c=run_config.tol_c,
    )
    _write_json(
        os.path.join(out_dir, "report.json"),
        criterion_report_dict(report, run_config.raw),
    )
    return EXIT_OK if report.admissible else EXIT_CHECK_FAILED


def _criterion_gate(run_config, force):
    """Returns True when the run is off-criterion (forced past the gate)."""
    report = diagnostics.criterion_report(
        run_config.polygon, run_config.rho_grid,
        tol_b=run_config.tol_b, tol_c=run_config.tol_c,
    )
    if report.admissible:
        return False
    if not force:
        raise ValidationError(
            "configuration fails the existence criterion "
            f"(first failure: {report.first_failure}); use --force to run anyway"
        )
    return True


def cmd_simulate(run_config, kind, out_dir, force=False):
    polygon = run_config.polygon
    initial = run_config.initial_state()
    off_criterion = False
    if kind == "reduced":
        off_criterion = _criterion_gate(run_config, force)
        rhs = dynamics.make_reduced_rhs(polygon, strict_b=run_config.strict_b)
        y0 = dynamics.pack_reduced(initial)
        post_step = None
    else:
        full0 = model.embed(initial, polygon)
        rhs = dynamics.make_full_rhs(polygon.masses, polygon.sigma, polygon.k)
        y0 = dynamics.pack_full(full0)
        post_step = (
            dynamics.make_manifold_projection(polygon.masses, polygon.sigma, polygon.k)
            if run_config.project else None
        )
    trajectory = integrate_adaptive(
        rhs, y0, run_config.t_span, run_config.settings, post_step=post_step,
    )
    csv_path = os.path.join(out_dir, "trajectory.csv")
    if kind == "reduced":
        write_reduced_csv(csv_path, trajectory, polygon.k)
    else:
        write_full_csv(csv_path, trajectory, polygon.n, polygon.k)
    _write_json(
        os.path.join(out_dir, "summary.json"),
        run_summary_dict(kind, run_config, trajectory, off_criterion),
    )
    return EXIT_OK if trajectory.completed else EXIT_SINGULAR


def cmd_cross_validate(run_config, out_dir, force=False):
    off_criterion = _criterion_gate(run_config, force)
    initial = run_config.initial_state()
    report = diagnostics.cross_validate(
        run_config.polygon, initial, run_config.t_span,
        run_config.settings, force=True,  # gate already applied above
    )
    passed = (
        report.reduced_termination.kind == COMPLETED
        and report.full_termination.kind == COMPLETED
        and report.max_position_deviation <= run_config.max_deviation
        and report.max_velocity_deviation <= run_config.max_deviation
    )
    _write_json(os.path.join(out_dir, "report.json"), {
        "schema_version": SCHEMA_VERSION,
        "kind": "cross_validation",
        "max_position_deviation": report.max_position_deviation,
        "max_velocity_deviation": report.max_velocity_deviation,
        "residual_max": report.residual_max,
        "bound": run_config.max_deviation,
        "passed": passed,
        "off_criterion": off_criterion,
        "samples_compared": report.samples_compared,
        "reduced_termination": _termination_dict(report.reduced_termination),
        "full_termination": _termination_dict(report.full_termination),
        "config": run_config.raw,
    })
    if (report.reduced_termination.kind != COMPLETED
            or report.full_termination.kind != COMPLETED):
        return EXIT_SINGULAR
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _scan_rows(doc):
    scan = doc.get("scan")
    _require(isinstance(scan, dict), "scan config lacks a 'scan' section")
    n_values = scan.get("n_values", [])
    sigma_values = scan.get("sigma_values", [1, -1])
    perturbations = scan.get("perturbations", [0.0])
    mass_mode = scan.get("mass_mode", "equal")
    _require(mass_mode in ("equal", "random"),
             f"mass_mode must be 'equal' or 'random', got {mass_mode!r}")
    reps = int(scan.get("reps", 1))
    seed = int(scan.get("seed", 0))
    k = int(scan.get("k", 3))
    rows = []
    for n in n_values:
        for sigma in sigma_values:
            for pert in perturbations:
                for rep in range(reps):
                    rows.append({
                        "n": int(n), "sigma": int(sigma),
                        "perturbation": float(pert), "rep": rep,
                        "mass_mode": mass_mode, "seed": seed, "k": k,
                    })
    _require(rows, "scan config expands to zero rows")
    grid = scan.get("rho_grid")
    tol_b = float(scan.get("tol_b", diagnostics.DEFAULT_TOL_B))
    tol_c = float(scan.get("tol_c", diagnostics.DEFAULT_TOL_C))
    return rows, grid, tol_b, tol_c


def _scan_one(row, grid, tol_b, tol_c):
    out = dict(row)
    out.update({"b_spread_rel_max": "", "c_max": "", "verdict": "", "error": ""})
    try:
        if row["mass_mode"] == "random":
            rng = np.random.default_rng(
                [row["seed"], row["n"], row["sigma"] % 3,
                 int(row["perturbation"] * 1e6), row["rep"]]
            )
            masses = rng.uniform(0.5, 2.0, row["n"])
        else:
            masses = None
        config = model.regular_polygon(
            row["n"], masses=masses, sigma=row["sigma"], k=row["k"],
        )
        if row["perturbation"] != 0.0:
            beta = np.array(config.beta)
            beta[-1] += row["perturbation"]
            config = model.PolygonConfig(
                masses=config.masses, beta=beta,
                sigma=config.sigma, k=config.k,
            )
        rho_grid = grid if grid is not None else diagnostics.default_rho_grid(
            row["sigma"]
        )
        report = diagnostics.criterion_report(
            config, rho_grid, tol_b=tol_b, tol_c=tol_c,
        )
        valid = [p for p in report.points if p.error is None]
        out["b_spread_rel_max"] = _fmt(max(p.b_spread_rel for p in valid))
        out["c_max"] = _fmt(max(p.c_max for p in valid))
        out["verdict"] = report.verdict
    except CurvebodyError as exc:
        out["verdict"] = "error"
        out["error"] = str(exc).replace(",", ";")
    return out


def cmd_scan(doc, out_dir):
    rows, grid, tol_b, tol_c = _scan_rows(doc)
    threads = int(os.environ.get("CURVEBODY_THREADS", "1"))
    work = [(row, grid, tol_b, tol_c) for row in rows]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda a: _scan_one(*a), work))
    else:
        results = [_scan_one(*a) for a in work]
    columns = [
        "n", "sigma", "mass_mode", "perturbation", "rep",
        "b_spread_rel_max", "c_max", "verdict", "error",
    ]
    with open(os.path.join(out_dir, "scan.csv"), "w") as fh:
        fh.write(",".join(columns) + "\n")
        for row in results:
            cells = []
            for col in columns:
                v = row[col]
                cells.append(_fmt(v) if isinstance(v, float) else str(v))
            fh.write(",".join(cells) + "\n")
    return EXIT_OK


# --- argument parsing --------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="curvebody",
        description=(
            "Numerical laboratory for rotopulsating orbits of the n-body "
            "problem on constant-curvature manifolds."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in [
        ("check", "evaluate the existence criterion on a size grid"),
        ("simulate-reduced", "integrate the reduced (rho, theta, Z) system"),
        ("simulate-full", "integrate the ambient equations of motion"),
        ("cross-validate", "integrate both systems and compare them"),
        ("scan", "batch criterion verdicts over families of configurations"),
    ]:
        p = sub.add_parser(name, help=blurb)
        p.add_argument("config", help="path to a JSON config")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--force", action="store_true",
                       help="run even when the criterion verdict is inadmissible")
        p.add_argument("--strict-b", action="store_true", dest="strict_b",
                       help="re-check the radial coefficient spread every step")
        p.add_argument("--project", action="store_true",
                       help="rescale full-run positions onto the manifold "
                            "after every step (alters drift diagnostics)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        out_dir = args.out
        os.makedirs(out_dir, exist_ok=True)
        if args.command == "scan":
            return cmd_scan(_load_json(args.config), out_dir)
        run_config = load_run_config(args.config)
        if args.strict_b:
            run_config.strict_b = True
        if args.project:
            run_config.project = True
        if args.command == "check":
            return cmd_check(run_config, out_dir)
        if args.command == "simulate-reduced":
            return cmd_simulate(run_config, "reduced", out_dir, force=args.force)
        if args.command == "simulate-full":
            return cmd_simulate(run_config, "full", out_dir, force=args.force)
        if args.command == "cross-validate":
            return cmd_cross_validate(run_config, out_dir, force=args.force)
        raise ValidationError(f"unknown command {args.command!r}")
    except CurvebodyError as exc:
        print(f"curvebody {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
