"""Command-line front end.

Exit codes: 0 success, 1 assumption violation, 2 tolerance infeasible,
3 I/O, parse or usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Any

import numpy as np

from . import builtin, linalg
from .errors import (
    ContractError,
    FullRowRankError,
    LyaptrackError,
    NotSchurStableError,
    NumericOverflowError,
    ShapeError,
    SingularMatrixError,
    SynthesisError,
)
from .linalg import Matrix
from .lyapunov import schur_certificate
from .simulator import (
    DEFAULT_HORIZON,
    Disturbance,
    Trajectory,
    simulate,
    simulate_perturbed,
    verify_theorem1,
)
from .synthesis import (
    PlantModel,
    ReferenceModel,
    TrackingGains,
    is_controllable,
    place_gain,
    tracking_gains,
    validate_gains,
)
from .tolerance import (
    Certificate,
    ToleranceSpec,
    check_tolerable,
    minimal_tolerance_time,
    synthesize_tolerant_gain,
    trajectory_certificate,
)

EXIT_OK = 0
EXIT_ASSUMPTION = 1
EXIT_INFEASIBLE = 2
EXIT_IO = 3


class ConfigError(LyaptrackError, ValueError):
    """The configuration file is unreadable, malformed or inconsistent."""


class UsageError(LyaptrackError):
    pass


@dataclass(frozen=True)
class RunConfig:
    plant: PlantModel
    reference: ReferenceModel
    gain_mode: str
    a_cl: Matrix | None = None
    K: Matrix | None = None
    q: Matrix | None = None
    horizon: int = DEFAULT_HORIZON
    disturbance: Disturbance | None = None
    tolerance: ToleranceSpec | None = None


# -- configuration -----------------------------------------------------------

def _section(doc: dict, key: str, where: str = "") -> dict:
    name = f"{where}{key}"
    if key not in doc:
        raise ConfigError(f"missing field '{name}'")
    value = doc[key]
    if not isinstance(value, dict):
        raise ConfigError(f"field '{name}' must be an object")
    return value


def _matrix(doc: dict, key: str, where: str, required: bool = True) -> Matrix | None:
    name = f"{where}{key}"
    if key not in doc:
        if required:
            raise ConfigError(f"missing field '{name}'")
        return None
    try:
        return linalg.as_matrix(doc[key], name)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"field '{name}': {exc}") from exc


def config_from_dict(doc: Any) -> RunConfig:
    """Validate a decoded JSON document and build a :class:`RunConfig`."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    plant_doc = _section(doc, "plant")
    ref_doc = _section(doc, "reference")
    try:
        plant = PlantModel(*(_matrix(plant_doc, k, "plant.") for k in ("A", "B", "C", "x0")))
    except ShapeError as exc:
        raise ConfigError(f"plant.{exc}") from exc
    try:
        reference = ReferenceModel(*(_matrix(ref_doc, k, "reference.") for k in ("Am", "Cm", "x0m")))
        reference.check_against(plant)
    except ShapeError as exc:
        raise ConfigError(f"reference.{exc}") from exc

    gain_doc = _section(doc, "gain")
    mode = gain_doc.get("mode")
    n, m = plant.n, plant.m
    q = _matrix(gain_doc, "q", "gain.", required=False)
    if q is not None and q.shape != (n, n):
        raise ConfigError(f"field 'gain.q': expected shape {n}x{n}, got {q.shape[0]}x{q.shape[1]}")
    a_cl = K = None
    if mode == "target":
        if "K" in gain_doc:
            raise ConfigError("field 'gain': mode 'target' does not accept 'K'")
        a_cl = _matrix(gain_doc, "a_cl", "gain.")
        if a_cl.shape != (n, n):
            raise ConfigError(f"field 'gain.a_cl': expected shape {n}x{n}, got {a_cl.shape[0]}x{a_cl.shape[1]}")
    elif mode == "explicit":
        if "a_cl" in gain_doc:
            raise ConfigError("field 'gain': mode 'explicit' does not accept 'a_cl'")
        K = _matrix(gain_doc, "K", "gain.")
        if K.shape != (m, n):
            raise ConfigError(f"field 'gain.K': expected shape {m}x{n}, got {K.shape[0]}x{K.shape[1]}")
    else:
        raise ConfigError("field 'gain.mode' must be 'target' or 'explicit'")

    sim_doc = doc.get("simulation", {})
    if not isinstance(sim_doc, dict):
        raise ConfigError("field 'simulation' must be an object")
    horizon = sim_doc.get("horizon", DEFAULT_HORIZON)
    if not isinstance(horizon, int) or isinstance(horizon, bool) or horizon < 1:
        raise ConfigError("field 'simulation.horizon' must be a positive integer")
    disturbance = None
    if sim_doc.get("disturbance") is not None:
        d_doc = _section(sim_doc, "disturbance", "simulation.")
        if not isinstance(d_doc.get("alpha"), (int, float)) or isinstance(d_doc.get("alpha"), bool):
            raise ConfigError("field 'simulation.disturbance.alpha' must be a number")
        beta = _matrix(d_doc, "beta", "simulation.disturbance.")
        if beta.shape != (n, 1):
            raise ConfigError(f"field 'simulation.disturbance.beta': expected shape {n}x1, got {beta.shape[0]}x{beta.shape[1]}")
        try:
            disturbance = Disturbance(d_doc["alpha"], beta)
        except ContractError as exc:
            raise ConfigError(f"field 'simulation.disturbance.alpha': {exc}") from exc

    tolerance = None
    if doc.get("tolerance") is not None:
        t_doc = _section(doc, "tolerance")
        try:
            tolerance = ToleranceSpec(float(t_doc["epsilon"]), t_doc.get("T", 0))
        except KeyError as exc:
            raise ConfigError("missing field 'tolerance.epsilon'") from exc
        except (ContractError, TypeError, ValueError) as exc:
            raise ConfigError(f"field 'tolerance': {exc}") from exc

    return RunConfig(plant, reference, mode, a_cl, K, q, horizon, disturbance, tolerance)


def parse_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return config_from_dict(doc)


def resolve_gain(cfg: RunConfig) -> Matrix:
    """Feedback gain from the config; explicit gains must give a Schur-stable loop."""
    if cfg.gain_mode == "target":
        return place_gain(cfg.plant, cfg.a_cl)
    a_cl = cfg.plant.A + cfg.plant.B @ cfg.K
    if not schur_certificate(a_cl).stable:
        raise NotSchurStableError("explicit K gives a closed loop that is not Schur stable")
    return cfg.K


def build_gains(cfg: RunConfig) -> TrackingGains:
    return tracking_gains(cfg.plant, cfg.reference, resolve_gain(cfg), cfg.q)


def run_simulation(cfg: RunConfig, gains: TrackingGains, horizon: int | None = None) -> Trajectory:
    horizon = cfg.horizon if horizon is None else horizon
    if cfg.disturbance is None:
        return simulate(cfg.plant, cfg.reference, gains, horizon)
    return simulate_perturbed(cfg.plant, cfg.reference, gains, cfg.disturbance, horizon)


# -- output ------------------------------------------------------------------

def fmt(value: float) -> str:
    return f"{value:.17g}"


def trajectory_header(traj: Trajectory) -> list[str]:
    n, m = traj.plant.n, traj.plant.m
    nm, p = traj.reference.nm, traj.plant.p
    return (
        ["i"]
        + [f"x_{k}" for k in range(n)]
        + [f"xm_{k}" for k in range(nm)]
        + [f"xt_{k}" for k in range(n)]
        + [f"u_{k}" for k in range(m)]
        + [f"y_{k}" for k in range(p)]
        + [f"ym_{k}" for k in range(p)]
        + ["e_norm", "V", "dV", "cert_bound"]
    )


def _trajectory_rows(traj: Trajectory, certificate: Certificate | None):
    for s in traj.steps:
        bound = None
        if certificate is not None and s.i >= certificate.T:
            bound = certificate.bound_at(s.i)
        yield s, bound


def emit_csv(traj: Trajectory, sink: IO[str], certificate: Certificate | None = None) -> None:
    """Write one CSV row per step; numbers carry 17 significant digits."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(trajectory_header(traj))
    for s, bound in _trajectory_rows(traj, certificate):
        row = [str(s.i)]
        for vector in (s.x, s.xm, s.xtilde, s.u, s.y, s.ym):
            row.extend(fmt(v) for v in vector.ravel())
        row.append(fmt(s.e_norm))
        row.append(fmt(s.V))
        row.append("" if s.dV is None else fmt(s.dV))
        row.append("" if bound is None else fmt(bound))
        writer.writerow(row)


def emit_json(traj: Trajectory, sink: IO[str], certificate: Certificate | None = None) -> None:
    header = trajectory_header(traj)
    records = []
    for s, bound in _trajectory_rows(traj, certificate):
        values: list[Any] = [s.i]
        for vector in (s.x, s.xm, s.xtilde, s.u, s.y, s.ym):
            values.extend(float(v) for v in vector.ravel())
        values.extend([s.e_norm, s.V, s.dV, bound])
        records.append(dict(zip(header, values)))
    json.dump({"horizon": traj.horizon, "steps": records}, sink, indent=2)
    sink.write("\n")


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _flatten(prefix: str, value: Any, out: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(value, np.ndarray):
        for (r, c), v in np.ndenumerate(np.atleast_2d(value)):
            out.append((f"{prefix}[{r},{c}]", fmt(float(v))))
    elif isinstance(value, (list, tuple)):
        for k, v in enumerate(value):
            _flatten(f"{prefix}[{k}]", v, out)
    elif isinstance(value, bool) or value is None:
        out.append((prefix, "" if value is None else str(value).lower()))
    elif isinstance(value, (float, np.floating)):
        out.append((prefix, fmt(float(value))))
    else:
        out.append((prefix, str(value)))


def emit_mapping(mapping: dict, sink: IO[str], fmt_name: str) -> None:
    """Write a nested mapping as two-column ``key,value`` CSV or as JSON."""
    if fmt_name == "json":
        json.dump(_jsonable(mapping), sink, indent=2)
        sink.write("\n")
        return
    rows: list[tuple[str, str]] = []
    _flatten("", mapping, rows)
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(rows)


def emit_trajectory(traj: Trajectory, sink: IO[str], fmt_name: str, certificate: Certificate | None) -> None:
    if fmt_name == "json":
        emit_json(traj, sink, certificate)
    else:
        emit_csv(traj, sink, certificate)


# -- commands ----------------------------------------------------------------

def _load(args) -> RunConfig:
    if args.config is None:
        raise UsageError("--config PATH is required for this command")
    return parse_config(args.config)


def _horizon(args, cfg: RunConfig) -> int:
    return cfg.horizon if args.horizon is None else args.horizon


def cmd_check(args, sink) -> int:
    cfg = _load(args)
    plant = cfg.plant
    ctrb = is_controllable(plant)
    report: dict[str, Any] = {
        "assumption1": {
            "controllable": ctrb.controllable,
            "ctrb_rank": linalg.rank(ctrb.ctrb),
            "n": plant.n,
        }
    }
    bbt = True
    try:
        linalg.solve_linear(plant.B @ plant.B.T, linalg.identity(plant.n))
    except SingularMatrixError:
        bbt = False

    a2: dict[str, Any] = {"gain_defined": False, "closed_loop_invertible": None,
                          "schur_stable": None, "RRt_invertible": None, "BBt_invertible": bbt}
    try:
        K = resolve_gain(cfg)
        a2["gain_defined"] = True
    except FullRowRankError:
        K = None
    except NotSchurStableError:
        K = cfg.K
        a2["gain_defined"] = True
    if K is not None:
        a_cl = plant.A + plant.B @ K
        a2["schur_stable"] = schur_certificate(a_cl).stable
        try:
            R = plant.C @ linalg.solve_linear(a_cl, plant.B @ K)
            a2["closed_loop_invertible"] = True
            try:
                linalg.solve_linear(R @ R.T, linalg.identity(plant.p))
                a2["RRt_invertible"] = True
            except SingularMatrixError:
                a2["RRt_invertible"] = False
        except SingularMatrixError:
            a2["closed_loop_invertible"] = False
    a2["feasible"] = bool(
        a2["gain_defined"] and a2["schur_stable"] and a2["closed_loop_invertible"]
        and a2["RRt_invertible"] and bbt
    )
    report["assumption2"] = a2
    report["passed"] = bool(ctrb.controllable and a2["feasible"])
    emit_mapping(report, sink, args.format)
    return EXIT_OK if report["passed"] else EXIT_ASSUMPTION


def _gain_report(gains: TrackingGains, cfg: RunConfig) -> dict:
    rep = validate_gains(gains, cfg.plant, cfg.reference)
    return {
        "C*Ge-Cm": rep.c_ge,
        "B*H-Ge*Am": rep.b_h,
        "a_cl*Ge-B*K*G": rep.acl_ge,
        "lyapunov": rep.lyapunov,
        "passed": rep.passed,
    }


def cmd_gains(args, sink) -> int:
    cfg = _load(args)
    gains = build_gains(cfg)
    out = {
        "K": gains.K, "R": gains.R, "G": gains.G, "Ge": gains.Ge, "H": gains.H,
        "P": gains.P, "a_cl": gains.a_cl, "residuals": _gain_report(gains, cfg),
    }
    emit_mapping(out, sink, args.format)
    return EXIT_OK


def cmd_simulate(args, sink) -> int:
    cfg = _load(args)
    gains = build_gains(cfg)
    traj = run_simulation(cfg, gains, _horizon(args, cfg))
    T = 0 if cfg.tolerance is None else min(cfg.tolerance.T, traj.horizon)
    emit_trajectory(traj, sink, args.format, trajectory_certificate(traj, T))
    return EXIT_OK


def _tolerance_spec(args, cfg: RunConfig) -> ToleranceSpec:
    epsilon = args.epsilon if args.epsilon is not None else (cfg.tolerance and cfg.tolerance.epsilon)
    T = args.T if args.T is not None else (cfg.tolerance.T if cfg.tolerance else None)
    if epsilon is None or T is None:
        raise UsageError("tolerance needs --epsilon and --T (or a 'tolerance' config section)")
    return ToleranceSpec(epsilon, T)


def _certificate_dict(cert: Certificate) -> dict:
    return {
        "gamma": cert.gamma,
        "lambda_min_P": cert.lambda_min_P,
        "lambda_max_P": cert.lambda_max_P,
        "lambda_min_Q": cert.lambda_min_Q,
        "V_T": cert.V_T,
        "C_norm": cert.C_norm,
        "T": cert.T,
        "bound_at_T": cert.bound_at(cert.T),
    }


def cmd_tolerance_check(args, sink) -> int:
    cfg = _load(args)
    spec = _tolerance_spec(args, cfg)
    gains = build_gains(cfg)
    traj = run_simulation(cfg, gains, _horizon(args, cfg))
    result = check_tolerable(traj, spec)
    cert = trajectory_certificate(traj, spec.T)
    out = {
        "epsilon": spec.epsilon,
        "T": spec.T,
        "tolerable": result.tolerable,
        "max_err_after_T": result.max_err_after_T,
        "certified_tail": result.certified_tail,
        "minimal_T": minimal_tolerance_time(traj, spec.epsilon),
        "certificate": _certificate_dict(cert),
    }
    emit_mapping(out, sink, args.format)
    return EXIT_OK if result.tolerable else EXIT_INFEASIBLE


def cmd_tolerance_synthesize(args, sink) -> int:
    cfg = _load(args)
    spec = _tolerance_spec(args, cfg)
    base = cfg.a_cl if cfg.gain_mode == "target" else cfg.plant.A + cfg.plant.B @ resolve_gain(cfg)
    result = synthesize_tolerant_gain(
        cfg.plant, cfg.reference, cfg.disturbance, spec, base,
        c_min=args.c_min, steps=args.steps, q=cfg.q, horizon=_horizon(args, cfg),
    )
    out: dict[str, Any] = {
        "epsilon": spec.epsilon,
        "T": spec.T,
        "success": result.success,
        "c": result.c,
        "T_achieved": result.T_achieved,
        "max_err_after_T": result.max_err_after_T,
    }
    if result.K is not None:
        out["K"] = result.K
    out["skipped"] = [{"c": p.c, "reason": p.skipped} for p in result.skipped]
    emit_mapping(out, sink, args.format)
    return EXIT_OK if result.success else EXIT_INFEASIBLE


def _max_diff(a: Matrix, b: Matrix) -> float:
    return float(np.max(np.abs(a - b)))


def reproduce_example(name: str, horizon: int = DEFAULT_HORIZON) -> tuple[dict, dict[str, tuple[Trajectory, Certificate]]]:
    """Run a worked example end to end; return the summary and its trajectories."""
    plant = builtin.PLANT
    published = builtin.PUBLISHED_GAINS[name]
    reference = builtin.REFERENCE_3 if name == "example1" else builtin.REFERENCE_2

    K = place_gain(plant, builtin.TARGET_MAIN)
    gains = tracking_gains(plant, reference, K)
    diffs = {
        "K": _max_diff(K, builtin.PUBLISHED_K_MAIN),
        **{key: _max_diff(getattr(gains, key), published[key]) for key in ("G", "Ge", "H")},
    }
    summary: dict[str, Any] = {
        "example": name,
        "max_abs_diff": diffs,
        "published_tolerance": builtin.PUBLISHED_TOL,
        "reproduced": max(diffs.values()) <= builtin.PUBLISHED_TOL,
        "residuals": _gain_report(gains, RunConfig(plant, reference, "explicit", K=K)),
    }
    trajectories: dict[str, tuple[Trajectory, Certificate]] = {}

    if name == "example1":
        traj = simulate(plant, reference, gains, horizon)
        proof = verify_theorem1(traj, gains)
        summary["theorem1"] = {
            "max_recursion_residual": proof.max_recursion,
            "max_increment_residual": proof.max_increment,
            "max_output_residual": proof.max_output,
            "tolerance": proof.tolerance,
            "V_strictly_decreasing": proof.v_strictly_decreasing,
            "passed": proof.passed,
        }
        summary["e_norm_0"] = traj.steps[0].e_norm
        summary["e_norm_final"] = traj.steps[-1].e_norm
        trajectories["example1"] = (traj, trajectory_certificate(traj, 0))
        summary["reproduced"] = summary["reproduced"] and proof.passed
        return summary, trajectories

    K_fast = place_gain(plant, builtin.TARGET_FAST)
    gains_fast = tracking_gains(plant, reference, K_fast)
    diffs["K_fast"] = _max_diff(K_fast, builtin.PUBLISHED_K_FAST)
    summary["reproduced"] = max(diffs.values()) <= builtin.PUBLISHED_TOL
    tol_summary = {}
    for label, g in (("main", gains), ("fast", gains_fast)):
        traj = simulate_perturbed(plant, reference, g, builtin.DISTURBANCE, horizon)
        epsilon, claimed_T = builtin.CLAIMED_TOLERANCE[label]
        T_star = minimal_tolerance_time(traj, epsilon)
        claimed = check_tolerable(traj, ToleranceSpec(epsilon, claimed_T))
        tol_summary[label] = {
            "epsilon": epsilon,
            "e_norm_0": traj.steps[0].e_norm,
            "e_norm_1": traj.steps[1].e_norm,
            "minimal_T": T_star,
            "claimed_T": claimed_T,
            "claim_holds": claimed.tolerable,
            "discrepancy": not claimed.tolerable,
        }
        trajectories[f"example2_{label}"] = (traj, trajectory_certificate(traj, 0 if T_star is None else T_star))
    summary["tolerance"] = tol_summary
    return summary, trajectories


def cmd_reproduce(args, sink) -> int:
    horizon = DEFAULT_HORIZON if args.horizon is None else args.horizon
    summary, trajectories = reproduce_example(args.example, horizon)
    outdir = Path(args.outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        suffix = "json" if args.format == "json" else "csv"
        files = []
        for label, (traj, cert) in trajectories.items():
            path = outdir / f"{label}_trajectory.{suffix}"
            with path.open("w", newline="") as fh:
                emit_trajectory(traj, fh, args.format, cert)
            files.append(str(path))
    except OSError as exc:
        raise ConfigError(f"cannot write trajectories to {outdir}: {exc}") from exc
    summary["trajectory_files"] = files
    emit_mapping(summary, sink, args.format)
    return EXIT_OK if summary["reproduced"] else EXIT_ASSUMPTION


# -- argument parsing --------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _add_global(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--config", metavar="PATH", default=default(None), help="JSON run configuration")
    parser.add_argument("--output", metavar="PATH", default=default(None), help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=default("csv"))
    parser.add_argument("--horizon", type=_positive_int, metavar="N", default=default(None),
                        help="override the simulation horizon")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lyaptrack", description=__doc__.splitlines()[0])
    _add_global(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def leaf(subparsers, name, func, help_text):
        p = subparsers.add_parser(name, help=help_text, description=help_text)
        _add_global(p, suppress=True)
        p.set_defaults(func=func)
        return p

    leaf(sub, "check", cmd_check, "check controllability and tracking-gain feasibility")
    leaf(sub, "gains", cmd_gains, "print K, R, G, Ge, H, P and identity residuals")
    leaf(sub, "simulate", cmd_simulate, "write the closed-loop trajectory")

    tol = sub.add_parser("tolerance", help="tolerability analysis")
    tol_sub = tol.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, func, text in (
        ("check", cmd_tolerance_check, "decide (epsilon, T)-tolerability of the configured run"),
        ("synthesize", cmd_tolerance_synthesize, "search for a gain meeting (epsilon, T)"),
    ):
        p = leaf(tol_sub, name, func, text)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--T", type=int, default=None)
        if name == "synthesize":
            p.add_argument("--c-min", type=float, default=0.05)
            p.add_argument("--steps", type=int, default=20)

    rep = leaf(sub, "reproduce", cmd_reproduce, "rerun a built-in worked example")
    rep.add_argument("example", choices=("example1", "example2"))
    rep.add_argument("--outdir", default=".", help="directory for trajectory files (default: .)")
    return parser


def run_command(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    buffer = io.StringIO()
    try:
        code = args.func(args, buffer)
    except UsageError as exc:
        print(f"lyaptrack: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"lyaptrack: {exc}", file=sys.stderr)
        return EXIT_IO
    except ContractError as exc:
        print(f"lyaptrack: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SynthesisError, NotSchurStableError, NumericOverflowError, SingularMatrixError) as exc:
        print(f"lyaptrack: assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION

    try:
        if args.output is None:
            sys.stdout.write(buffer.getvalue())
        else:
            with open(args.output, "w", newline="") as fh:
                fh.write(buffer.getvalue())
    except OSError as exc:
        print(f"lyaptrack: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


def main(argv: list[str] | None = None) -> int:
    return run_command(argv)


if __name__ == "__main__":
    sys.exit(main())
