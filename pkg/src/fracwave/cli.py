"""Command line front end.

Verbs:

    run            solve one configured problem, write trajectory + metadata
    sweep-epsilon  walk the regularization ladder: norms, association, fits
    ml             evaluate the two-parameter series at a point
    validate       run the packaged acceptance checks and report pass/fail
    noise-dump     realize the configured noise field and write it out

Shared flags (per verb): --config PATH, --out DIR, --seed N, --quiet.

Exit codes: 0 success, 2 configuration problem, 3 numerical gate failure
(norm cap, resolution, series range), 4 fixed-point divergence.  All output
files are deterministic for a fixed config, so run directories can be
compared byte for byte.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import RunConfig, config_hash, parse_config, parse_config_file, render_config
from .duhamel import (
    CauchyProblem,
    SolverOptions,
    moderateness_scan,
    nonlinearity_from_callable,
    solve_kernel_form,
    solve_rl_form,
    zero_nonlinearity,
)
from .errors import ConfigError, DivergenceError, FracwaveError
from .expressions import parse_expression
from .fractional import GridFunction, SpatialGrid, TimeMesh, liouville_multiplier
from .regularization import (
    CoefficientField,
    EpsilonSchedule,
    association_diagnostic,
    build_operator,
    check_norm_gate,
    make_mollifier,
)
from .solution import multiplier_action
from .special import MlParams, mittag_leffler
from .stochastic import (
    NoiseSpec,
    mollified_variance,
    stochastic_initial_data,
    white_noise_representative,
)

__all__ = ["assemble_scenario", "entrypoint", "main", "run_scenario"]


# ---------------------------------------------------------------- building


def _profile_samples(source: str, grid: SpatialGrid, what: str) -> np.ndarray:
    x = grid.x
    if source == "zero":
        return np.zeros(grid.n_points)
    if source == "constant":
        return np.ones(grid.n_points)
    if source == "gaussian_bump":
        return np.exp(-(x**2) / 8.0)
    if source == "tanh_step":
        return 0.5 * (1.0 + np.tanh(x))
    if source.startswith("mode:"):
        k = int(source[5:], 10)
        return np.exp(1j * math.pi * k * x / grid.half_length)
    if source.startswith("file:"):
        path = source[5:].strip()
        try:
            table = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
        except OSError as err:
            raise ConfigError([(None, f"{what}: cannot read {path!r}: {err}")])
        if table.shape[0] != grid.n_points or table.shape[1] not in (1, 2):
            raise ConfigError(
                [(None, f"{what}: {path!r} must have {grid.n_points} rows of 1 or 2 columns")]
            )
        return table[:, 0] if table.shape[1] == 1 else table[:, 0] + 1j * table[:, 1]
    values = parse_expression(source, "x").evaluate(x)
    if not np.all(np.isfinite(values)):
        raise ConfigError([(None, f"{what}: expression takes non-finite values on the grid")])
    return values


def _build_nonlinearity(cfg: RunConfig):
    if cfg.nonlinearity == "zero":
        return zero_nonlinearity()
    expr = parse_expression(cfg.nonlinearity, "u")
    try:
        return nonlinearity_from_callable(expr.evaluate, cfg.nonlinearity)
    except ValueError as err:
        raise ConfigError([(None, f"nonlinearity.f: {err}")])


def _build_schedule(cfg: RunConfig) -> EpsilonSchedule:
    return EpsilonSchedule(
        alpha=cfg.alpha,
        scenario=cfg.schedule_scenario,
        k_min=cfg.k_min,
        k_max=cfg.k_max,
        kappa=cfg.kappa,
        kappa_cap=cfg.kappa_cap,
        h_min=cfg.h_min,
        coeff_width_factor=cfg.coeff_width_factor,
    )


def _coefficient_samples(cfg: RunConfig, grid: SpatialGrid) -> np.ndarray:
    raw = _profile_samples(cfg.coefficient, grid, "operator.coefficient")
    if np.iscomplexobj(raw):
        raise ConfigError([(None, "operator.coefficient: profile must be real")])
    raw = cfg.coefficient_scale * raw.astype(float)
    if not np.all(raw > 0.0):
        raise ConfigError([(None, "operator.coefficient: profile must be strictly positive")])
    return raw


@dataclasses.dataclass
class ScenarioParts:
    """Everything `run` needs, assembled once from a config."""

    cfg: RunConfig
    grid: SpatialGrid
    mesh: TimeMesh
    schedule: Optional[EpsilonSchedule]
    eps: Optional[float]
    operator: object
    measured_norm: Optional[float]
    norm_cap: Optional[float]
    problem: CauchyProblem
    noise_meta: list


def assemble_scenario(cfg: RunConfig, member: int = 0, gate: bool = True) -> ScenarioParts:
    """Build grid, operator, noise, and problem from a validated config."""
    grid = SpatialGrid(cfg.half_length, cfg.n_points)
    mesh = TimeMesh(cfg.horizon, cfg.n_steps)
    kind = cfg.resolved_operator_kind()

    schedule = eps = measured = cap = None
    if cfg.mollify:
        schedule = _build_schedule(cfg)
        eps = 2.0 ** (-cfg.run_k)
        coeff_raw = _coefficient_samples(cfg, grid)
        field = CoefficientField(grid, coeff_raw, shape=cfg.mollifier_shape)
        smoothed = field.smoothed(eps, schedule)
        moll = make_mollifier(cfg.mollifier_shape, schedule.h(eps), grid)
        operator = build_operator(kind, cfg.space_order, smoothed, moll, grid, eps=eps)
        cap = schedule.cap(eps)
        measured = check_norm_gate(operator, schedule) if gate else operator.norm_estimate().value
    else:
        coeff_raw = _coefficient_samples(cfg, grid)
        level = float(coeff_raw[0])
        if kind == "second_derivative":
            base = -(grid.xi.astype(complex) ** 2)
        else:
            name = {"liouville_left": "left", "liouville_right": "right", "riesz": "riesz"}[kind]
            base = liouville_multiplier(name, cfg.space_order, grid)
        operator = multiplier_action(level * base, label=kind)

    nonlinearity = _build_nonlinearity(cfg)
    q = GridFunction(
        grid, cfg.displacement_scale * _profile_samples(cfg.displacement, grid, "initial.displacement")
    )
    v_vals = cfg.velocity_scale * _profile_samples(cfg.velocity, grid, "initial.velocity")

    forcing = None
    noise_meta = []
    if cfg.noise_intensity > 0.0:
        if schedule is None and (cfg.spatial_sharpness is None or cfg.temporal_sharpness is None):
            raise ConfigError(
                [(None, "noise: set spatial and temporal sharpness explicitly when operator.mollify = false")]
            )
        spec = NoiseSpec(
            intensity=cfg.noise_intensity,
            master_seed=cfg.master_seed,
            member=member,
            spatial_sharpness=cfg.spatial_sharpness,
            temporal_sharpness=cfg.temporal_sharpness,
            schedule=schedule,
            shape=cfg.noise_shape,
        )
        noise_eps = eps if eps is not None else 2.0 ** (-cfg.run_k)
        if cfg.noise_target in ("forcing", "both"):
            rep = white_noise_representative(spec, noise_eps, grid, mesh)
            forcing = rep.trajectory
            noise_meta.append({"target": "forcing", **rep.provenance})
        if cfg.noise_target in ("initial", "both"):
            q = stochastic_initial_data(q, spec, noise_eps, grid)
            noise_meta.append({"target": "initial", **spec.provenance(noise_eps, 1)})

    problem = CauchyProblem(
        alpha=cfg.alpha,
        operator=operator,
        nonlinearity=nonlinearity,
        initial_data=q,
        mesh=mesh,
        forcing=forcing,
        initial_velocity=v_vals,
        grid=grid,
        sobolev_order=None,
    )
    return ScenarioParts(cfg, grid, mesh, schedule, eps, operator, measured, cap, problem, noise_meta)


def _solver_options(cfg: RunConfig) -> SolverOptions:
    return SolverOptions(
        tol=cfg.solver_tol,
        max_iter=cfg.max_iter,
        n_windows=cfg.n_windows,
        series_tol=cfg.series_tol,
    )


def run_scenario(cfg: RunConfig, member: int = 0):
    """Assemble and solve; returns (parts, report)."""
    parts = assemble_scenario(cfg, member=member)
    opts = _solver_options(cfg)
    if cfg.solver_form == "kernel":
        report = solve_kernel_form(parts.problem, opts)
    else:
        report = solve_rl_form(parts.problem, opts)
    return parts, report


# ---------------------------------------------------------------- output


def _json_ready(obj):
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_json_ready(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_field_csv(path: Path, nodes: np.ndarray, xs: np.ndarray, values: np.ndarray) -> None:
    """Rows are time-major: every spatial point of node 0, then node 1, ..."""
    arr = np.asarray(values, dtype=complex)
    tt = np.repeat(np.asarray(nodes, dtype=float), xs.size)
    xx = np.tile(np.asarray(xs, dtype=float), arr.shape[0])
    table = np.column_stack([tt, xx, arr.real.ravel(), arr.imag.ravel()])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,x,re_u,im_u\n")
        np.savetxt(fh, table, fmt="%.17g", delimiter=",")


def _write_manifest(dirpath: Path, names: list) -> None:
    entries = {}
    for name in sorted(names):
        data = (dirpath / name).read_bytes()
        entries[name] = {"sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)}
    _write_json(dirpath / "manifest.json", {"files": entries})


def _prepare_dir(cfg: RunConfig, out: Optional[str], stem: str) -> Path:
    base = Path(out) if out else Path(cfg.output_directory)
    run_dir = base / f"{stem}-{cfg.label}-{config_hash(cfg)}"
    run_dir.mkdir(parents=True, exist_ok=True)
    return run_dir


def _schedule_table(schedule: EpsilonSchedule) -> list:
    rows = []
    for k, eps in zip(range(schedule.k_min, schedule.k_max + 1), schedule.epsilons):
        rows.append(
            {
                "k": k,
                "eps": float(eps),
                "h": schedule.h(float(eps)),
                "coeff_width": schedule.coeff_width(float(eps)),
                "cap": schedule.cap(float(eps)),
            }
        )
    return rows


# ---------------------------------------------------------------- verbs


def _say(quiet: bool, message: str) -> None:
    if not quiet:
        print(message)


def cmd_run(cfg: RunConfig, out: Optional[str], quiet: bool) -> int:
    parts, report = run_scenario(cfg)
    run_dir = _prepare_dir(cfg, out, "run")
    (run_dir / "config.txt").write_text(render_config(cfg), encoding="utf-8")
    _write_field_csv(run_dir / "trajectory.csv", parts.mesh.nodes, parts.grid.x, report.trajectory)
    meta = {
        "verb": "run",
        "version": __version__,
        "config_hash": config_hash(cfg),
        "label": cfg.label,
        "alpha": cfg.alpha,
        "operator_kind": cfg.resolved_operator_kind(),
        "solver_form": report.form,
        "grid": {"half_length": cfg.half_length, "n_points": cfg.n_points},
        "mesh": {"horizon": cfg.horizon, "n_steps": cfg.n_steps},
        "regularization": None
        if parts.schedule is None
        else {
            "run_k": cfg.run_k,
            "eps": parts.eps,
            "h": parts.schedule.h(parts.eps),
            "coeff_width": parts.schedule.coeff_width(parts.eps),
            "measured_norm": parts.measured_norm,
            "norm_cap": parts.norm_cap,
            "ladder": _schedule_table(parts.schedule),
        },
        "noise": parts.noise_meta,
        "seed": cfg.master_seed,
        "nonlinearity": parts.problem.nonlinearity.hypothesis_flags(),
        "solver": {
            "converged": report.converged,
            "iterations": report.iterations,
            "final_change": report.final_change,
            "contraction_history": list(report.contraction_history),
            "details": report.metadata,
        },
    }
    _write_json(run_dir / "metadata.json", meta)
    _write_manifest(run_dir, ["config.txt", "trajectory.csv", "metadata.json"])
    if parts.measured_norm is not None:
        _say(quiet, f"norm gate: {parts.measured_norm:.6g} <= cap {parts.norm_cap:.6g} at eps {parts.eps:g}")
    _say(
        quiet,
        f"run {cfg.label}: {'converged' if report.converged else 'NOT converged'} "
        f"in {report.iterations} sweeps (final change {report.final_change:.3e}); wrote {run_dir}",
    )
    return 0


def cmd_sweep(cfg: RunConfig, out: Optional[str], quiet: bool) -> int:
    if not cfg.mollify:
        raise ConfigError([(None, "sweep-epsilon needs operator.mollify = true")])
    grid = SpatialGrid(cfg.half_length, cfg.n_points)
    mesh = TimeMesh(cfg.horizon, cfg.n_steps)
    schedule = _build_schedule(cfg)
    kind = cfg.resolved_operator_kind()
    coeff_raw = _coefficient_samples(cfg, grid)
    field = CoefficientField(grid, coeff_raw, shape=cfg.mollifier_shape)
    nonlinearity = _build_nonlinearity(cfg)
    q = GridFunction(
        grid, cfg.displacement_scale * _profile_samples(cfg.displacement, grid, "initial.displacement")
    )
    v_vals = cfg.velocity_scale * _profile_samples(cfg.velocity, grid, "initial.velocity")

    operators = {}
    build_errors = {}
    for eps in schedule.epsilons:
        eps = float(eps)
        try:
            smoothed = field.smoothed(eps, schedule)
            moll = make_mollifier(cfg.mollifier_shape, schedule.h(eps), grid)
            op = build_operator(kind, cfg.space_order, smoothed, moll, grid, eps=eps)
            check_norm_gate(op, schedule)
            operators[eps] = op
        except FracwaveError as exc:
            build_errors[eps] = exc

    def build_problem(eps: float) -> CauchyProblem:
        if eps in build_errors:
            raise build_errors[eps]
        forcing = None
        state0 = q
        if cfg.noise_intensity > 0.0:
            spec = NoiseSpec(
                intensity=cfg.noise_intensity,
                master_seed=cfg.master_seed,
                member=0,
                spatial_sharpness=cfg.spatial_sharpness,
                temporal_sharpness=cfg.temporal_sharpness,
                schedule=schedule,
                shape=cfg.noise_shape,
            )
            if cfg.noise_target in ("forcing", "both"):
                forcing = white_noise_representative(spec, eps, grid, mesh).trajectory
            if cfg.noise_target in ("initial", "both"):
                state0 = stochastic_initial_data(q, spec, eps, grid)
        return CauchyProblem(
            alpha=cfg.alpha,
            operator=operators[eps],
            nonlinearity=nonlinearity,
            initial_data=state0,
            mesh=mesh,
            forcing=forcing,
            initial_velocity=v_vals,
            grid=grid,
            sobolev_order=None,
        )

    moder = moderateness_scan(build_problem, schedule, _solver_options(cfg))

    probe_scale = cfg.half_length / 10.0
    probe = GridFunction(grid, np.exp(-(grid.x**2) / (2.0 * probe_scale**2)))
    assoc = association_diagnostic(operators, [probe], coeff_raw) if operators else None

    run_dir = _prepare_dir(cfg, out, "sweep")
    (run_dir / "config.txt").write_text(render_config(cfg), encoding="utf-8")

    lines = ["k,eps,h,coeff_width,cap,norm,association_error,sup_state,sup_velocity,sup_fractional_derivative,status"]
    assoc_of = {}
    if assoc is not None:
        for eps, err in zip(assoc.epsilons, assoc.errors[:, 0]):
            assoc_of[float(eps)] = float(err)
    for i, (k, eps) in enumerate(zip(range(schedule.k_min, schedule.k_max + 1), schedule.epsilons)):
        eps = float(eps)
        if eps in build_errors:
            norm_txt = assoc_txt = sups = None
            status = f"failed: {build_errors[eps]}"
        else:
            norm_txt = operators[eps].norm_estimate().value
            assoc_txt = assoc_of.get(eps)
            sups = [moder.norms[name][i] for name in ("state", "velocity", "fractional_derivative")]
            status = moder.statuses[i]
        cells = [
            str(k),
            f"{eps:.17g}",
            f"{schedule.h(eps):.17g}",
            f"{schedule.coeff_width(eps):.17g}",
            f"{schedule.cap(eps):.17g}",
            "" if norm_txt is None else f"{norm_txt:.17g}",
            "" if assoc_txt is None else f"{assoc_txt:.17g}",
        ]
        if sups is None:
            cells += ["", "", ""]
        else:
            cells += [f"{s:.17g}" for s in sups]
        cells.append(status.replace(",", ";"))
        lines.append(",".join(cells))
    (run_dir / "sweep.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    meta = {
        "verb": "sweep-epsilon",
        "version": __version__,
        "config_hash": config_hash(cfg),
        "label": cfg.label,
        "alpha": cfg.alpha,
        "operator_kind": kind,
        "ladder": _schedule_table(schedule),
        "association": None
        if assoc is None
        else {
            "strictly_decreasing": assoc.strictly_decreasing,
            "final_error": float(assoc.final_errors[0]),
        },
        "moderateness": {
            "exponents": moder.exponents,
            "fitted_n": moder.fitted_n,
            "statuses": moder.statuses,
        },
        "seed": cfg.master_seed,
    }
    _write_json(run_dir / "metadata.json", meta)
    _write_manifest(run_dir, ["config.txt", "sweep.csv", "metadata.json"])
    if assoc is not None:
        _say(
            quiet,
            f"association: final error {assoc.final_errors[0]:.3e}"
            f" ({'strictly decreasing' if assoc.strictly_decreasing else 'not monotone'})",
        )
    _say(quiet, f"moderateness: fitted exponent {moder.fitted_n:.4g}; wrote {run_dir}")
    return 0


def cmd_ml(args, quiet: bool) -> int:
    params = MlParams(alpha=args.alpha, beta=args.beta, tol=args.tol)
    z = complex(args.z_re, args.z_im)
    value = mittag_leffler(params, z)
    print(f"{value.real:.17g} {value.imag:.17g}")
    return 0


def cmd_validate(out: Optional[str], quiet: bool, only: Optional[list]) -> int:
    from .validation import run_all

    results = run_all(only=only)
    for res in results:
        _say(quiet, res.line())
    n_pass = sum(1 for r in results if r.passed)
    _say(quiet, f"{n_pass}/{len(results)} criteria passed")
    if out:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            "version": __version__,
            "results": [dataclasses.asdict(r) for r in results],
            "passed": n_pass,
            "total": len(results),
        }
        _write_json(out_dir / "validation.json", payload)
    return 0


def cmd_noise_dump(cfg: RunConfig, out: Optional[str], quiet: bool) -> int:
    grid = SpatialGrid(cfg.half_length, cfg.n_points)
    mesh = TimeMesh(cfg.horizon, cfg.n_steps)
    schedule = _build_schedule(cfg) if cfg.mollify else None
    if schedule is None and (cfg.spatial_sharpness is None or cfg.temporal_sharpness is None):
        raise ConfigError(
            [(None, "noise: set spatial and temporal sharpness explicitly when operator.mollify = false")]
        )
    eps = 2.0 ** (-cfg.run_k)
    spec = NoiseSpec(
        intensity=cfg.noise_intensity,
        master_seed=cfg.master_seed,
        member=0,
        spatial_sharpness=cfg.spatial_sharpness,
        temporal_sharpness=cfg.temporal_sharpness,
        schedule=schedule,
        shape=cfg.noise_shape,
    )
    rep = white_noise_representative(spec, eps, grid, mesh)
    run_dir = _prepare_dir(cfg, out, "noise")
    (run_dir / "config.txt").write_text(render_config(cfg), encoding="utf-8")
    _write_field_csv(run_dir / "noise.csv", mesh.nodes, grid.x, rep.trajectory.values)
    names = ["config.txt", "noise.csv", "metadata.json"]
    meta = {
        "verb": "noise-dump",
        "version": __version__,
        "config_hash": config_hash(cfg),
        "label": cfg.label,
        "eps": eps,
        "provenance": rep.provenance,
        "interior_variance": mollified_variance(spec, eps, grid, mesh),
        "seed": cfg.master_seed,
    }
    if cfg.noise_target in ("initial", "both"):
        u0 = GridFunction(
            grid,
            cfg.displacement_scale * _profile_samples(cfg.displacement, grid, "initial.displacement"),
        )
        perturbed = stochastic_initial_data(u0, spec, eps, grid)
        _write_field_csv(run_dir / "initial.csv", mesh.nodes[:1], grid.x, perturbed.values[None, :])
        names.insert(2, "initial.csv")
        meta["initial_provenance"] = spec.provenance(eps, 1)
    _write_json(run_dir / "metadata.json", meta)
    _write_manifest(run_dir, names)
    _say(quiet, f"noise field ({mesh.n_nodes} x {grid.n_points}) written to {run_dir}")
    return 0


# ---------------------------------------------------------------- plumbing


def _load_config(path: Optional[str], seed: Optional[int]) -> RunConfig:
    if path is None:
        cfg = parse_config("")
    else:
        try:
            cfg = parse_config_file(path)
        except OSError as err:
            raise ConfigError([(None, f"cannot read config {path!r}: {err}")])
    if seed is not None:
        cfg = dataclasses.replace(cfg, master_seed=seed)
    return cfg


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="configuration file (defaults apply when omitted)")
    common.add_argument("--out", metavar="DIR", help="output root (overrides [output] directory)")
    common.add_argument("--seed", type=int, metavar="N", help="override noise.master_seed")
    common.add_argument("--quiet", action="store_true", help="suppress progress lines")

    parser = argparse.ArgumentParser(prog="fracwave", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fracwave {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    sub.add_parser("run", parents=[common], help="solve one configured problem")
    sub.add_parser("sweep-epsilon", parents=[common], help="walk the regularization ladder")

    ml = sub.add_parser("ml", parents=[common], help="evaluate the two-parameter series")
    ml.add_argument("--alpha", type=float, required=True)
    ml.add_argument("--beta", type=float, default=1.0)
    ml.add_argument("--z-re", type=float, default=0.0)
    ml.add_argument("--z-im", type=float, default=0.0)
    ml.add_argument("--tol", type=float, default=1e-14)

    val = sub.add_parser("validate", parents=[common], help="run the acceptance checks")
    val.add_argument("--only", metavar="N[,N...]", help="comma-separated criterion numbers")

    sub.add_parser("noise-dump", parents=[common], help="realize and write the noise field")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.verb == "ml":
        return cmd_ml(args, args.quiet)
    if args.verb == "validate":
        only = None
        if args.only:
            only = [int(part) for part in args.only.split(",") if part.strip()]
        return cmd_validate(args.out, args.quiet, only)
    cfg = _load_config(args.config, args.seed)
    if args.verb == "run":
        return cmd_run(cfg, args.out, args.quiet)
    if args.verb == "sweep-epsilon":
        return cmd_sweep(cfg, args.out, args.quiet)
    return cmd_noise_dump(cfg, args.out, args.quiet)


def entrypoint(argv=None) -> int:
    try:
        return main(argv)
    except ConfigError as err:
        for line, msg in err.issues:
            where = f"line {line}: " if line is not None else ""
            print(f"config error: {where}{msg}", file=sys.stderr)
        return 2
    except DivergenceError as err:
        print(f"divergence: {err}", file=sys.stderr)
        return 4
    except FracwaveError as err:
        print(f"numerical gate: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(entrypoint())
