"""Run configuration: a small sectioned key=value format.

The format is deliberately flat so every diagnostic can carry a line number:

    # comment
    [run]
    alpha = 1.5

    [operator]
    coefficient = 1 + 0.25*sech(x)

An empty document is a complete configuration; every key has a default.
All problems found in one document are reported together in a single
ConfigError rather than one at a time.

Profile values (coefficient, initial data) accept either an expression in
``x``, a named shape (``constant``, ``gaussian_bump``, ``tanh_step``, and
``mode:K`` or ``file:PATH`` for initial data), each multiplied by the
matching ``*_scale`` key.
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import ConfigError
from .expressions import parse_expression

__all__ = ["RunConfig", "parse_config", "parse_config_file", "render_config", "config_hash"]

NAMED_PROFILES = ("constant", "zero", "gaussian_bump", "tanh_step")


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_float(text: str) -> float:
    return float(text)

def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_optional_float(text: str) -> Optional[float]:
    if not text.strip():
        return None
    return float(text)


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        value = text.strip()
        if value not in options:
            raise ValueError(f"expected one of {', '.join(options)}; got {value!r}")
        return value

    return parse


def _profile(allow_modes: bool) -> Callable[[str], str]:
    """Profiles are kept as source strings; here we only validate them."""

    def parse(text: str) -> str:
        value = text.strip()
        if value in NAMED_PROFILES:
            return value
        if value.startswith("file:"):
            if not value[5:].strip():
                raise ValueError("file: profile needs a path")
            return value
        if value.startswith("mode:"):
            if not allow_modes:
                raise ValueError("mode:K profiles are only valid for initial data")
            int(value[5:], 10)
            return value
        parse_expression(value, "x")
        return value

    return parse


def _nonlinearity(text: str) -> str:
    value = text.strip()
    if value == "zero":
        return value
    parse_expression(value, "u")
    return value


@dataclass(frozen=True)
class _Field:
    parse: Callable[[str], object]
    default: object


_SCHEMA: dict = {
    "run": {
        "scenario": _Field(_choice("time_fractional", "time_space_fractional", "custom"), "time_fractional"),
        "alpha": _Field(_parse_float, 1.5),
        "label": _Field(str.strip, "run"),
    },
    "grid": {
        "half_length": _Field(_parse_float, 16.0),
        "n_points": _Field(_parse_int, 256),
    },
    "mesh": {
        "horizon": _Field(_parse_float, 1.0),
        "n_steps": _Field(_parse_int, 256),
    },
    "operator": {
        # blank kind defers to the scenario default
        "kind": _Field(_choice("second_derivative", "liouville_left", "liouville_right", "riesz", ""), ""),
        "space_order": _Field(_parse_float, 2.0),
        "coefficient": _Field(_profile(allow_modes=False), "constant"),
        "coefficient_scale": _Field(_parse_float, 1.0),
        "mollify": _Field(_parse_bool, True),
    },
    "schedule": {
        "scenario": _Field(_choice("theorem", "wave_time", "wave_timespace"), "wave_time"),
        "k_min": _Field(_parse_int, 4),
        "k_max": _Field(_parse_int, 12),
        "run_k": _Field(_parse_int, 8),
        "kappa": _Field(_parse_float, 2.0),
        "kappa_cap": _Field(_parse_float, 60.0),
        "h_min": _Field(_parse_float, 1.0),
        "coeff_width_factor": _Field(_parse_float, 2.0),
        "mollifier_shape": _Field(_choice("bump", "truncated_gaussian"), "bump"),
    },
    "initial": {
        "displacement": _Field(_profile(allow_modes=True), "gaussian_bump"),
        "displacement_scale": _Field(_parse_float, 1.0),
        "velocity": _Field(_profile(allow_modes=True), "zero"),
        "velocity_scale": _Field(_parse_float, 1.0),
    },
    "nonlinearity": {
        "f": _Field(_nonlinearity, "zero"),
    },
    "noise": {
        "intensity": _Field(_parse_float, 0.0),
        "master_seed": _Field(_parse_int, 0),
        "target": _Field(_choice("forcing", "initial", "both"), "forcing"),
        "spatial_sharpness": _Field(_parse_optional_float, None),
        "temporal_sharpness": _Field(_parse_optional_float, None),
        "shape": _Field(_choice("bump", "truncated_gaussian"), "bump"),
    },
    "solver": {
        "form": _Field(_choice("kernel", "derivative"), "kernel"),
        "tol": _Field(_parse_float, 1e-10),
        "max_iter": _Field(_parse_int, 50),
        "n_windows": _Field(_parse_int, 1),
        "series_tol": _Field(_parse_float, 1e-12),
    },
    "output": {
        "directory": _Field(str.strip, "runs"),
    },
}

_ATTR_OF = {
    ("run", "scenario"): "scenario",
    ("run", "alpha"): "alpha",
    ("run", "label"): "label",
    ("grid", "half_length"): "half_length",
    ("grid", "n_points"): "n_points",
    ("mesh", "horizon"): "horizon",
    ("mesh", "n_steps"): "n_steps",
    ("operator", "kind"): "operator_kind",
    ("operator", "space_order"): "space_order",
    ("operator", "coefficient"): "coefficient",
    ("operator", "coefficient_scale"): "coefficient_scale",
    ("operator", "mollify"): "mollify",
    ("schedule", "scenario"): "schedule_scenario",
    ("schedule", "k_min"): "k_min",
    ("schedule", "k_max"): "k_max",
    ("schedule", "run_k"): "run_k",
    ("schedule", "kappa"): "kappa",
    ("schedule", "kappa_cap"): "kappa_cap",
    ("schedule", "h_min"): "h_min",
    ("schedule", "coeff_width_factor"): "coeff_width_factor",
    ("schedule", "mollifier_shape"): "mollifier_shape",
    ("initial", "displacement"): "displacement",
    ("initial", "displacement_scale"): "displacement_scale",
    ("initial", "velocity"): "velocity",
    ("initial", "velocity_scale"): "velocity_scale",
    ("nonlinearity", "f"): "nonlinearity",
    ("noise", "intensity"): "noise_intensity",
    ("noise", "master_seed"): "master_seed",
    ("noise", "target"): "noise_target",
    ("noise", "spatial_sharpness"): "spatial_sharpness",
    ("noise", "temporal_sharpness"): "temporal_sharpness",
    ("noise", "shape"): "noise_shape",
    ("solver", "form"): "solver_form",
    ("solver", "tol"): "solver_tol",
    ("solver", "max_iter"): "max_iter",
    ("solver", "n_windows"): "n_windows",
    ("solver", "series_tol"): "series_tol",
    ("output", "directory"): "output_directory",
}


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "time_fractional"
    alpha: float = 1.5
    label: str = "run"
    half_length: float = 16.0
    n_points: int = 256
    horizon: float = 1.0
    n_steps: int = 256
    operator_kind: str = ""
    space_order: float = 2.0
    coefficient: str = "constant"
    coefficient_scale: float = 1.0
    mollify: bool = True
    schedule_scenario: str = "wave_time"
    k_min: int = 4
    k_max: int = 12
    run_k: int = 8
    kappa: float = 2.0
    kappa_cap: float = 60.0
    h_min: float = 1.0
    coeff_width_factor: float = 2.0
    mollifier_shape: str = "bump"
    displacement: str = "gaussian_bump"
    displacement_scale: float = 1.0
    velocity: str = "zero"
    velocity_scale: float = 1.0
    nonlinearity: str = "zero"
    noise_intensity: float = 0.0
    master_seed: int = 0
    noise_target: str = "forcing"
    spatial_sharpness: Optional[float] = None
    temporal_sharpness: Optional[float] = None
    noise_shape: str = "bump"
    solver_form: str = "kernel"
    solver_tol: float = 1e-10
    max_iter: int = 50
    n_windows: int = 1
    series_tol: float = 1e-12
    output_directory: str = "runs"

    def resolved_operator_kind(self) -> str:
        if self.operator_kind:
            return self.operator_kind
        return "second_derivative" if self.scenario == "time_fractional" else "riesz"


def _semantic_issues(cfg: RunConfig) -> list:
    issues = []
    if not 1.0 < cfg.alpha <= 2.0:
        issues.append(f"run.alpha: must lie in (1, 2], got {cfg.alpha}")
    if cfg.half_length <= 0.0:
        issues.append("grid.half_length: must be positive")
    if cfg.n_points < 8 or cfg.n_points % 2:
        issues.append(f"grid.n_points: need an even count of at least 8, got {cfg.n_points}")
    if cfg.horizon <= 0.0:
        issues.append("mesh.horizon: must be positive")
    if cfg.n_steps < 2:
        issues.append(f"mesh.n_steps: need at least 2 steps, got {cfg.n_steps}")
    if cfg.resolved_operator_kind() != "second_derivative" and not 0.0 < cfg.space_order <= 2.0:
        issues.append(f"operator.space_order: must lie in (0, 2], got {cfg.space_order}")
    if not cfg.mollify and cfg.coefficient != "constant":
        issues.append("operator.mollify: only constant coefficients admit the exact (unmollified) route")
    if cfg.mollify and cfg.alpha >= 2.0:
        issues.append("run.alpha: the width schedule needs alpha < 2; set operator.mollify = false for the limit case")
    if cfg.k_min < 1 or cfg.k_max < cfg.k_min:
        issues.append(f"schedule: need 1 <= k_min <= k_max, got k_min={cfg.k_min}, k_max={cfg.k_max}")
    elif not cfg.k_min <= cfg.run_k <= cfg.k_max:
        issues.append(f"schedule.run_k: must lie in [k_min, k_max] = [{cfg.k_min}, {cfg.k_max}], got {cfg.run_k}")
    if cfg.kappa <= 0.0 or cfg.kappa_cap < cfg.kappa:
        issues.append(f"schedule: need 0 < kappa <= kappa_cap, got kappa={cfg.kappa}, kappa_cap={cfg.kappa_cap}")
    if cfg.h_min <= 0.0:
        issues.append("schedule.h_min: must be positive")
    if cfg.coeff_width_factor <= 0.0:
        issues.append("schedule.coeff_width_factor: must be positive")
    if cfg.noise_intensity < 0.0:
        issues.append(f"noise.intensity: must be nonnegative, got {cfg.noise_intensity}")
    if cfg.master_seed < 0:
        issues.append("noise.master_seed: must be nonnegative")
    for name in ("spatial_sharpness", "temporal_sharpness"):
        value = getattr(cfg, name)
        if value is not None and value <= 0.0:
            issues.append(f"noise.{name}: must be positive when given")
    if cfg.solver_tol <= 0.0 or cfg.series_tol <= 0.0:
        issues.append("solver: tol and series_tol must be positive")
    if cfg.max_iter < 1 or cfg.n_windows < 1:
        issues.append("solver: max_iter and n_windows must be at least 1")
    return [(None, msg) for msg in issues]


def parse_config(text: str) -> RunConfig:
    """Parse a config document; raise ConfigError listing every problem."""
    issues = []
    values = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SCHEMA:
                issues.append((lineno, f"unknown section [{name}]"))
                section = None
            else:
                section = name
            continue
        if "=" not in line:
            issues.append((lineno, f"expected key = value, got {line!r}"))
            continue
        if section is None:
            issues.append((lineno, "key outside any recognized section"))
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        fields = _SCHEMA[section]
        if key not in fields:
            issues.append((lineno, f"unknown key {key!r} in section [{section}]"))
            continue
        if (section, key) in values:
            issues.append((lineno, f"duplicate key {key!r} in section [{section}]"))
            continue
        try:
            values[(section, key)] = fields[key].parse(value.strip())
        except ValueError as err:
            issues.append((lineno, f"[{section}] {key}: {err}"))

    kwargs = {}
    for (section, key), attr in _ATTR_OF.items():
        if (section, key) in values:
            kwargs[attr] = values[(section, key)]
        else:
            kwargs[attr] = _SCHEMA[section][key].default
    cfg = RunConfig(**kwargs)
    issues.extend(_semantic_issues(cfg))
    if issues:
        raise ConfigError(issues)
    return cfg


def parse_config_file(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def render_config(cfg: RunConfig) -> str:
    """Canonical text with every value resolved; stable across runs."""
    lines = []
    for section in _SCHEMA:
        lines.append(f"[{section}]")
        for key in _SCHEMA[section]:
            value = getattr(cfg, _ATTR_OF[(section, key)])
            if value is None:
                rendered = ""
            elif isinstance(value, bool):
                rendered = "true" if value else "false"
            elif isinstance(value, float):
                rendered = repr(value)
            else:
                rendered = str(value)
            lines.append(f"{key} = {rendered}")
        lines.append("")
    return "\n".join(lines)


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(render_config(cfg).encode("utf-8")).hexdigest()[:16]


def replace(cfg: RunConfig, **changes) -> RunConfig:
    return dataclasses.replace(cfg, **changes)
