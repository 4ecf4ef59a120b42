"""Flat dotted-key run configuration with strict per-scenario schemas.

Files look like

    scenario = compare
    out = runs/fig_a
    coupling.g3 = 1.0
    compare.models = gpe3d,np,cq-poly

Unknown keys, keys from another scenario, missing required keys and
non-finite numbers are all rejected, so a typo can never silently fall back
to a default. The full key reference lives in docs/config.md.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .comparison import MODEL_TOKENS

__all__ = ["ConfigError", "RunConfig", "SCENARIOS", "load_config", "parse_config_text"]


class ConfigError(ValueError):
    """Configuration file violates the schema."""


SCENARIOS = ("width-map", "width-curves", "ground-state", "compare", "match-scan")


@dataclass(frozen=True)
class _Key:
    parse: type
    default: object = None
    required: bool = False
    choices: tuple | None = None
    minimum: float | None = None


def _float_key(default=None, required=False, minimum=None):
    return _Key(float, default=default, required=required, minimum=minimum)


def _int_key(default=None, required=False, minimum=None):
    return _Key(int, default=default, required=required, minimum=minimum)


_GRID_1D = {
    "grid.half_width": _float_key(default=20.0, minimum=1e-12),
    "grid.points": _int_key(default=513, minimum=16),
}
_GRID_3D = {
    "grid3d.transverse_half_width": _float_key(default=8.0, minimum=6.0),
    "grid3d.transverse_points": _int_key(default=65, minimum=16),
}
_COUPLING = {
    "coupling.g3": _float_key(default=0.0),
    "coupling.g5": _float_key(default=0.0),
    "coupling.lambda": _float_key(default=0.1, minimum=0.0),
}
_SOLVER_1D = {
    "solver.dt": _float_key(default=1e-3, minimum=0.0),
    "solver.mu_tol": _float_key(default=1e-9, minimum=0.0),
    "solver.max_iters": _int_key(default=200_000, minimum=1),
}
_SOLVER_3D = {
    "solver.dt3d": _float_key(default=2e-3, minimum=0.0),
    "solver.mu_tol3d": _float_key(default=1e-8, minimum=0.0),
}

_SCHEMAS: dict[str, dict[str, _Key]] = {
    "width-map": {
        "map.a3_min": _float_key(default=-2.0),
        "map.a3_max": _float_key(default=2.0),
        "map.a5_min": _float_key(default=-2.0),
        "map.a5_max": _float_key(default=2.0),
        "map.resolution": _int_key(default=401, minimum=2),
    },
    "width-curves": {
        "curves.fixed": _Key(str, required=True, choices=("a3", "a5")),
        "curves.fixed_value": _float_key(required=True),
        "curves.sweep_min": _float_key(required=True),
        "curves.sweep_max": _float_key(required=True),
        "curves.points": _int_key(required=True, minimum=1),
    },
    "ground-state": {
        "model.kind": _Key(str, required=True, choices=MODEL_TOKENS),
        **_COUPLING, **_GRID_1D, **_GRID_3D, **_SOLVER_1D, **_SOLVER_3D,
    },
    "compare": {
        "compare.models": _Key(list, required=True),
        **_COUPLING, **_GRID_1D, **_GRID_3D, **_SOLVER_1D, **_SOLVER_3D,
    },
    "match-scan": {
        "match.g5": _float_key(required=True),
        "match.g3_tol": _float_key(default=1e-6, minimum=0.0),
        "match.max_outer": _int_key(default=50, minimum=1),
        "coupling.lambda": _float_key(default=0.1, minimum=0.0),
        **_GRID_1D, **_SOLVER_1D,
    },
}


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    out: Path
    values: dict = field(default_factory=dict)

    def __getitem__(self, key: str):
        return self.values[key]


def _coerce(key: str, raw: str, spec: _Key):
    if spec.parse is list:
        return [token.strip() for token in raw.split(",") if token.strip()]
    if spec.parse is str:
        value = raw
    else:
        try:
            value = spec.parse(raw)
        except ValueError as exc:
            raise ConfigError(f"key '{key}': cannot parse {raw!r} as {spec.parse.__name__}") from exc
        if not math.isfinite(value):
            raise ConfigError(f"key '{key}': value must be finite, got {raw!r}")
    if spec.choices is not None and value not in spec.choices:
        raise ConfigError(f"key '{key}': {value!r} is not one of {spec.choices}")
    if spec.minimum is not None and value < spec.minimum:
        raise ConfigError(f"key '{key}': {value} is below the minimum {spec.minimum}")
    return value


def parse_config_text(text: str, out_override: str | None = None) -> RunConfig:
    entries: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if not key or not raw:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        entries[key] = raw

    scenario = entries.pop("scenario", None)
    if scenario is None:
        raise ConfigError("missing required key 'scenario'")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")

    out_raw = entries.pop("out", None)
    if out_override is not None:
        out_raw = out_override
    if out_raw is None:
        raise ConfigError("missing output directory: set 'out' in the config or pass --out")

    schema = _SCHEMAS[scenario]
    unknown = sorted(set(entries) - set(schema))
    if unknown:
        raise ConfigError(f"unknown key(s) for scenario '{scenario}': {', '.join(unknown)}")

    values: dict = {}
    for key, spec in schema.items():
        if key in entries:
            values[key] = _coerce(key, entries[key], spec)
        elif spec.required:
            raise ConfigError(f"scenario '{scenario}' requires key '{key}'")
        else:
            values[key] = spec.default

    if scenario == "compare":
        models = values["compare.models"]
        if len(models) < 2:
            raise ConfigError("compare.models needs at least two entries")
        bad = [m for m in models if m not in MODEL_TOKENS]
        if bad:
            raise ConfigError(f"compare.models contains unknown model(s): {', '.join(bad)}")
        if len(set(models)) != len(models):
            raise ConfigError("compare.models contains duplicates")
    if scenario == "width-curves" and values["curves.sweep_max"] < values["curves.sweep_min"]:
        raise ConfigError("curves.sweep_max must be >= curves.sweep_min")

    return RunConfig(scenario=scenario, out=Path(out_raw), values=values)


def load_config(path: str | Path, out_override: str | None = None) -> RunConfig:
    # an unreadable file is an I/O failure, not a schema violation, so the
    # OSError is allowed to propagate
    return parse_config_text(Path(path).read_text(), out_override)
