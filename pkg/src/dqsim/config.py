"""Experiment configuration: JSON documents, validation and the built-in presets."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np

from .gates import ZZZ_MODES
from .hilbert import PureState, SpaceShape, product_state

SCHEMA_VERSION = 1
EXPERIMENTS = ("ising_tf", "itc", "extended_ising")
UNITS = ("rad", "MHz")


class ConfigError(ValueError):
    pass


@dataclass
class ModelParams:
    """Couplings as written in the config; :meth:`angular` converts to rad per time unit."""

    J: float | None = None
    B: float | None = None
    G: float | None = None
    omega: float | None = None
    Omega: float | None = None
    g: float | None = None
    omega1: float | None = None
    Omega1: float | None = None
    omega_p: float | None = None
    Omega_p: float | None = None
    omega2: float | None = None
    Omega2: float | None = None
    kappa: float = 0.0

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ModelParams:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown parameter(s): {sorted(unknown)}")
        for key, value in data.items():
            if value is not None and (not isinstance(value, (int, float)) or isinstance(value, bool)
                                      or not math.isfinite(value)):
                raise ConfigError(f"parameter {key} must be a finite number, got {value!r}")
        return cls(**data)

    def angular(self, unit: str) -> ModelParams:
        scale = 2 * math.pi if unit == "MHz" else 1.0
        return ModelParams(**{k: (None if v is None else v * scale) for k, v in asdict(self).items()})

    def to_dict(self) -> dict[str, float]:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass
class ExperimentConfig:
    name: str
    experiment: str
    N: int
    params: ModelParams
    trotter_steps: list[int]
    grid_axis: str = "phase"
    grid_max: float = 4.0
    grid_points: int = 200
    frequency_unit: str = "rad"
    fock_dim: int = 0
    initial_state: Any = "all_zero"
    zzz_mode: str = "direct"
    expand_h2: bool = False
    output: str = "out"

    @property
    def rates(self) -> ModelParams:
        """Parameters in angular units."""
        return self.params.angular(self.frequency_unit)

    @property
    def shape(self) -> SpaceShape:
        return SpaceShape(self.N, self.fock_dim if self.experiment == "itc" else 0)

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.grid_max, self.grid_points)

    def times(self) -> np.ndarray:
        """Physical evolution times for the grid; the phase axis is |J| t."""
        if self.grid_axis == "time":
            return self.grid()
        return self.grid() / abs(self.rates.J)

    def to_dict(self) -> dict[str, Any]:
        grid = {"axis": self.grid_axis, "points": self.grid_points}
        grid["max_time" if self.grid_axis == "time" else "max"] = self.grid_max
        out = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "experiment": self.experiment,
            "N": self.N,
            "frequency_unit": self.frequency_unit,
            "params": self.params.to_dict(),
            "grid": grid,
            "trotter_steps": list(self.trotter_steps),
            "initial_state": self.initial_state,
            "output": self.output,
        }
        if self.experiment == "itc":
            out["fock_dim"] = self.fock_dim
            out["expand_h2"] = self.expand_h2
        if self.experiment == "extended_ising":
            out["zzz_mode"] = self.zzz_mode
        return out


def _need(params: ModelParams, names: list[str], experiment: str) -> None:
    missing = [n for n in names if getattr(params, n) is None]
    if missing:
        raise ConfigError(f"{experiment} needs parameter(s) {missing}")


def _int(value: Any, what: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{what} must be an integer >= {minimum}, got {value!r}")
    return value


def from_dict(data: dict[str, Any]) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    allowed = {"schema_version", "name", "experiment", "N", "frequency_unit", "params", "grid",
               "trotter_steps", "initial_state", "fock_dim", "zzz_mode", "expand_h2", "output"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown field(s): {sorted(unknown)}")
    for key in ("experiment", "N", "params", "trotter_steps", "grid"):
        if key not in data:
            raise ConfigError(f"missing required field {key!r}")

    experiment = data["experiment"]
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")
    n = _int(data["N"], "N", {"ising_tf": 2, "itc": 1, "extended_ising": 3}[experiment])
    unit = data.get("frequency_unit", "rad")
    if unit not in UNITS:
        raise ConfigError(f"frequency_unit must be one of {UNITS}, got {unit!r}")
    if not isinstance(data["params"], dict):
        raise ConfigError("params must be an object")
    params = ModelParams.from_dict(data["params"])
    if params.kappa < 0:
        raise ConfigError("kappa must be >= 0")

    steps = data["trotter_steps"]
    if not isinstance(steps, list) or not steps:
        raise ConfigError("trotter_steps must be a non-empty list")
    steps = [_int(s, "trotter step", 1) for s in steps]

    grid = data["grid"]
    if not isinstance(grid, dict):
        raise ConfigError("grid must be an object")
    axis = grid.get("axis", "time" if experiment == "itc" else "phase")
    if axis not in ("phase", "time"):
        raise ConfigError(f"grid axis must be 'phase' or 'time', got {axis!r}")
    gmax = grid.get("max_time" if axis == "time" else "max")
    if not isinstance(gmax, (int, float)) or isinstance(gmax, bool) or not gmax > 0:
        raise ConfigError(f"grid {'max_time' if axis == 'time' else 'max'} must be a positive number")
    points = _int(grid.get("points", 200), "grid points", 2)

    cfg = ExperimentConfig(
        name=str(data.get("name", experiment)),
        experiment=experiment,
        N=n,
        params=params,
        trotter_steps=steps,
        grid_axis=axis,
        grid_max=float(gmax),
        grid_points=points,
        frequency_unit=unit,
        fock_dim=0,
        initial_state=data.get("initial_state", "all_zero"),
        zzz_mode=data.get("zzz_mode", "direct"),
        expand_h2=bool(data.get("expand_h2", False)),
        output=str(data.get("output", f"out/{data.get('name', experiment)}")),
    )

    if experiment == "ising_tf":
        _need(params, ["J", "B"], experiment)
    elif experiment == "extended_ising":
        _need(params, ["J", "G", "B"], experiment)
        if cfg.zzz_mode not in ZZZ_MODES:
            raise ConfigError(f"zzz_mode must be one of {ZZZ_MODES}, got {cfg.zzz_mode!r}")
    else:
        _need(params, ["omega1", "Omega1", "g", "J"], experiment)
        if n < 2:
            raise ConfigError("itc needs N >= 2 (H2 is built from nearest-neighbour pairs)")
        cfg.fock_dim = _int(data.get("fock_dim", 8), "fock_dim", 2)
        _resolve_h2(cfg)
    if axis == "phase" and not params.J:
        raise ConfigError("a phase axis needs a nonzero J")
    initial_state(cfg)  # validates
    return cfg


def _resolve_h2(cfg: ExperimentConfig) -> None:
    """Fill omega2/Omega2 from per-pair omega'/Omega' or the reverse, enforcing omega2 = (N-1) omega'."""
    p, pairs = cfg.params, cfg.N - 1
    for total, per_pair in (("omega2", "omega_p"), ("Omega2", "Omega_p")):
        tv, pv = getattr(p, total), getattr(p, per_pair)
        if tv is None and pv is None:
            raise ConfigError(f"itc needs {total} or {per_pair}")
        if tv is None:
            setattr(p, total, pairs * pv)
        elif pv is None:
            setattr(p, per_pair, tv / pairs)
        elif not math.isclose(tv, pairs * pv, rel_tol=1e-12):
            raise ConfigError(f"{total} must equal (N-1) * {per_pair}")


def load(path: str | Path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return from_dict(data)


def initial_state(cfg: ExperimentConfig) -> PureState:
    """Resolve the configured initial state.

    Presets: ``all_zero`` puts every qubit in |0>_z (sigma_z = +1) and the mode
    in vacuum; ``itc_excited_first`` is (|1> + |2>)/sqrt(2) photons with qubit 1
    excited and the rest in the ground level. Explicit forms are
    ``{"qubits": "0111", "mode": [..]}`` and ``{"amplitudes": [[re, im], ..]}``.
    """
    shape = cfg.shape
    choice = cfg.initial_state
    try:
        if choice == "all_zero":
            return product_state(shape, "0" * cfg.N)
        if choice == "itc_excited_first":
            if not shape.has_mode or shape.fock_dim < 3:
                raise ConfigError("itc_excited_first needs fock_dim >= 3")
            return product_state(shape, "0" + "1" * (cfg.N - 1), [0.0, 1.0, 1.0])
        if isinstance(choice, dict) and "qubits" in choice:
            return product_state(shape, str(choice["qubits"]), choice.get("mode"))
        if isinstance(choice, dict) and "amplitudes" in choice:
            amps = [complex(*a) if isinstance(a, list) else complex(a) for a in choice["amplitudes"]]
            return PureState(shape, amps, normalize=True)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad initial_state: {exc}") from None
    raise ConfigError(f"unrecognized initial_state {choice!r}")


# Dimensionless units for the phase-axis Ising run: only |J|/|B| matters.
_PRESETS: dict[str, dict[str, Any]] = {
    "ising_tf": {
        "schema_version": SCHEMA_VERSION,
        "name": "ising_tf",
        "experiment": "ising_tf",
        "N": 4,
        "frequency_unit": "rad",
        "params": {"J": -1.0, "B": -0.5},
        "grid": {"axis": "phase", "max": 4.0, "points": 200},
        "trotter_steps": [6, 8, 10],
        "initial_state": "all_zero",
        "output": "out/ising_tf",
    },
    "itc": {
        "schema_version": SCHEMA_VERSION,
        "name": "itc",
        "experiment": "itc",
        "N": 4,
        "frequency_unit": "MHz",
        "params": {
            "omega1": 200.0,
            "Omega1": 180.0,
            "g": 80.0,
            "omega2": 600.0,
            "Omega2": 18.0,
            "J": 200.0,
            "kappa": 0.01,
        },
        "grid": {"axis": "time", "max_time": 0.0025, "points": 200},
        "trotter_steps": [3, 4, 5],
        "fock_dim": 8,
        "expand_h2": False,
        "initial_state": "itc_excited_first",
        "output": "out/itc",
    },
    "extended_ising": {
        "schema_version": SCHEMA_VERSION,
        "name": "extended_ising",
        "experiment": "extended_ising",
        "N": 4,
        "frequency_unit": "MHz",
        "params": {"J": 400.0, "G": 400.0, "B": 200.0},
        "grid": {"axis": "phase", "max": 4.0, "points": 200},
        "trotter_steps": [7, 9, 11],
        "zzz_mode": "direct",
        "initial_state": "all_zero",
        "output": "out/extended_ising",
    },
}


def preset_names() -> list[str]:
    return sorted(_PRESETS)


def preset_dict(name: str) -> dict[str, Any]:
    try:
        return copy.deepcopy(_PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {preset_names()}") from None


def preset(name: str, **overrides: Any) -> ExperimentConfig:
    data = preset_dict(name)
    data.update(overrides)
    return from_dict(data)
