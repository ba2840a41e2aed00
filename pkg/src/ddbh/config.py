"""TOML run configuration: strict parsing, validation, and the JSON
metadata echo.

Sections: [model], [lattice], [run], [sweep].  Unknown keys are hard
errors.  [model] accepts either the microscopic pair (kappa, omega) or the
chart pair (r, h); supplying both is rejected.  All energies are normalized
to mu = 1 internally; the raw values are echoed in the metadata so a
round-trip reproduces the validated configuration exactly.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .params import DEFAULT_SCALE_N, ModelParams, from_ising_chart

_MODEL_KEYS = {"J", "delta", "mu", "u", "omega", "kappa", "r", "h", "scaleN", "dims"}
_LATTICE_KEYS = {"L", "Lx", "Ly", "boundary"}
_RUN_KEYS = {"dt", "t_end", "seed", "record_every", "noise_on", "burn_in",
             "frac_tol", "max_time", "wall_clock_limit"}
_SWEEP_KEYS = {"axis1", "axis2", "base_seed"}
_AXIS_KEYS = {"param", "values", "start", "stop", "num"}
_SECTIONS = {"model", "lattice", "run", "sweep"}


@dataclass
class RunSettings:
    t_end: float = 200.0
    dt: Optional[float] = None
    seed: int = 0
    record_every: int = 10
    noise_on: bool = True
    burn_in: Optional[float] = None
    frac_tol: float = 0.01
    max_time: Optional[float] = None
    wall_clock_limit: float = 60.0


@dataclass
class AxisSpec:
    param: str
    values: list


@dataclass
class SweepSettings:
    axis1: AxisSpec
    axis2: AxisSpec
    base_seed: int = 0


@dataclass
class Config:
    model: ModelParams          # normalized to mu = 1
    shape: tuple
    run: RunSettings
    sweep: Optional[SweepSettings]
    raw: dict = field(repr=False, default_factory=dict)
    chart_parameterized: bool = False


def _reject_unknown(section: dict, allowed: set, name: str):
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(unknown)}")


def _build_model(sec: dict) -> tuple[ModelParams, bool]:
    _reject_unknown(sec, _MODEL_KEYS, "model")
    has_chart = ("r" in sec) or ("h" in sec)
    has_micro = ("kappa" in sec) or ("omega" in sec)
    if has_chart and has_micro:
        both = sorted((set(sec) & {"r", "h"}) | (set(sec) & {"kappa", "omega"}))
        raise ConfigError(
            f"[model] mixes chart and microscopic drive parameters: {', '.join(both)} "
            "(use either kappa/omega or r/h)")
    if "delta" in sec and "mu" in sec:
        raise ConfigError("[model] supplies both delta and mu; pick one")
    if "delta" not in sec and "mu" not in sec:
        raise ConfigError("[model] needs delta or mu")
    for key in ("J", "u"):
        if key not in sec:
            raise ConfigError(f"[model] missing required key {key}")
    scaleN = float(sec.get("scaleN", DEFAULT_SCALE_N))
    dims = int(sec.get("dims", 1))
    J, u = float(sec["J"]), float(sec["u"])

    def base(kappa, omega):
        if "mu" in sec:
            return ModelParams.from_mu(mu=float(sec["mu"]), J=J, kappa=kappa,
                                       u=u, omega=omega, scaleN=scaleN, dims=dims)
        return ModelParams(J=J, delta=float(sec["delta"]), kappa=kappa, u=u,
                           omega=omega, scaleN=scaleN, dims=dims)

    if has_chart:
        for key in ("r", "h"):
            if key not in sec:
                raise ConfigError(f"[model] chart parameterization missing {key}")
        probe = base(kappa=1.0, omega=0.0)
        params = from_ising_chart(float(sec["r"]), float(sec["h"]), probe)
        return params.in_mu_units(), True
    for key in ("kappa", "omega"):
        if key not in sec:
            raise ConfigError(f"[model] missing required key {key}")
    return base(float(sec["kappa"]), float(sec["omega"])).in_mu_units(), False


def _build_shape(sec: dict, dims: int) -> tuple:
    _reject_unknown(sec, _LATTICE_KEYS, "lattice")
    boundary = sec.get("boundary", "periodic")
    if boundary != "periodic":
        raise ConfigError(f"only periodic boundaries are supported, got {boundary!r}")
    if dims == 1:
        if "L" not in sec:
            raise ConfigError("[lattice] needs L for a 1D run")
        return (int(sec["L"]),)
    if "Lx" not in sec or "Ly" not in sec:
        raise ConfigError("[lattice] needs Lx and Ly for a 2D run")
    return (int(sec["Lx"]), int(sec["Ly"]))


def _build_run(sec: dict) -> RunSettings:
    _reject_unknown(sec, _RUN_KEYS, "run")
    out = RunSettings()
    for key, val in sec.items():
        setattr(out, key, val)
    out.seed = int(out.seed)
    out.record_every = int(out.record_every)
    return out


def _build_axis(sec: dict, which: str) -> AxisSpec:
    _reject_unknown(sec, _AXIS_KEYS, which)
    if "param" not in sec:
        raise ConfigError(f"[sweep.{which}] needs param")
    if "values" in sec:
        values = [float(v) for v in sec["values"]]
    else:
        for key in ("start", "stop", "num"):
            if key not in sec:
                raise ConfigError(f"[sweep.{which}] needs values or start/stop/num")
        import numpy as np
        values = [float(v) for v in
                  np.linspace(float(sec["start"]), float(sec["stop"]), int(sec["num"]))]
    return AxisSpec(param=str(sec["param"]), values=values)


def _build_sweep(sec: dict, chart_parameterized: bool) -> SweepSettings:
    _reject_unknown(sec, _SWEEP_KEYS, "sweep")
    if "axis1" not in sec or "axis2" not in sec:
        raise ConfigError("[sweep] needs axis1 and axis2")
    ax1 = _build_axis(sec["axis1"], "axis1")
    ax2 = _build_axis(sec["axis2"], "axis2")
    if ax1.param == ax2.param:
        raise ConfigError(f"sweep axes must differ, both are {ax1.param!r}")
    allowed = ({"r", "h", "J", "u", "scaleN"} if chart_parameterized
               else {"kappa", "omega", "J", "u", "scaleN"})
    for ax in (ax1, ax2):
        if ax.param not in allowed:
            raise ConfigError(
                f"sweep axis {ax.param!r} not valid for this parameterization "
                f"(allowed: {', '.join(sorted(allowed))})")
    return SweepSettings(axis1=ax1, axis2=ax2, base_seed=int(sec.get("base_seed", 0)))


def validate_config(data: dict) -> Config:
    unknown = sorted(set(data) - _SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    if "model" not in data:
        raise ConfigError("config needs a [model] section")
    model, chart = _build_model(dict(data["model"]))
    shape = _build_shape(dict(data.get("lattice", {"L": 1} if model.dims == 1
                                       else {"Lx": 1, "Ly": 1})), model.dims)
    run = _build_run(dict(data.get("run", {})))
    sweep = _build_sweep(dict(data["sweep"]), chart) if "sweep" in data else None
    return Config(model=model, shape=shape, run=run, sweep=sweep, raw=data,
                  chart_parameterized=chart)


def load_config(path) -> Config:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return validate_config(data)


def load_config_json(path) -> Config:
    """Rebuild the validated config from an exported metadata sidecar."""
    with open(path) as fh:
        meta = json.load(fh)
    if "config" not in meta:
        raise ConfigError(f"{path} does not look like a ddbh metadata file")
    return validate_config(meta["config"])


def build_hash() -> str:
    """Short digest of the package sources (identifies the build in metadata)."""
    root = Path(__file__).parent
    h = hashlib.sha256()
    for f in sorted(root.glob("*.py")) + sorted(root.glob("*.pyx")):
        h.update(f.name.encode())
        h.update(f.read_bytes())
    return h.hexdigest()[:12]


def write_metadata(path, config_raw: dict, seed, timings=None, extra=None):
    meta = {
        "schema": 1,
        "seed": int(seed),
        "build_hash": build_hash(),
        "config": config_raw,
        "timings": timings or {},
    }
    if extra:
        meta.update(extra)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
