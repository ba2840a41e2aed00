"""Deterministic parameter-sweep harness for phase diagrams.

Cells share nothing: each gets its own seed derived from (base_seed,
cell_index), so the assembled table is identical whether cells run on one
worker or many.  Per-cell failures are recorded in the table and the sweep
continues.  CSV output is deterministic (wall-clock timings go to the JSON
metadata, not the CSV).
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List

import numpy as np

from .config import Config
from .errors import DdbhError
from .params import ModelParams, from_ising_chart, to_ising_chart
from .rng import derive_seed

CSV_SCHEMA_LINE = "# schema=1"


@dataclass
class CellResult:
    index: int
    axis1: float
    axis2: float
    seed: int
    mean_density: float
    stderr: float
    tau_int: float
    converged: bool
    error: str
    wall_seconds: float


def cell_params(cfg: Config, v1: float, v2: float) -> ModelParams:
    """Model parameters at one grid point (axis overrides applied together)."""
    overrides = {cfg.sweep.axis1.param: v1, cfg.sweep.axis2.param: v2}
    base = cfg.model
    plain = {k: v for k, v in overrides.items() if k in ("J", "u", "scaleN", "kappa", "omega")}
    if plain:
        mu = base.mu
        kw = dict(J=base.J, kappa=base.kappa, u=base.u, omega=base.omega,
                  scaleN=base.scaleN, dims=base.dims)
        kw.update(plain)
        base = ModelParams.from_mu(mu=mu, **kw)
    if cfg.chart_parameterized or ("r" in overrides or "h" in overrides):
        # chart coordinates held fixed come from the configured values, not
        # from the chart image of the mutated base (changing u or J moves
        # the critical point and would silently re-tilt h otherwise)
        if cfg.chart_parameterized:
            model_raw = cfg.raw.get("model", {})
            r0 = float(model_raw.get("r", 0.0))
            h0 = float(model_raw.get("h", 0.0))
        else:
            chart = to_ising_chart(base)
            r0, h0 = chart.r, chart.h
        r = overrides.get("r", r0)
        h = overrides.get("h", h0)
        base = from_ising_chart(r, h, base)
    return base


def _run_cell(payload) -> CellResult:
    from . import sgpe as sg
    from .meanfield import steady_state_roots

    cfg, i, j, index = payload
    v1 = cfg.sweep.axis1.values[i]
    v2 = cfg.sweep.axis2.values[j]
    seed = derive_seed(cfg.sweep.base_seed, index)
    t0 = time.time()
    try:
        p = cell_params(cfg, v1, v2)
        start = min(steady_state_roots(p), key=lambda b: b.density)
        field = np.full(cfg.shape, start.amplitude, dtype=complex)
        run = sg.SgpeRunConfig(
            t_end=cfg.run.t_end, dt=cfg.run.dt, seed=seed,
            record_every=cfg.run.record_every, noise_on=cfg.run.noise_on,
            burn_in=cfg.run.burn_in)
        deadline = time.time() + cfg.run.wall_clock_limit
        rec, est, ok = sg.integrate_until_converged(
            field, p, run, frac_tol=cfg.run.frac_tol,
            max_time=cfg.run.max_time or 10 * cfg.run.t_end,
            chunk_time=cfg.run.t_end,
            wall_deadline=deadline)
        if est is None:
            raise DdbhError("budget exhausted before 100 samples")
        return CellResult(index=index, axis1=v1, axis2=v2, seed=seed,
                          mean_density=est.mean, stderr=est.stderr,
                          tau_int=est.tau_int, converged=ok, error="",
                          wall_seconds=time.time() - t0)
    except DdbhError as exc:
        return CellResult(index=index, axis1=v1, axis2=v2, seed=seed,
                          mean_density=float("nan"), stderr=float("nan"),
                          tau_int=float("nan"), converged=False,
                          error=type(exc).__name__ + ": " + str(exc),
                          wall_seconds=time.time() - t0)


def run_sweep(cfg: Config, threads: int = 1) -> List[CellResult]:
    """Evaluate every grid cell; deterministic output for any worker count."""
    if cfg.sweep is None:
        raise DdbhError("config has no [sweep] section")
    n1, n2 = len(cfg.sweep.axis1.values), len(cfg.sweep.axis2.values)
    payloads = []
    for i in range(n1):
        for j in range(n2):
            payloads.append((cfg, i, j, i * n2 + j))
    if threads <= 1:
        results = [_run_cell(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_cell, payloads, chunksize=1))
    return sorted(results, key=lambda r: r.index)


def table_to_csv(cfg: Config, results: List[CellResult]) -> str:
    """Deterministic CSV (schema=1): no timing columns."""
    buf = io.StringIO()
    buf.write(CSV_SCHEMA_LINE + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    a1, a2 = cfg.sweep.axis1.param, cfg.sweep.axis2.param
    writer.writerow([a1, a2, "mean_density", "stderr", "tau_int", "converged",
                     "seed", "error"])
    for r in results:
        writer.writerow([repr(r.axis1), repr(r.axis2), repr(r.mean_density),
                         repr(r.stderr), repr(r.tau_int),
                         int(r.converged), r.seed, r.error])
    return buf.getvalue()
