"""Stochastic dissipative Gross-Pitaevskii integrator (the core dynamics).

Equation of motion for the rescaled field on the lattice:

    i dPsi/dt = -J lap(Psi) - (mu + i kappa/2) Psi + omega + u |Psi|^2 Psi + zeta

with zeta complex Gaussian white noise of variance <conj(zeta) zeta> =
(kappa / 2 scaleN) delta_jk delta(t - t').  The scheme is fixed-step
first-order Euler-Maruyama; the noise is additive, so the stochastic-calculus
convention is immaterial.  Noise enters the bracket on the same footing as
the drive, i.e. each step adds (-i) dt zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from . import engine
from .errors import DdbhError, ParameterDomainError
from .lattice import laplacian
from .params import ModelParams, to_ising_chart
from .rng import CounterNoise


class UnconvergedError(DdbhError):
    """Convergence was requested but not reached within the time budget."""


BLOWUP_CAP_FACTOR = 100.0  # guard triggers at 100 * sqrt(n_c)


def default_dt(params: ModelParams) -> float:
    """Conservative step: 0.01 x the fastest timescale among loss, detuning,
    interaction at critical density, and hopping bandwidth."""
    mu, u, kappa, J, z = params.mu, params.u, params.kappa, params.J, params.z
    n_c = 2.0 * mu / (3.0 * u)
    scales = [1.0 / kappa, 1.0 / abs(mu), 1.0 / (u * n_c)]
    if J != 0.0:
        scales.append(1.0 / (2.0 * z * abs(J)))
    return 0.01 * min(scales)


def default_burn_in(params: ModelParams) -> float:
    """20/|r| inside/outside the bistable wedge, 200/kappa at r = 0."""
    r = to_ising_chart(params).r
    if r != 0.0:
        return 20.0 / abs(r)
    return 200.0 / params.kappa


def blowup_cap(params: ModelParams) -> float:
    n_c = 2.0 * params.mu / (3.0 * params.u)
    return BLOWUP_CAP_FACTOR * math.sqrt(n_c)


@dataclass(frozen=True)
class SgpeRunConfig:
    """Run controls for one trajectory (times in mu-units)."""

    t_end: float
    dt: Optional[float] = None
    seed: int = 0
    record_every: int = 1
    noise_on: bool = True
    burn_in: Optional[float] = None

    def __post_init__(self):
        if self.dt is not None and self.dt <= 0:
            raise ParameterDomainError(f"dt must be > 0, got {self.dt}")
        if self.t_end < (self.dt or 0.0):
            raise ParameterDomainError("t_end must be >= dt")
        if self.record_every < 1:
            raise ParameterDomainError("record_every must be >= 1")


@dataclass(frozen=True)
class NoiseSpec:
    """Per-site complex white-noise variance rate kappa / (2 scaleN)."""

    variance_rate: float

    @classmethod
    def for_params(cls, params: ModelParams) -> "NoiseSpec":
        return cls(variance_rate=params.kappa / (2.0 * params.scaleN))


@dataclass
class TrajectoryRecord:
    """Time series of observables plus full replay provenance."""

    times: np.ndarray
    observables: Dict[str, np.ndarray]
    seed: int
    dt: float
    config: SgpeRunConfig
    params: ModelParams
    final_field: np.ndarray
    steps_total: int = 0


def drift(field: np.ndarray, params: ModelParams) -> np.ndarray:
    """Deterministic part of dPsi/dt."""
    bracket = (-params.J) * laplacian(field) \
        - (params.mu + 0.5j * params.kappa) * field \
        + params.omega \
        + params.u * np.abs(field) ** 2 * field
    return -1j * bracket


def sample_noise(rng, dt: float, params: ModelParams, shape=()) -> np.ndarray:
    """Complex noise amplitudes zeta with <|zeta|^2> = kappa / (2 scaleN dt).

    Each value is sqrt(kappa / (2 scaleN dt)) * (x + i y) / sqrt(2) with x, y
    standard normal, so the discrete increment zeta*dt carries the
    white-noise variance kappa dt / (2 scaleN)."""
    amp = math.sqrt(params.kappa / (2.0 * params.scaleN * dt))
    x = rng.standard_normal(shape)
    y = rng.standard_normal(shape)
    return amp * (x + 1j * y) / math.sqrt(2.0)


def em_step(field: np.ndarray, params: ModelParams, dt: float,
            zeta: Optional[np.ndarray] = None) -> np.ndarray:
    """One Euler-Maruyama step: Psi + dt*drift + (-i) dt zeta."""
    out = field + dt * drift(field, params)
    if zeta is not None:
        out = out + (-1j * dt) * zeta
    cap = blowup_cap(params)
    mx = float(np.max(np.abs(out)))
    if not np.isfinite(mx) or mx > cap:
        from .errors import IntegrationBlowupError
        raise IntegrationBlowupError(0, mx, cap)
    return out


def integrate(field: np.ndarray, params: ModelParams, config: SgpeRunConfig,
              observers: Optional[Dict[str, Callable]] = None,
              noise_stream=None) -> TrajectoryRecord:
    """Run the trajectory, invoking observers every record_every steps.

    The observable at t = 0 (right after burn-in) is always recorded; times
    in the record are measured from the end of burn-in.  Passing
    noise_stream overrides the default CounterNoise(seed) (used by the
    translation-equivariance tests).
    """
    field = np.array(field, dtype=np.complex128, copy=True)
    dt = config.dt if config.dt is not None else default_dt(params)
    burn = config.burn_in if config.burn_in is not None else default_burn_in(params)
    if not config.noise_on:
        stream = None
    elif noise_stream is not None:
        stream = noise_stream
    else:
        stream = CounterNoise(config.seed, field.size, complex_field=True)
    cap = blowup_cap(params)
    if observers is None:
        observers = {"mean_density": lambda f: float(np.mean(np.abs(f) ** 2))}

    burn_steps = int(round(burn / dt))
    n_steps = int(round(config.t_end / dt))
    if burn_steps:
        engine.advance_sgpe(field, params, dt, 0, burn_steps, stream, cap)

    times = []
    recs = {name: [] for name in observers}
    step = 0
    while True:
        times.append(step * dt)
        for name, fn in observers.items():
            recs[name].append(fn(field))
        if step >= n_steps:
            break
        chunk = min(config.record_every, n_steps - step)
        engine.advance_sgpe(field, params, dt, burn_steps + step, chunk, stream, cap)
        step += chunk

    observables = {k: np.array(v) for k, v in recs.items()}
    return TrajectoryRecord(
        times=np.array(times), observables=observables, seed=config.seed,
        dt=dt, config=config, params=params, final_field=field,
        steps_total=burn_steps + n_steps,
    )


def integrate_until_converged(field, params, config, frac_tol=0.01,
                              max_time=None, chunk_time=None,
                              wall_deadline=None, raise_unconverged=False):
    """Extend a run in chunks until stats.converged holds for mean_density.

    Returns (record, estimate, converged_flag); the flag is False when the
    simulated-time budget or the wall-clock deadline ran out first (the
    sweep layer records it rather than failing).
    """
    import time as _time

    from . import stats

    dt = config.dt if config.dt is not None else default_dt(params)
    chunk = chunk_time if chunk_time is not None else max(200 * dt * config.record_every, 50.0)
    budget = max_time if max_time is not None else 40 * chunk
    field = np.array(field, dtype=np.complex128, copy=True)
    burn = config.burn_in if config.burn_in is not None else default_burn_in(params)
    stream = CounterNoise(config.seed, field.size, complex_field=True) if config.noise_on else None
    cap = blowup_cap(params)
    burn_steps = int(round(burn / dt))
    if burn_steps:
        engine.advance_sgpe(field, params, dt, 0, burn_steps, stream, cap)

    series = []
    times = []
    step = 0
    ok = False
    while True:
        n = int(round(chunk / dt))
        for _ in range(max(1, n // config.record_every)):
            engine.advance_sgpe(field, params, dt, burn_steps + step,
                                config.record_every, stream, cap)
            step += config.record_every
            times.append(step * dt)
            series.append(float(np.mean(np.abs(field) ** 2)))
        if len(series) >= 100:
            ok = stats.converged(np.array(series), frac_tol=frac_tol)
            if ok:
                break
        if step * dt >= budget:
            break
        if wall_deadline is not None and _time.time() > wall_deadline:
            break
    est = stats.estimate(np.array(series)) if len(series) >= 100 else None
    if raise_unconverged and not ok:
        raise UnconvergedError(
            f"convergence (frac_tol={frac_tol}) not reached within t = {budget:.4g}")
    rec = TrajectoryRecord(
        times=np.array(times), observables={"mean_density": np.array(series)},
        seed=config.seed, dt=dt, config=config, params=params,
        final_field=field, steps_total=burn_steps + step,
    )
    return rec, est, bool(ok)
