"""Statistical estimation for trajectory averages.

Error bars follow the windowed integrated-autocorrelation-time recipe: the
window ends at the first lag where the normalized autocorrelation drops
below 0.05, capped at a tenth of the series, and

    tau_int = 1/2 + sum_{l < W} acf(l),
    stderr  = std * sqrt((2 tau_int + 1) / n).

The +1 keeps the estimate conservative for nearly independent samples.  The
convergence gate additionally requires the autocorrelation at lag n/10 to
be below the fractional tolerance, so averaging windows are long compared
to every dynamical timescale.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InsufficientDataError
from .params import ModelParams, from_ising_chart, to_ising_chart

MIN_SAMPLES = 100
ACF_CUT = 0.05


@dataclass(frozen=True)
class SeriesEstimate:
    mean: float
    stderr: float
    tau_int: float
    n_samples: int
    std: float = 0.0


def _acf(x: np.ndarray, max_lag: int) -> np.ndarray:
    n = len(x)
    xc = x - x.mean()
    var = float(np.dot(xc, xc)) / n
    if var == 0.0:
        return np.zeros(max_lag + 1)
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = float(np.dot(xc[:-k], xc[k:])) / ((n - k) * var)
    return out


def estimate(series) -> SeriesEstimate:
    """Mean with autocorrelation-corrected 1-sigma error bar."""
    x = np.asarray(series, dtype=float).ravel()
    n = len(x)
    if n < MIN_SAMPLES:
        raise InsufficientDataError(f"need >= {MIN_SAMPLES} samples, got {n}")
    mean = float(x.mean())
    std = float(x.std(ddof=1))
    if std == 0.0:
        return SeriesEstimate(mean=mean, stderr=0.0, tau_int=0.5, n_samples=n)
    cap = n // 10
    rho = _acf(x, cap)
    window = cap
    for k in range(1, cap + 1):
        if rho[k] < ACF_CUT:
            window = k
            break
    tau = 0.5 + float(np.sum(rho[1:window]))
    tau = max(tau, 0.5)
    stderr = std * math.sqrt((2.0 * tau + 1.0) / n)
    return SeriesEstimate(mean=mean, stderr=stderr, tau_int=tau, n_samples=n, std=std)


@dataclass(frozen=True)
class ConvergenceVerdict:
    converged: bool
    absolute_mode: bool
    estimate: SeriesEstimate
    acf_at_gate: float

    def __bool__(self) -> bool:
        return self.converged


def converged(series, frac_tol: float = 0.01) -> ConvergenceVerdict:
    """True iff the relative error bar and the long-lag autocorrelation are
    both below frac_tol.

    The long-lag statistic is the autocorrelation averaged over a band of
    lags around n/10 (a single-lag estimate has sampling noise ~ 1/sqrt(n),
    which would spuriously fail clean data at the 1% threshold; a genuine
    slow mode is smooth in lag and survives the band average).  A mean
    below 1e-12 switches the error test to absolute tolerance (flagged in
    the verdict).
    """
    x = np.asarray(series, dtype=float).ravel()
    est = estimate(x)
    if est.std == 0.0:
        return ConvergenceVerdict(True, False, est, 0.0)
    n = len(x)
    lo, hi = max(1, int(0.08 * n)), max(2, int(0.12 * n))
    lags = np.unique(np.linspace(lo, hi, min(15, hi - lo + 1)).astype(int))
    rho = _acf(x, int(lags[-1]))
    acf_gate = float(np.mean(rho[lags]))
    absolute = abs(est.mean) < 1e-12
    err_ok = (est.stderr < frac_tol) if absolute else (est.stderr / abs(est.mean) < frac_tol)
    return ConvergenceVerdict(bool(err_ok and abs(acf_gate) < frac_tol),
                              absolute, est, acf_gate)


def connected_correlation(snapshots, displacement) -> float:
    """Equal-time connected correlator C(d), translation-averaged on the ring
    or torus: <x_j x_{j+d}> - <x_j><x_{j+d}>."""
    snaps = np.asarray(snapshots, dtype=float)
    if snaps.shape[0] < MIN_SAMPLES:
        raise InsufficientDataError(
            f"need >= {MIN_SAMPLES} snapshots, got {snaps.shape[0]}")
    if np.isscalar(displacement) or isinstance(displacement, (int, np.integer)):
        shifted = np.roll(snaps, -int(displacement), axis=1)
    else:
        shifted = snaps
        for ax, d in enumerate(displacement):
            shifted = np.roll(shifted, -int(d), axis=1 + ax)
    mean_site = snaps.mean(axis=0)
    mean_shift = shifted.mean(axis=0)
    corr = (snaps * shifted).mean(axis=0) - mean_site * mean_shift
    return float(corr.mean())


# ---------------------------------------------------------------------------
# hysteresis sweeps

@dataclass
class HysteresisBranch:
    h: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    converged: np.ndarray  # bool per point
    tau_int: np.ndarray


@dataclass
class HysteresisResult:
    up: HysteresisBranch
    down: HysteresisBranch
    loop_area: float
    loop_area_err: float
    wall_seconds: float


def hysteresis_sweep(base: ModelParams, h_values, shape, seed: int = 0,
                     dt: Optional[float] = None, burn: float = 200.0,
                     t_measure: float = 2000.0, frac_tol: float = 0.01,
                     max_time_per_point: Optional[float] = None,
                     record_every: int = 20) -> HysteresisResult:
    """Warm-started up-then-down drive sweep at fixed r.

    base fixes (mu, u, J, kappa, scaleN); h_values (ascending) are mapped to
    omega through the chart.  Each point burns in from the previous point's
    final field, then accumulates mean density until converged or out of
    budget (flagged, not fatal).  The loop area integrates (up - down) dh
    with errors propagated in quadrature.
    """
    from . import sgpe as sg
    from .meanfield import steady_state_roots
    from .rng import derive_seed

    t_start = time.time()
    h_values = np.asarray(sorted(h_values), dtype=float)
    chart0 = to_ising_chart(base)
    if chart0.r >= 0:
        raise InsufficientDataError("hysteresis sweep expects r < 0 (bistable cut)")

    p0 = from_ising_chart(chart0.r, h_values[0], base)
    dark = min((b for b in steady_state_roots(p0) if b.stable), key=lambda b: b.density)
    field = np.full(shape, dark.amplitude, dtype=complex)

    def run_branch(h_list, field, tag):
        means, errs, flags, taus = [], [], [], []
        for i, h in enumerate(h_list):
            p = from_ising_chart(chart0.r, float(h), base)
            cfg = sg.SgpeRunConfig(
                t_end=t_measure, dt=dt, seed=derive_seed(seed, tag + i),
                record_every=record_every, noise_on=True, burn_in=burn)
            rec, est, ok = sg.integrate_until_converged(
                field, p, cfg, frac_tol=frac_tol,
                max_time=max_time_per_point or 4 * t_measure,
                chunk_time=t_measure)
            field = rec.final_field
            means.append(est.mean if est else float("nan"))
            errs.append(est.stderr if est else float("nan"))
            taus.append(est.tau_int if est else float("nan"))
            flags.append(bool(ok))
        return HysteresisBranch(
            h=np.array(h_list, dtype=float), mean=np.array(means),
            stderr=np.array(errs), converged=np.array(flags), tau_int=np.array(taus)), field

    up, field = run_branch(list(h_values), field, 0)
    down, _ = run_branch(list(h_values[::-1]), field, 100000)

    down_mean = down.mean[::-1]
    down_err = down.stderr[::-1]
    # oriented cycle area: the down branch rides the bright state through the
    # coexistence window, so a genuine loop is positive in this convention
    diff = down_mean - up.mean
    area = float(np.trapezoid(diff, h_values))
    w = np.zeros_like(h_values)
    w[0] = 0.5 * (h_values[1] - h_values[0])
    w[-1] = 0.5 * (h_values[-1] - h_values[-2])
    w[1:-1] = 0.5 * (h_values[2:] - h_values[:-2])
    var = float(np.sum((w * up.stderr) ** 2) + np.sum((w * down_err) ** 2))
    return HysteresisResult(up=up, down=down, loop_area=area,
                            loop_area_err=math.sqrt(var),
                            wall_seconds=time.time() - t_start)
