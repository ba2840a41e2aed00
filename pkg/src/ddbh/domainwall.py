"""Domain-wall insertion, front tracking, and the three velocity estimators.

Velocities follow one sign convention: a rising-sigma kink (bright phase on
the left, since density decreases along +sigma) measured by the motion of
its zero crossing, so v > 0 means the h-favored phase advances.  The
estimators:

  analytic_velocity   first order in h:  v = (3h/2) sqrt(K g / 2 r^2)
  shooting_velocity   traveling-wave boundary-value problem solved as a
                      fictitious particle of mass K in -U(sigma) with
                      friction v, bisected until it rests on the lower max
  measure_velocity    zero-crossing track of the full lattice dynamics
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (BracketingError, ParameterDomainError, PreconditionError,
                     TrackingLostError, WallCollisionError)
from .meanfield import steady_state_roots, _cubic_real_roots
from .modela import project_sigma
from .params import (IsingChart, ModelParams, critical_point,
                     from_ising_chart, to_ising_chart)
from .sgpe import SgpeRunConfig, default_dt, integrate

MIN_FIT_SAMPLES = 20
TRANSIENT_RATE_FACTOR = 1e-4   # profile L2 change per unit time, in sigma_0
COLLISION_GUARD = 4            # sites between tracked and parked wall


@dataclass
class FrontTrace:
    times: np.ndarray
    positions: np.ndarray
    fit_velocity: float
    fit_stderr: float
    fit_window: tuple


def front_position(sigma: np.ndarray, window: Optional[tuple] = None) -> float:
    """Sub-cell zero crossing of a 1D sigma profile by linear interpolation.

    Scans adjacent non-wrapping pairs inside `window` (default: the whole
    array).  Exactly one sign change is required.
    """
    sigma = np.asarray(sigma, dtype=float)
    lo, hi = (0, sigma.size - 1) if window is None else window
    crossings = []
    for i in range(lo, hi):
        a, b = sigma[i], sigma[i + 1]
        if a == 0.0:
            crossings.append(float(i))
        elif a * b < 0.0:
            crossings.append(i + a / (a - b))
    if len(crossings) != 1:
        raise TrackingLostError(
            f"expected exactly one zero crossing in [{lo}, {hi}], found {len(crossings)}")
    return crossings[0]


def _all_crossings_ring(sigma: np.ndarray) -> np.ndarray:
    """Zero crossings on the full ring (wrap pair included)."""
    a = sigma
    b = np.roll(sigma, -1)
    idx = np.nonzero((a * b < 0.0) | (a == 0.0))[0]
    out = []
    for i in idx:
        ai, bi = a[i], b[i]
        out.append(float(i) if ai == 0.0 else i + ai / (ai - bi))
    return np.array(out)


def _circ_dist(x, y, L):
    d = abs(x - y) % L
    return min(d, L - d)


def track_front(snapshots: np.ndarray, start: float) -> np.ndarray:
    """Follow the crossing nearest to a continuously updated prediction,
    unwrapping ring winding.

    A wall pair lives on the ring (tracked + parked) and both drift; the
    collision guard fires when they come within COLLISION_GUARD sites of
    each other, before annihilation corrupts the fit.
    """
    L = snapshots.shape[1]
    unwrapped = []
    offset = 0.0
    prev_mod = float(start)
    for k, snap in enumerate(snapshots):
        cross = _all_crossings_ring(snap)
        if cross.size == 0:
            raise WallCollisionError(f"walls annihilated by snapshot {k}")
        if cross.size != 2:
            raise TrackingLostError(
                f"expected the wall pair (2 crossings), found {cross.size} at snapshot {k}")
        gap = _circ_dist(cross[0], cross[1], L)
        if gap < COLLISION_GUARD:
            raise WallCollisionError(
                f"front within {gap:.2f} sites of the parked wall at snapshot {k}")
        dists = np.array([_circ_dist(c, prev_mod, L) for c in cross])
        j = int(np.argmin(dists))
        if dists[j] > L / 8:
            raise TrackingLostError(
                f"front jumped by {dists[j]:.1f} sites at snapshot {k}")
        c = float(cross[j])
        delta = c - prev_mod
        if delta > L / 2:
            offset -= L
        elif delta < -L / 2:
            offset += L
        prev_mod = c
        unwrapped.append(c + offset)
    return np.array(unwrapped)


def _fit_line(t, x):
    n = len(t)
    tb, xb = np.mean(t), np.mean(x)
    st2 = float(np.sum((t - tb) ** 2))
    slope = float(np.sum((t - tb) * (x - xb)) / st2)
    resid = x - xb - slope * (t - tb)
    dof = max(n - 2, 1)
    stderr = math.sqrt(float(np.sum(resid ** 2)) / dof / st2)
    return slope, stderr


def measure_velocity(params: ModelParams, run: SgpeRunConfig, L: int = 128,
                     Ly: int = 0) -> FrontTrace:
    """Front velocity from the full lattice dynamics.

    Inserts a wall between the two stable mean-field amplitudes (bright on
    the left), integrates (noiseless unless run.noise_on), discards the
    shape-relaxation transient, and fits position vs time.  Ly > 0 runs a 2D
    torus with a y-invariant interface and tracks the column-averaged sigma.
    """
    chart = to_ising_chart(params)
    if chart.r >= 0:
        raise PreconditionError(f"measure_velocity needs r < 0, got r = {chart.r:.4g}")
    if L < 16:
        raise PreconditionError("ring too small for an isolated wall (L >= 16)")
    branches = [b for b in steady_state_roots(params) if b.stable]
    if len(branches) != 2:
        raise PreconditionError(
            f"need exactly 2 stable branches inside the bistable region, got {len(branches)}")
    dark, bright = branches[0], branches[-1]
    cp = critical_point(params)
    pos0 = L // 2
    if Ly:
        field = np.empty((L, Ly), dtype=np.complex128)
        field[:pos0, :] = bright.amplitude
        field[pos0:, :] = dark.amplitude
        p2 = params.replace(dims=2)
    else:
        field = np.empty(L, dtype=np.complex128)
        field[:pos0] = bright.amplitude
        field[pos0:] = dark.amplitude
        p2 = params.replace(dims=1)

    def sigma_profile(f):
        s, _ = project_sigma(f, cp)
        return s.mean(axis=1) if s.ndim == 2 else s.copy()

    rec = integrate(field, p2, run, observers={"sigma": sigma_profile})
    snaps = np.asarray(rec.observables["sigma"])
    times = rec.times
    positions = track_front(snaps, start=pos0 - 0.5)

    # transient: wait for the co-moving profile to stop changing shape
    sigma0 = math.sqrt(abs(chart.r) / chart.g)
    thresh = TRANSIENT_RATE_FACTOR * sigma0
    start_k = 0
    for k in range(len(snaps) - 1):
        shift = int(round(positions[k + 1] - positions[k]))
        d = np.roll(snaps[k + 1], -shift) - snaps[k]
        rate = float(np.linalg.norm(d) / math.sqrt(snaps.shape[1])) / max(times[k + 1] - times[k], 1e-30)
        if rate < thresh:
            start_k = k + 1
            break
    else:
        start_k = len(snaps) // 2

    if len(times) - start_k < MIN_FIT_SAMPLES:
        start_k = max(0, len(times) - MIN_FIT_SAMPLES)
    if len(times) - start_k < MIN_FIT_SAMPLES:
        raise PreconditionError(
            f"fit window holds {len(times) - start_k} samples; need >= {MIN_FIT_SAMPLES} "
            "(lengthen the run or record more often)")
    tw, xw = times[start_k:], positions[start_k:]
    v, err = _fit_line(tw, xw)
    return FrontTrace(times=times, positions=positions, fit_velocity=v,
                      fit_stderr=err, fit_window=(float(tw[0]), float(tw[-1])))


def analytic_velocity(chart: IsingChart) -> float:
    """First-order-in-h wall velocity, v = (3h/2) sqrt(K g / 2 r^2)."""
    if chart.r == 0:
        raise ParameterDomainError("analytic velocity diverges at r = 0")
    if chart.r > 0:
        raise ParameterDomainError("no domain walls outside the bistable region (r > 0)")
    return 1.5 * chart.h * math.sqrt(chart.K * chart.g / (2.0 * chart.r ** 2))


def _potential_extrema(chart: IsingChart):
    """Stationary points of U = (r s^2 + g s^4 / 2 + h s)/2 inside the spinodal."""
    roots = _cubic_real_roots(chart.g, 0.0, chart.r, 0.5 * chart.h)
    if len(roots) != 3:
        raise ParameterDomainError(
            "spinodal exceeded: the tilted double well has lost one extremum")
    s_minus, s_mid, s_plus = sorted(roots)
    return s_minus, s_mid, s_plus


def _U(s, chart):
    return 0.5 * (chart.r * s * s + 0.5 * chart.g * s ** 4 + chart.h * s)


def _Upp(s, chart):
    return chart.r + 3.0 * chart.g * s * s


def shooting_velocity(chart: IsingChart, tol: float = 1e-8) -> float:
    """Wall velocity from the traveling-wave two-point problem.

    The fictitious particle (mass K, friction v) leaves the higher maximum
    of -U along its unstable manifold; v is bisected between overshoot (too
    little friction) and turn-back (too much).  Signed so that the rising
    kink convention of measure_velocity is matched (odd in h).
    """
    if chart.r >= 0:
        raise ParameterDomainError("shooting needs r < 0")
    if chart.K <= 0:
        raise ParameterDomainError("shooting needs K > 0")
    s_minus, _, s_plus = _potential_extrema(chart)
    if _U(s_minus, chart) <= _U(s_plus, chart):
        start, end = s_minus, s_plus
    else:
        start, end = s_plus, s_minus
    if abs(chart.h) < 1e-12:
        return 0.0

    span = end - start
    direction = math.copysign(1.0, span)
    K = chart.K
    width = math.sqrt(K / max(2.0 * abs(chart.r), 1e-12))
    dtau = width / 50.0
    tau_max = 2000.0 * width
    margin = 0.02 * abs(span)
    eps = 1e-7 * abs(span)

    def classify(v):
        """+1 overshoot (v too small), -1 turn-back (v too large)."""
        upp = _Upp(start, chart)
        lam = (-v + math.sqrt(v * v + 4.0 * K * upp)) / (2.0 * K)
        s = start + direction * eps
        w = direction * eps * lam

        def acc(si, wi):
            return (-v * wi + chart.r * si + chart.g * si ** 3 + 0.5 * chart.h) / K

        tau = 0.0
        while tau < tau_max:
            k1s, k1w = w, acc(s, w)
            k2s, k2w = w + 0.5 * dtau * k1w, acc(s + 0.5 * dtau * k1s, w + 0.5 * dtau * k1w)
            k3s, k3w = w + 0.5 * dtau * k2w, acc(s + 0.5 * dtau * k2s, w + 0.5 * dtau * k2w)
            k4s, k4w = w + dtau * k3w, acc(s + dtau * k3s, w + dtau * k3w)
            s += dtau / 6.0 * (k1s + 2 * k2s + 2 * k3s + k4s)
            w += dtau / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w)
            tau += dtau
            if direction * (s - end) > margin:
                return +1
            if direction * w < 0.0 and direction * (s - end) < -margin:
                return -1
        return -1  # asymptotic crawl: friction at least critical

    v_lo = 0.0
    if classify(v_lo) < 0:
        return 0.0
    v_hi = max(10.0 * abs(analytic_velocity(chart)), 1e-4)
    tries = 0
    while classify(v_hi) > 0:
        v_hi *= 2.0
        tries += 1
        if tries > 60:
            raise BracketingError("shooting: could not bracket the critical friction")
    while v_hi - v_lo > tol:
        vm = 0.5 * (v_lo + v_hi)
        if classify(vm) > 0:
            v_lo = vm
        else:
            v_hi = vm
    v = 0.5 * (v_lo + v_hi)
    return math.copysign(v, chart.h)


def spinodal_h(r: float, g: float) -> float:
    """|h| above which the tilted double well loses one of its minima."""
    return (4.0 / 3.0) * abs(r) * math.sqrt(abs(r) / (3.0 * g))


def zero_velocity_h(base: ModelParams, r: float, h_bracket=None,
                    L: int = 128, t_end: float = 800.0,
                    tol_h: float = None) -> float:
    """Numerical zero of the measured wall velocity at fixed r, by bisection
    on the sign of measure_velocity."""
    if r >= 0:
        raise ParameterDomainError("zero_velocity_h needs r < 0")
    if h_bracket is None:
        # the zero can sit well off h = 0 away from criticality; bracket as
        # much of the coexistence wedge as the spinodal allows (the chart
        # estimate of the spinodal is near-critical, so walk each end in
        # until the cubic really has two stable branches)
        g = to_ising_chart(base).g
        half = 0.85 * spinodal_h(r, g)
        h_bracket = [-half, half]
        for side in (0, 1):
            for _ in range(16):
                p = from_ising_chart(r, h_bracket[side], base)
                stable = sum(1 for b in steady_state_roots(p) if b.stable)
                if stable == 2:
                    break
                h_bracket[side] *= 0.8
            else:
                raise BracketingError(
                    f"no bistable wedge found around h = 0 at r = {r:.4g}")
        h_bracket = tuple(h_bracket)
    if tol_h is None:
        tol_h = 0.02 * abs(r)

    def vel(h):
        p = from_ising_chart(r, h, base)
        t = t_end
        for _ in range(6):
            dt = default_dt(p)
            run = SgpeRunConfig(t_end=t, dt=dt, noise_on=False,
                                record_every=max(1, int(round(t / dt / 400))),
                                burn_in=0.0)
            try:
                tr = measure_velocity(p, run, L=L)
                return tr.fit_velocity, tr.fit_stderr
            except WallCollisionError:
                t /= 2.0  # fast wall: plenty of signal in a shorter run
        raise WallCollisionError(
            f"walls collide even at t_end = {t:.3g}; enlarge the ring")

    def is_zero(v, err):
        # a lattice-pinned wall sits exactly still over a finite h band;
        # any velocity lost in the fit noise counts as a zero
        return abs(v) < max(5.0 * err, 1e-7)

    h_lo, h_hi = h_bracket
    v_lo, e_lo = vel(h_lo)
    if is_zero(v_lo, e_lo):
        return h_lo
    v_hi, e_hi = vel(h_hi)
    if is_zero(v_hi, e_hi):
        return h_hi
    if v_lo * v_hi > 0:
        raise BracketingError(
            f"velocity does not change sign over h in [{h_lo:.4g}, {h_hi:.4g}] "
            f"(v = {v_lo:.3g}, {v_hi:.3g})")
    while h_hi - h_lo > tol_h:
        hm = 0.5 * (h_lo + h_hi)
        vm, em = vel(hm)
        if is_zero(vm, em):
            return hm
        if vm * v_lo > 0:
            h_lo, v_lo = hm, vm
        else:
            h_hi, v_hi = hm, vm
    return 0.5 * (h_lo + h_hi)
