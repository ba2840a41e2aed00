"""Homogeneous mean-field steady states of the driven-dissipative lattice.

The uniform steady state obeys the cubic

    N ((mu - u N)^2 + kappa^2/4) = omega^2,      N = |Psi|^2,

with the complex amplitude reconstructed from

    Psi = omega / ((mu - u N) + i kappa/2).

Dynamical stability is decided by the 2x2 linearization of the equation of
motion in (dPsi, conj(dPsi)); its eigenvalues are

    lambda_{+-} = -kappa/2 +- sqrt(u^2 N^2 - (mu - 2 u N)^2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterDomainError, PreconditionError
from .params import ModelParams

STABILITY_MARGIN = 1e-9      # |Re lambda| below this is "marginal", not stable
DEGENERACY_RTOL = 1e-6       # relative root separation treated as degenerate


@dataclass(frozen=True)
class MeanFieldBranch:
    density: float
    amplitude: complex
    stable: bool
    eigenvalues: tuple
    marginal: bool = False
    degenerate: bool = False


@dataclass(frozen=True)
class StabilityResult:
    eigenvalues: tuple
    stable: bool
    marginal: bool


def cubic_residual(N, params: ModelParams) -> float:
    """Residual of the steady-state cubic at density N."""
    mu, u, kappa, omega = params.mu, params.u, params.kappa, params.omega
    return N * ((mu - u * N) ** 2 + kappa ** 2 / 4.0) - omega ** 2


def _cubic_real_roots(a, b, c, d):
    """Real roots of a x^3 + b x^2 + c x + d, Cardano with the trig branch
    for the three-real-root case (numerically stable, no linear algebra)."""
    b, c, d = b / a, c / a, d / a
    # depressed cubic t^3 + p t + q, x = t - b/3
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    disc = -4.0 * p ** 3 - 27.0 * q * q
    # degeneracy detection at the natural root scale: p ~ R^2, q ~ R^3,
    # disc ~ R^6 for well-separated roots
    R = max(abs(shift), abs(p) ** 0.5, abs(q) ** (1.0 / 3.0))
    if R == 0.0:
        return [shift, shift, shift]
    if abs(disc) < 1e-10 * R ** 6:
        if abs(p) < 1e-10 * R * R:
            return [shift, shift, shift]
        # disc = 0 with p < 0: double root at -3q/2p, simple at 3q/p
        dbl = -3.0 * q / (2.0 * p)
        simple = 3.0 * q / p
        return sorted([dbl + shift, dbl + shift, simple + shift])
    if disc > 0.0:
        # three real roots
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        arg = min(1.0, max(-1.0, arg))
        theta = math.acos(arg)
        return sorted(m * math.cos((theta - 2.0 * math.pi * k) / 3.0) + shift
                      for k in range(3))
    # one real root
    if q == 0.0:
        return [shift]
    w = -q / 2.0 + cmath.sqrt(q * q / 4.0 + p ** 3 / 27.0)
    cr = w ** (1.0 / 3.0)
    t = cr + (-p / 3.0) / cr
    return [t.real + shift]


def _polish_root(N, params: ModelParams, iters=2):
    """Newton-polish a density root of the cubic."""
    mu, u, kappa = params.mu, params.u, params.kappa
    for _ in range(iters):
        f = cubic_residual(N, params)
        df = (mu - u * N) ** 2 + kappa ** 2 / 4.0 - 2.0 * u * N * (mu - u * N)
        if df != 0.0:
            N = N - f / df
    return N


def amplitude_from_density(N, params: ModelParams) -> complex:
    """Complex steady-state amplitude at density N."""
    denom = (params.mu - params.u * N) + 0.5j * params.kappa
    return params.omega / denom


def linear_stability(params: ModelParams, amplitude: complex,
                     check_steady: bool = True) -> StabilityResult:
    """Eigenvalues of the homogeneous (k=0) linearization around a steady state.

    Raises PreconditionError if the amplitude does not solve the steady-state
    equation to 1e-8 (skipped with check_steady=False, used internally when
    the root was just polished).
    """
    mu, u, kappa, omega = params.mu, params.u, params.kappa, params.omega
    N = abs(amplitude) ** 2
    if check_steady:
        resid = abs(-(mu + 0.5j * kappa) * amplitude + omega + u * N * amplitude)
        if resid > 1e-8 * max(1.0, omega):
            raise PreconditionError(
                f"amplitude is not a steady state: residual {resid:.3e}")
    det = u * u * N * N - (mu - 2.0 * u * N) ** 2
    root = cmath.sqrt(det)
    lam1 = -0.5 * kappa + root
    lam2 = -0.5 * kappa - root
    res = sorted((lam1, lam2), key=lambda z: z.real, reverse=True)
    marginal = any(abs(l.real) <= STABILITY_MARGIN for l in res)
    stable = all(l.real < -STABILITY_MARGIN for l in res)
    return StabilityResult(eigenvalues=tuple(res), stable=stable, marginal=marginal)


def steady_state_roots(params: ModelParams):
    """All homogeneous mean-field branches, sorted by density.

    Returns 1-3 MeanFieldBranch entries.  Nearly coincident densities
    (relative separation < 1e-6) are kept as distinct entries carrying
    degenerate=True.
    """
    if params.omega < 0:
        raise ParameterDomainError("omega must be >= 0")
    mu, u, kappa, omega = params.mu, params.u, params.kappa, params.omega
    if omega == 0.0:
        branch = MeanFieldBranch(
            density=0.0, amplitude=0.0 + 0.0j,
            **_stability_fields(params, 0.0 + 0.0j))
        return [branch]
    # N ((mu - uN)^2 + kappa^2/4) = omega^2 expanded in powers of N
    a = u * u
    b = -2.0 * mu * u
    c = mu * mu + kappa * kappa / 4.0
    d = -omega * omega
    roots = [_polish_root(N, params) for N in _cubic_real_roots(a, b, c, d)]
    roots = sorted(N for N in roots if N > 0.0 or abs(N) < 1e-14)
    # mark nearly-degenerate pairs
    degenerate = [False] * len(roots)
    for i in range(len(roots) - 1):
        scale = max(abs(roots[i]), abs(roots[i + 1]), 1e-300)
        if abs(roots[i + 1] - roots[i]) < DEGENERACY_RTOL * scale:
            degenerate[i] = degenerate[i + 1] = True
    out = []
    for N, dg in zip(roots, degenerate):
        amp = amplitude_from_density(N, params)
        out.append(MeanFieldBranch(
            density=N, amplitude=amp, degenerate=dg,
            **_stability_fields(params, amp)))
    return out


def _stability_fields(params, amplitude):
    st = linear_stability(params, amplitude, check_steady=False)
    return {"stable": st.stable, "eigenvalues": st.eigenvalues,
            "marginal": st.marginal}


def bistable_mask(kappa_grid, omega_grid, params: ModelParams):
    """Root and stable-root counts on a (kappa, omega) grid.

    Returns (root_count, stable_count) integer arrays of shape
    (len(kappa_grid), len(omega_grid)).
    """
    kappa_grid = np.asarray(kappa_grid, dtype=float)
    omega_grid = np.asarray(omega_grid, dtype=float)
    root_count = np.zeros((kappa_grid.size, omega_grid.size), dtype=int)
    stable_count = np.zeros_like(root_count)
    for i, kap in enumerate(kappa_grid):
        for j, om in enumerate(omega_grid):
            branches = steady_state_roots(params.replace(kappa=float(kap), omega=float(om)))
            root_count[i, j] = len(branches)
            stable_count[i, j] = sum(1 for br in branches if br.stable)
    return root_count, stable_count
