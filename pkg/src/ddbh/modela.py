"""Reduced scalar-field theory: sigma projection, Landau energy, Model-A
relaxational dynamics, and the parameter map from the microscopic model.

The complex deviation from the critical amplitude decomposes uniquely as

    Psi - Psi_c = rho + exp(i pi/3) sigma

with rho the fast (massive) direction and sigma the slow order parameter.
Near the cusp the sigma dynamics is purely relaxational,

    d sigma / d tau = - dH/d sigma + xi,    tau = t mu,

with the Landau energy

    H = 1/2 sum_j [ K |grad sigma|^2 + r sigma^2 + (g/2) sigma^4 + h sigma ].

Sampler convention: the stepper injects noise of rate Gamma = 2 T so that
its stationary law is exactly the Boltzmann weight exp(-H / T) at
T = T_eff = kappa / (3 scaleN).  (A Langevin equation with noise variance
Gamma has stationary temperature Gamma/2, so quoting the weight
exp(-H/T_eff) fixes Gamma = 2 T_eff.)
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import engine
from .errors import ParameterDomainError
from .lattice import laplacian
from .params import CriticalPoint, ModelParams, to_ising_chart
from .rng import CounterNoise

BLOWUP_CAP_SIGMA = 50.0  # in units of max(sigma_0, 1)

_E_PI3 = complex(math.cos(math.pi / 3.0), math.sin(math.pi / 3.0))
_SIN60 = math.sin(math.pi / 3.0)


@dataclass(frozen=True)
class ModelAParams:
    K: float
    r: float
    h: float
    g: float
    T_eff: float
    dt: Optional[float] = None
    seed: int = 0
    dims: int = 1

    def __post_init__(self):
        if self.K < 0 or self.g <= 0:
            raise ParameterDomainError(f"need K >= 0 and g > 0, got K={self.K}, g={self.g}")
        if self.T_eff < 0:
            raise ParameterDomainError(f"T_eff must be >= 0, got {self.T_eff}")

    @property
    def z(self) -> int:
        return 2 * self.dims

    @property
    def noise_rate(self) -> float:
        """White-noise variance coefficient Gamma = 2 T_eff (see module docstring)."""
        return 2.0 * self.T_eff

    def replace(self, **kw) -> "ModelAParams":
        return replace(self, **kw)


def derive_modela_params(params: ModelParams) -> ModelAParams:
    """Reduced-theory constants from the microscopic model, in mu-units.

    Times in the reduced dynamics are tau = t * mu.  Soft validity check:
    warns when |r| > 0.3 mu (the adiabatic elimination is perturbative in r).
    """
    p = params.in_mu_units()
    chart = to_ising_chart(p)
    if abs(chart.r) > 0.3:
        warnings.warn(f"|r| = {abs(chart.r):.3f} mu: reduced theory is stretched "
                      "this far from the critical point", stacklevel=2)
    return ModelAParams(K=chart.K, r=chart.r, h=chart.h, g=chart.g,
                        T_eff=chart.T_eff, dims=p.dims)


def project_sigma(field: np.ndarray, cp: CriticalPoint):
    """Decompose Psi - Psi_c into (sigma, rho) real fields."""
    dpsi = field - cp.psi_c
    sigma = dpsi.imag / _SIN60
    rho = dpsi.real - 0.5 * sigma
    return sigma, rho


def reconstruct_field(sigma: np.ndarray, rho: np.ndarray, cp: CriticalPoint) -> np.ndarray:
    return cp.psi_c + rho + _E_PI3 * sigma


def effective_hamiltonian(sigma: np.ndarray, p: ModelAParams) -> float:
    """Landau energy; the gradient term counts each bond once and satisfies
    -sum sigma lap(sigma) = sum_bonds (delta sigma)^2 exactly."""
    bonds = 0.0
    for axis in range(sigma.ndim):
        d = sigma - np.roll(sigma, -1, axis=axis)
        bonds += float(np.sum(d * d))
    site = float(np.sum(p.r * sigma ** 2 + 0.5 * p.g * sigma ** 4 + p.h * sigma))
    return 0.5 * (p.K * bonds + site)


def grad_hamiltonian(sigma: np.ndarray, p: ModelAParams) -> np.ndarray:
    """dH/d sigma_j = -K lap(sigma) + r sigma + g sigma^3 + h/2."""
    return (-p.K) * laplacian(sigma) + p.r * sigma + p.g * sigma ** 3 + 0.5 * p.h


def sigma_cap(p: ModelAParams) -> float:
    sigma0 = math.sqrt(abs(p.r) / p.g) if p.r < 0 else 0.0
    return BLOWUP_CAP_SIGMA * max(sigma0, 1.0)


def default_dt(p: ModelAParams) -> float:
    """0.05 / max(|r|, g sigma_0^2, 2 z K); the curvature scales of the well
    and of the stiffest lattice mode."""
    scales = [abs(p.r), 2.0 * p.z * p.K]
    if p.r < 0:
        scales.append(p.g * (abs(p.r) / p.g))  # g sigma_0^2 = |r|
    top = max(s for s in scales if s > 0) if any(s > 0 for s in scales) else 1.0
    return 0.05 / top


def modela_step(sigma: np.ndarray, p: ModelAParams, xi: Optional[np.ndarray] = None,
                dt: Optional[float] = None) -> np.ndarray:
    """One forward-Euler step sigma - dt dH/dsigma + xi dt.

    xi is the white-noise field for this step (variance noise_rate/dt per
    site); pass None for noiseless descent.
    """
    dt = dt if dt is not None else (p.dt if p.dt is not None else default_dt(p))
    out = sigma - dt * grad_hamiltonian(sigma, p)
    if xi is not None:
        out = out + dt * xi
    cap = sigma_cap(p)
    mx = float(np.max(np.abs(out)))
    if not np.isfinite(mx) or mx > cap:
        from .errors import IntegrationBlowupError
        raise IntegrationBlowupError(0, mx, cap)
    return out


def sample_xi(rng, dt: float, p: ModelAParams, shape=()) -> np.ndarray:
    """Per-step real noise with variance noise_rate/dt, so xi*dt has
    variance noise_rate*dt."""
    return math.sqrt(p.noise_rate / dt) * rng.standard_normal(shape)


@dataclass
class ModelARecord:
    times: np.ndarray
    sigma_mean: np.ndarray
    snapshots: Optional[np.ndarray]
    seed: int
    dt: float
    final_sigma: np.ndarray


def integrate_modela(sigma: np.ndarray, p: ModelAParams, t_end: float,
                     dt: Optional[float] = None, seed: Optional[int] = None,
                     record_every: int = 1, noise_on: bool = True,
                     keep_snapshots: bool = False,
                     noise_stream=None) -> ModelARecord:
    """Advance Model-A dynamics, recording the mean of sigma (and optionally
    full snapshots) every record_every steps."""
    sigma = np.array(sigma, dtype=np.float64, copy=True)
    dt = dt if dt is not None else (p.dt if p.dt is not None else default_dt(p))
    seed = seed if seed is not None else p.seed
    if noise_on and noise_stream is None:
        noise_stream = CounterNoise(seed, sigma.size, complex_field=False)
    elif not noise_on:
        noise_stream = None
    cap = sigma_cap(p)
    n_steps = int(round(t_end / dt))
    times, means, snaps = [], [], []
    step = 0
    while True:
        times.append(step * dt)
        means.append(float(np.mean(sigma)))
        if keep_snapshots:
            snaps.append(sigma.copy())
        if step >= n_steps:
            break
        chunk = min(record_every, n_steps - step)
        engine.advance_modela(sigma, p, dt, step, chunk, noise_stream,
                              p.noise_rate, cap)
        step += chunk
    return ModelARecord(
        times=np.array(times), sigma_mean=np.array(means),
        snapshots=np.array(snaps) if keep_snapshots else None,
        seed=seed, dt=dt, final_sigma=sigma,
    )


# ---------------------------------------------------------------------------
# two-site thermal-equilibrium check (quadrature oracle)

def two_site_hamiltonian(s1, s2, p: ModelAParams):
    """Energy of the L=2 ring (double bond) as arrays over (s1, s2)."""
    bond = 2.0 * (s1 - s2) ** 2
    site = (p.r * (s1 ** 2 + s2 ** 2) + 0.5 * p.g * (s1 ** 4 + s2 ** 4)
            + p.h * (s1 + s2))
    return 0.5 * (p.K * bond + site)


def two_site_boltzmann_marginal(p: ModelAParams, T: float, half_width=None,
                                n_grid=801):
    """Marginal CDF of sigma_1 under exp(-H/T) by direct 2D quadrature."""
    sigma0 = math.sqrt(abs(p.r) / p.g) if p.r < 0 else (T / max(p.g, 1e-12)) ** 0.25
    if half_width is None:
        width = math.sqrt(T / max(abs(p.r), 1e-9))
        half_width = sigma0 + 8.0 * max(width, 0.05)
    x = np.linspace(-half_width, half_width, n_grid)
    s1, s2 = np.meshgrid(x, x, indexing="ij")
    ham = two_site_hamiltonian(s1, s2, p)
    w = np.exp(-(ham - ham.min()) / T)
    pdf = np.trapezoid(w, x, axis=1)
    pdf /= np.trapezoid(pdf, x)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(x))])
    cdf /= cdf[-1]
    return x, pdf, cdf


def ks_distance(samples: np.ndarray, grid_x: np.ndarray, grid_cdf: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance of samples against a tabulated CDF."""
    s = np.sort(np.asarray(samples, dtype=float))
    cdf_at = np.interp(s, grid_x, grid_cdf)
    n = len(s)
    emp_hi = np.arange(1, n + 1) / n
    emp_lo = np.arange(0, n) / n
    return float(max(np.max(np.abs(emp_hi - cdf_at)), np.max(np.abs(cdf_at - emp_lo))))


def two_site_equilibrium_check(p: ModelAParams, n_chains=64, t_sample=30000.0,
                               burn=3000.0, dt=None, seed=1234,
                               thin=20):
    """Sample the two-site stationary law and compare each marginal to the
    quadrature CDF of exp(-H/T_eff).  Returns (ks_sigma1, ks_sigma2, n_samples).

    Half of the chains start in each well so symmetric parameter points mix
    without waiting for rare barrier crossings.
    """
    dt = dt if dt is not None else min(default_dt(p), 0.05)
    T = p.T_eff
    sigma0 = math.sqrt(abs(p.r) / p.g) if p.r < 0 else 0.1
    sig = np.empty((n_chains, 2))
    sig[: n_chains // 2] = +sigma0
    sig[n_chains // 2:] = -sigma0
    stream = CounterNoise(seed, sig.size, complex_field=False)
    cap = sigma_cap(p)
    burn_steps = int(round(burn / dt))
    engine.advance_modela(sig, p, dt, 0, burn_steps, stream, p.noise_rate, cap)
    n_samp_steps = int(round(t_sample / dt))
    rows1, rows2 = [], []
    step = burn_steps
    taken = 0
    while taken < n_samp_steps:
        chunk = min(thin, n_samp_steps - taken)
        engine.advance_modela(sig, p, dt, step, chunk, stream, p.noise_rate, cap)
        step += chunk
        taken += chunk
        rows1.append(sig[:, 0].copy())
        rows2.append(sig[:, 1].copy())
    s1 = np.concatenate(rows1)
    s2 = np.concatenate(rows2)
    x, _, cdf = two_site_boltzmann_marginal(p, T)
    return ks_distance(s1, x, cdf), ks_distance(s2, x, cdf), len(s1)
