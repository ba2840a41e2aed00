"""Exact single-cavity oracle: truncated-Fock Lindblad dynamics, steady
state, photon counting statistics, and jump-unraveled quantum trajectories.

Physical (unrescaled) parameters: detuning delta, interaction U, drive
Omega, loss kappa.  The rescaled lattice parameters map through
U = u / scaleN, Omega = omega * sqrt(scaleN) at J = 0, mu = delta.

The generator is applied elementwise in the Fock basis (shifted-diagonal
structure of a single driven Kerr cavity), so one right-hand side costs
O(D^2) with no matrix products; a dense matrix-product formula is kept as a
cross-check oracle for the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DdbhError, ParameterDomainError, ResourceLimitError
from .params import ModelParams

HARD_CUTOFF = 512
TAIL_TOL = 1e-8


@dataclass(frozen=True)
class CavityParams:
    delta: float
    U: float
    kappa: float
    Omega: float

    def __post_init__(self):
        if self.kappa <= 0:
            raise ParameterDomainError("kappa must be > 0")

    @classmethod
    def from_model(cls, p: ModelParams) -> "CavityParams":
        if p.J != 0.0:
            raise ParameterDomainError("single-cavity oracle requires J = 0")
        return cls(delta=p.mu, U=p.u / p.scaleN, kappa=p.kappa,
                   Omega=p.omega * math.sqrt(p.scaleN))


@dataclass
class DensityMatrix:
    """Truncated-Fock state with its cutoff."""

    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def validate(self, tail_tol=TAIL_TOL, psd_floor=-1e-8):
        rho = self.entries
        if abs(np.trace(rho).real - 1.0) > 1e-10 or abs(np.trace(rho).imag) > 1e-10:
            raise DdbhError(f"trace = {np.trace(rho):.12g}, expected 1")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise DdbhError("density matrix is not Hermitian to 1e-10")
        evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if evals.min() < psd_floor:
            raise DdbhError(f"negative eigenvalue {evals.min():.3e}")
        if rho[-1, -1].real > tail_tol:
            raise DdbhError(
                f"tail occupancy P(D-1) = {rho[-1, -1].real:.3e} exceeds {tail_tol}")
        return self


class LindbladOperator:
    """Cached elementwise generator for one cavity at a fixed cutoff."""

    def __init__(self, cav: CavityParams, dim: int):
        self.cav = cav
        self.dim = dim
        n = np.arange(dim, dtype=float)
        self.n = n
        self.energies = -cav.delta * n + 0.5 * cav.U * n * (n - 1.0)
        self.ediff = self.energies[:, None] - self.energies[None, :]
        self.sq = np.sqrt(n[1:])                     # sqrt(1..D-1)
        self.jump_w = np.outer(self.sq, self.sq)     # sqrt((m+1)(n+1))
        self.decay = 0.5 * (n[:, None] + n[None, :])

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        cav = self.cav
        out = (-1j) * self.ediff * rho
        drive = np.zeros_like(rho)
        drive[:-1, :] += self.sq[:, None] * rho[1:, :]    # sqrt(m+1) rho_{m+1,n}
        drive[1:, :] += self.sq[:, None] * rho[:-1, :]    # sqrt(m) rho_{m-1,n}
        drive[:, 1:] -= self.sq[None, :] * rho[:, :-1]    # sqrt(n) rho_{m,n-1}
        drive[:, :-1] -= self.sq[None, :] * rho[:, 1:]    # sqrt(n+1) rho_{m,n+1}
        out += (-1j * cav.Omega) * drive
        out[:-1, :-1] += cav.kappa * self.jump_w * rho[1:, 1:]
        out -= cav.kappa * self.decay * rho
        return out

    def rk4_dt(self) -> float:
        # coherences rotate at |E_m - E_n| <= span; kappa D bounds the
        # dissipative ladder and 4 Omega sqrt(D) the drive mixing.  RK4 is
        # stable to |lambda dt| < 2.8 on the imaginary axis.
        cav, D = self.cav, self.dim
        span = float(self.energies.max() - self.energies.min())
        lam = span + cav.kappa * D + 4.0 * abs(cav.Omega) * math.sqrt(D)
        return 2.4 / max(lam, 1e-12)

    def rk4_step(self, rho, dt):
        k1 = self.rhs(rho)
        k2 = self.rhs(rho + 0.5 * dt * k1)
        k3 = self.rhs(rho + 0.5 * dt * k2)
        k4 = self.rhs(rho + dt * k3)
        return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def run(self, rho, dt, nsteps):
        """Advance nsteps RK4 steps in place through the selected backend."""
        from . import engine
        kern = engine.get_backend()
        rho = np.ascontiguousarray(rho, dtype=complex)
        kern.lindblad_run(rho, self.energies, np.ascontiguousarray(self.sq),
                          self.cav.kappa, self.cav.Omega, dt, nsteps)
        return rho


def lindblad_rhs(rho: np.ndarray, cav: CavityParams) -> np.ndarray:
    """d rho / dt for one cavity (trace-free by construction)."""
    return LindbladOperator(cav, rho.shape[0]).rhs(rho)


def lindblad_rhs_matrix(rho: np.ndarray, cav: CavityParams) -> np.ndarray:
    """Dense matrix-product form of the same generator (test oracle)."""
    D = rho.shape[0]
    a = np.diag(np.sqrt(np.arange(1, D)), 1).astype(complex)
    n = a.conj().T @ a
    H = -cav.delta * n + 0.5 * cav.U * (n @ n - n) + cav.Omega * (a + a.conj().T)
    ad = a.conj().T
    return (-1j * (H @ rho - rho @ H)
            + 0.5 * cav.kappa * (2.0 * a @ rho @ ad - rho @ ad @ a - ad @ a @ rho))


def coherent_state(alpha: complex, dim: int) -> np.ndarray:
    """Amplitude vector of |alpha> in the truncated basis, renormalized."""
    vec = np.zeros(dim, dtype=complex)
    vec[0] = 1.0
    for k in range(1, dim):
        vec[k] = vec[k - 1] * alpha / math.sqrt(k)
    return vec / np.linalg.norm(vec)


def _mean_field_amplitudes(cav: CavityParams):
    from .meanfield import steady_state_roots
    p = ModelParams(J=0.0, delta=cav.delta, kappa=cav.kappa, u=cav.U,
                    omega=cav.Omega, scaleN=1.0, dims=1)
    return steady_state_roots(p)


def initial_cutoff(cav: CavityParams) -> int:
    """Cover the highest mean-field branch with Poisson-tail headroom.

    Capped below 4*n_max + 20 so that large-occupancy points stay well under
    the hard cutoff; the tail invariant triggers growth if this guess is
    ever too tight.
    """
    n_max = max(b.density for b in _mean_field_amplitudes(cav))
    d_spec = int(math.ceil(4.0 * n_max + 20.0))
    d_tail = int(math.ceil(n_max + 7.0 * math.sqrt(max(n_max, 1.0)) + 14.0))
    return min(d_spec, d_tail)


def default_initial_state(cav: CavityParams, dim: int,
                          branch: str = "mixture") -> np.ndarray:
    """Coherent state(s) at the stable mean-field amplitude(s).

    branch: 'mixture' (equal-weight mix over stable branches), 'bright',
    'dark', or 'vacuum'.
    """
    if branch == "vacuum":
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    stable = [b for b in _mean_field_amplitudes(cav) if b.stable]
    if branch == "bright":
        picks = [max(stable, key=lambda b: b.density)]
    elif branch == "dark":
        picks = [min(stable, key=lambda b: b.density)]
    else:
        picks = stable
    rho = np.zeros((dim, dim), dtype=complex)
    for b in picks:
        v = coherent_state(b.amplitude, dim)
        rho += np.outer(v, v.conj()) / len(picks)
    return rho


@dataclass
class SteadyStateResult:
    rho: DensityMatrix
    dim: int
    t_integrated: float
    rhs_norm: float
    grown: int


def steady_state(cav: CavityParams, tol: float = 1e-8,
                 rho0: Optional[np.ndarray] = None, dim: Optional[int] = None,
                 max_time: Optional[float] = None,
                 init_branch: str = "mixture") -> SteadyStateResult:
    """Long-time integration until ||d rho/dt||_1 < tol * kappa, growing the
    cutoff until the tail invariant P(D-1) < 1e-8 holds.

    The entrywise 1-norm is used for the residual.  Initial state defaults
    to an equal mixture of coherent states at the stable mean-field
    amplitudes, which reaches the metastability-resolved steady state
    without waiting out exponentially slow switching from a cold start.
    """
    D = int(dim) if dim else initial_cutoff(cav)
    if D > HARD_CUTOFF:
        raise ResourceLimitError(f"requested cutoff {D} exceeds {HARD_CUTOFF}")
    rho = None
    grown = 0
    t_total = 0.0
    while True:
        op = LindbladOperator(cav, D)
        if rho is None:
            rho = default_initial_state(cav, D, init_branch) if rho0 is None \
                else np.array(rho0, dtype=complex)
            if rho.shape[0] != D:
                rho = _embed(rho, D)
        dt = op.rk4_dt()
        budget = max_time if max_time is not None else 40000.0 / cav.kappa
        check_every = 100  # trace/hermiticity/positivity cadence
        steps = 0
        while True:
            rho = op.run(rho, dt, check_every)
            steps += check_every
            t_total += check_every * dt
            rho = 0.5 * (rho + rho.conj().T)
            tr = np.trace(rho).real
            if tr <= 0 or not np.isfinite(tr):
                raise DdbhError("trace collapsed during integration (reduce dt)")
            rho /= tr
            # transient RK4 error can dip an eigenvalue a hair below the
            # steady-state floor; the in-run guard only screens for real
            # instability (validate() enforces the -1e-8 floor on results)
            _positivity_guard(rho, floor=1e-6)
            resid = float(np.sum(np.abs(op.rhs(rho))))
            if resid < tol * cav.kappa:
                break
            if steps * dt > budget:
                raise DdbhError(
                    f"steady state not reached within t = {budget:.3g} "
                    f"(residual {resid:.3e})")
        if rho[-1, -1].real < TAIL_TOL:
            return SteadyStateResult(rho=DensityMatrix(rho), dim=D,
                                     t_integrated=t_total, rhs_norm=resid,
                                     grown=grown)
        new_D = int(math.ceil(D * 1.4)) + 8
        if new_D > HARD_CUTOFF:
            raise ResourceLimitError(
                f"cutoff growth exceeded the hard limit {HARD_CUTOFF} "
                f"(tail occupancy {rho[-1, -1].real:.3e})")
        rho = _embed(rho, new_D)
        D = new_D
        grown += 1


def _embed(rho, D):
    out = np.zeros((D, D), dtype=complex)
    d = min(rho.shape[0], D)
    out[:d, :d] = rho[:d, :d]
    tr = np.trace(out).real
    if tr > 0:
        out /= tr
    return out


def _positivity_guard(rho, floor=1e-8):
    """Cheap PSD floor check: rho + floor*I must be Cholesky-factorizable."""
    try:
        np.linalg.cholesky(rho + floor * np.eye(rho.shape[0]))
    except np.linalg.LinAlgError:
        raise DdbhError("density matrix lost positivity beyond the -1e-8 floor")


def photon_distribution(rho) -> np.ndarray:
    """P(n): diagonal of the density matrix."""
    mat = rho.entries if isinstance(rho, DensityMatrix) else rho
    return np.ascontiguousarray(np.diag(mat).real)


@dataclass
class BimodalPeaks:
    dark_mean: float
    bright_mean: float
    minimum_at: int
    depth_ratio: float  # smaller-peak height / inter-peak minimum height


def bimodal_peaks(P: np.ndarray, floor: float = 1e-5) -> BimodalPeaks:
    """Locate the two lobes of a bimodal counting distribution.

    Peak positions are reported as the conditional mean of each lobe (mass
    clusters around the mean-field densities; the raw argmax of a skewed
    low-n lobe sits below its mean and is not a useful locator).
    """
    idx = [i for i in range(1, len(P) - 1)
           if P[i] > P[i - 1] and P[i] >= P[i + 1] and P[i] > floor]
    if len(idx) < 2:
        raise DdbhError(f"distribution is not bimodal (found {len(idx)} peaks)")
    top2 = sorted(sorted(idx, key=lambda i: P[i])[-2:])
    lo, hi = top2
    split = lo + int(np.argmin(P[lo:hi + 1]))
    n = np.arange(len(P))
    dark = float(np.sum(n[:split] * P[:split]) / np.sum(P[:split]))
    bright = float(np.sum(n[split:] * P[split:]) / np.sum(P[split:]))
    depth = float(min(P[lo], P[hi]) / max(P[split], 1e-300))
    return BimodalPeaks(dark_mean=dark, bright_mean=bright,
                        minimum_at=split, depth_ratio=depth)


def mean_photon_number(rho) -> float:
    p = photon_distribution(rho)
    return float(np.sum(p * np.arange(len(p))))


def evolve_expectation(cav: CavityParams, rho0: np.ndarray, t_grid) -> np.ndarray:
    """Master-equation <n>(t) on the given time grid (RK4, fixed step)."""
    op = LindbladOperator(cav, rho0.shape[0])
    dt = op.rk4_dt()
    rho = np.array(rho0, dtype=complex)
    out = []
    t = 0.0
    narr = np.arange(rho0.shape[0])
    for target in t_grid:
        while t < target - 1e-12:
            step = min(dt, target - t)
            rho = op.rk4_step(rho, step)
            t += step
        out.append(float(np.real(np.sum(np.diag(rho).real * narr))))
    return np.array(out)


@dataclass
class TrajectoryResult:
    times: np.ndarray
    n_expect: np.ndarray   # (n_times,) or (n_times, n_traj)
    n_jumps: int


def mc_trajectory(cav: CavityParams, t_end: float, rng, dim: Optional[int] = None,
                  psi0: Optional[np.ndarray] = None, record_every: int = 10,
                  n_traj: int = 1) -> TrajectoryResult:
    """Jump-unraveled trajectories of the same master equation.

    Deterministic drift under H - i (kappa/2) n between norm-triggered
    jumps psi -> a psi / ||a psi||.  n_traj > 1 evolves a batch in lock-step
    (independent jump draws per trajectory).
    """
    D = int(dim) if dim else initial_cutoff(cav)
    n = np.arange(D, dtype=float)
    a_weights = np.sqrt(n[1:])
    E = -cav.delta * n + 0.5 * cav.U * n * (n - 1.0)
    Heff = np.diag(E - 0.5j * cav.kappa * n).astype(complex)
    idx = np.arange(D - 1)
    Heff[idx, idx + 1] += cav.Omega * a_weights
    Heff[idx + 1, idx] += cav.Omega * a_weights
    Heff *= -1j  # evolve dpsi/dt = -i Heff psi

    if psi0 is None:
        psi = np.zeros((D, n_traj), dtype=complex)
        psi[0, :] = 1.0
    else:
        psi = np.tile(np.asarray(psi0, dtype=complex).reshape(-1, 1), (1, n_traj))
        psi = psi / np.linalg.norm(psi, axis=0, keepdims=True)

    lam = float(max(abs(E.max()), abs(E.min()))) * 2 + cav.kappa * D / 2 \
        + 4 * abs(cav.Omega) * math.sqrt(D)
    dt = 2.0 / max(lam, 1e-12)
    nsteps = int(math.ceil(t_end / dt))
    dt = t_end / nsteps

    thresholds = rng.random(n_traj)
    times, records = [], []
    n_jumps = 0

    def record(t):
        w = np.abs(psi) ** 2
        dens = (n[:, None] * w).sum(axis=0) / w.sum(axis=0)
        times.append(t)
        records.append(dens.copy())

    record(0.0)
    for s in range(1, nsteps + 1):
        k1 = Heff @ psi
        k2 = Heff @ (psi + 0.5 * dt * k1)
        k3 = Heff @ (psi + 0.5 * dt * k2)
        k4 = Heff @ (psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        norms2 = np.einsum("ij,ij->j", psi.real, psi.real) \
            + np.einsum("ij,ij->j", psi.imag, psi.imag)
        jump_mask = norms2 < thresholds
        if np.any(jump_mask):
            cols = np.nonzero(jump_mask)[0]
            for c in cols:
                lowered = np.zeros(D, dtype=complex)
                lowered[:-1] = a_weights * psi[1:, c]
                nrm = np.linalg.norm(lowered)
                if nrm < 1e-300:
                    raise DdbhError("norm underflow at a jump (vacuum trapped?)")
                psi[:, c] = lowered / nrm
                thresholds[c] = rng.random()
                n_jumps += 1
        if s % record_every == 0 or s == nsteps:
            record(s * dt)

    n_expect = np.array(records)
    if n_traj == 1:
        n_expect = n_expect[:, 0]
    return TrajectoryResult(times=np.array(times), n_expect=n_expect,
                            n_jumps=n_jumps)
