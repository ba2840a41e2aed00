"""Model parameters, unit conventions, and the Ising-chart coordinate maps.

All internal formulas assume a single unit system; the canonical convention
is mu = 1 (config loading normalizes to it).  The chart coordinates (r, h)
parametrize deviations from the cusp of the bistable region:

    r = (kappa - kappa_c) / 2
    h = (4/sqrt(3)) (omega - omega_c) - sqrt(2 mu / 3 u) (kappa - kappa_c)

and the reduced-theory constants are K = J/sqrt(3), g = u/sqrt(3),
T_eff = kappa / (3 N) with N the dimensionless density scale.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

from .errors import ParameterDomainError

DEFAULT_SCALE_N = 50.0


@dataclass(frozen=True)
class ModelParams:
    """Microscopic parameters of one lattice run.

    J       hopping energy
    delta   drive-cavity detuning
    kappa   loss rate
    u       rescaled interaction (u = U * scaleN)
    omega   rescaled drive (omega = Omega / sqrt(scaleN))
    scaleN  dimensionless density scale (>= 1 not enforced; > 0 is)
    dims    lattice dimensionality, 1 or 2
    """

    J: float
    delta: float
    kappa: float
    u: float
    omega: float
    scaleN: float = DEFAULT_SCALE_N
    dims: int = 1

    def __post_init__(self):
        if self.kappa <= 0:
            raise ParameterDomainError(f"kappa must be > 0, got {self.kappa}")
        if self.u <= 0:
            raise ParameterDomainError(f"u must be > 0, got {self.u}")
        if self.omega < 0:
            raise ParameterDomainError(f"omega must be >= 0, got {self.omega}")
        if self.scaleN <= 0:
            raise ParameterDomainError(f"scaleN must be > 0, got {self.scaleN}")
        if self.dims not in (1, 2):
            raise ParameterDomainError(f"dims must be 1 or 2, got {self.dims}")

    @property
    def z(self) -> int:
        """Lattice coordination number, z = 2 * dims."""
        return 2 * self.dims

    @property
    def mu(self) -> float:
        """Effective chemical potential mu = delta + z*J (always recomputed)."""
        return self.delta + self.z * self.J

    @classmethod
    def from_mu(cls, mu, J, kappa, u, omega, scaleN=DEFAULT_SCALE_N, dims=1):
        """Construct with mu given instead of delta."""
        z = 2 * dims
        return cls(J=J, delta=mu - z * J, kappa=kappa, u=u, omega=omega,
                   scaleN=scaleN, dims=dims)

    def replace(self, **kw) -> "ModelParams":
        return replace(self, **kw)

    def in_mu_units(self) -> "ModelParams":
        """Rescale all energies by mu so that the result has mu = 1."""
        mu = self.mu
        if mu <= 0:
            raise ParameterDomainError(f"mu must be > 0 to normalize, got {mu}")
        return ModelParams(
            J=self.J / mu, delta=self.delta / mu, kappa=self.kappa / mu,
            u=self.u / mu, omega=self.omega / mu, scaleN=self.scaleN,
            dims=self.dims,
        )


@dataclass(frozen=True)
class CriticalPoint:
    """Cusp of the bistable region where the two branches merge."""

    kappa_c: float
    omega_c: float
    psi_c: complex
    n_c: float


@dataclass(frozen=True)
class IsingChart:
    """Ising-like coordinates and reduced-theory constants at one parameter point."""

    r: float
    h: float
    K: float
    g: float
    T_eff: float


def critical_point(params: ModelParams) -> CriticalPoint:
    """Closed form of the cusp: kappa_c = mu sqrt(4/3), omega_c = mu (2/3)^{3/2} sqrt(mu/u)."""
    mu, u = params.mu, params.u
    if u <= 0 or mu <= 0:
        raise ParameterDomainError(f"critical point needs u > 0 and mu > 0, got u={u}, mu={mu}")
    kappa_c = mu * math.sqrt(4.0 / 3.0)
    omega_c = mu * (2.0 / 3.0) ** 1.5 * math.sqrt(mu / u)
    n_c = 2.0 * mu / (3.0 * u)
    psi_c = cmath.exp(-1j * math.pi / 3.0) * math.sqrt(n_c)
    return CriticalPoint(kappa_c=kappa_c, omega_c=omega_c, psi_c=psi_c, n_c=n_c)


def to_ising_chart(params: ModelParams) -> IsingChart:
    """Map (kappa, omega) to the (r, h) chart; also returns K, g, T_eff."""
    cp = critical_point(params)
    mu, u = params.mu, params.u
    dk = params.kappa - cp.kappa_c
    dw = params.omega - cp.omega_c
    r = 0.5 * dk
    h = (4.0 / math.sqrt(3.0)) * dw - math.sqrt(2.0 * mu / (3.0 * u)) * dk
    return IsingChart(
        r=r, h=h,
        K=params.J / math.sqrt(3.0),
        g=u / math.sqrt(3.0),
        T_eff=params.kappa / (3.0 * params.scaleN),
    )


def from_ising_chart(r: float, h: float, base: ModelParams) -> ModelParams:
    """Inverse chart: rebuild (kappa, omega) from (r, h) on top of base's (mu, u, J, scaleN)."""
    cp = critical_point(base)
    mu, u = base.mu, base.u
    kappa = cp.kappa_c + 2.0 * r
    if kappa <= 0:
        raise ParameterDomainError(f"from_ising_chart: resulting kappa = {kappa:.6g} <= 0")
    omega = cp.omega_c + (math.sqrt(3.0) / 4.0) * (h + math.sqrt(2.0 * mu / (3.0 * u)) * 2.0 * r)
    if omega < 0:
        raise ParameterDomainError(f"from_ising_chart: resulting omega = {omega:.6g} < 0")
    return base.replace(kappa=kappa, omega=omega)
