"""Pure-numpy stepping kernels (fallback backend).

Each function advances a field through a segment of Euler-Maruyama steps and
returns -1, or the index (within the segment) of the first step whose result
violated the blowup cap.  The compiled backend in ddbh._kernels implements
the same contract; ddbh.engine picks one at import time.

Shapes: 1D kernels take (B, L) batches of independent rings (ring axis
last); 2D kernels take a single (Lx, Ly) torus.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _ring_lap(f):
    return np.roll(f, 1, axis=-1) + np.roll(f, -1, axis=-1) - 2.0 * f


def _torus_lap(f):
    return (np.roll(f, 1, axis=0) + np.roll(f, -1, axis=0)
            + np.roll(f, 1, axis=1) + np.roll(f, -1, axis=1) - 4.0 * f)


def _sgpe_step(psi, lap, J, mu, kappa, omega, u, dt, zrow, cfac):
    bracket = (-J) * lap - (mu + 0.5j * kappa) * psi + omega \
        + u * (psi.real ** 2 + psi.imag ** 2) * psi
    out = psi + (-1j * dt) * bracket
    if zrow is not None:
        out += cfac * zrow
    return out


def sgpe_segment_1d(psi, J, mu, kappa, omega, u, dt, nsteps, noise, cfac, cap2):
    for s in range(nsteps):
        zrow = noise[s] if noise is not None else None
        psi[...] = _sgpe_step(psi, _ring_lap(psi), J, mu, kappa, omega, u, dt, zrow, cfac)
        if np.max(psi.real ** 2 + psi.imag ** 2) > cap2:
            return s
    return -1


def sgpe_segment_2d(psi, J, mu, kappa, omega, u, dt, nsteps, noise, cfac, cap2):
    for s in range(nsteps):
        zrow = noise[s] if noise is not None else None
        psi[...] = _sgpe_step(psi, _torus_lap(psi), J, mu, kappa, omega, u, dt, zrow, cfac)
        if np.max(psi.real ** 2 + psi.imag ** 2) > cap2:
            return s
    return -1


def _modela_step(sig, lap, K, r, g, h, dt, zrow, namp):
    grad = (-K) * lap + r * sig + g * sig ** 3 + 0.5 * h
    out = sig - dt * grad
    if zrow is not None:
        out += namp * zrow
    return out


def modela_segment_1d(sig, K, r, g, h, dt, nsteps, noise, namp, cap2):
    for s in range(nsteps):
        zrow = noise[s] if noise is not None else None
        sig[...] = _modela_step(sig, _ring_lap(sig), K, r, g, h, dt, zrow, namp)
        if np.max(sig ** 2) > cap2:
            return s
    return -1


def modela_segment_2d(sig, K, r, g, h, dt, nsteps, noise, namp, cap2):
    for s in range(nsteps):
        zrow = noise[s] if noise is not None else None
        sig[...] = _modela_step(sig, _torus_lap(sig), K, r, g, h, dt, zrow, namp)
        if np.max(sig ** 2) > cap2:
            return s
    return -1


def _lindblad_rhs_arrays(rho, ediff, sq, kappa, Omega, decay, jump_w):
    out = (-1j) * ediff * rho
    drive = np.zeros_like(rho)
    drive[:-1, :] += sq[:, None] * rho[1:, :]
    drive[1:, :] += sq[:, None] * rho[:-1, :]
    drive[:, 1:] -= sq[None, :] * rho[:, :-1]
    drive[:, :-1] -= sq[None, :] * rho[:, 1:]
    out += (-1j * Omega) * drive
    out[:-1, :-1] += kappa * jump_w * rho[1:, 1:]
    out -= kappa * decay * rho
    return out


def lindblad_run(rho, energies, sq, kappa, Omega, dt, nsteps):
    """RK4-advance a single-cavity density matrix in place."""
    D = rho.shape[0]
    n = np.arange(D, dtype=float)
    ediff = energies[:, None] - energies[None, :]
    decay = 0.5 * (n[:, None] + n[None, :])
    jump_w = np.outer(sq, sq)

    def rhs(r):
        return _lindblad_rhs_arrays(r, ediff, sq, kappa, Omega, decay, jump_w)

    for _ in range(nsteps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return -1
