# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Euler-Maruyama stepping kernels (hot loops of the integrators).

Same contract as ddbh.pykernels: advance the field in place through a
segment of steps, return -1 on success or the in-segment index of the first
step that violated the blowup cap.
"""

import numpy as np
cimport numpy as cnp

BACKEND_NAME = "cython"


def sgpe_segment_1d(double complex[:, ::1] psi, double J, double mu,
                    double kappa, double omega, double u, double dt,
                    Py_ssize_t nsteps, noise, double complex cfac, double cap2):
    cdef Py_ssize_t B = psi.shape[0], L = psi.shape[1]
    cdef double complex[:, ::1] cur = psi
    cdef double complex[:, ::1] nxt = np.empty((B, L), dtype=np.complex128)
    cdef double complex[:, ::1] tmp
    cdef double complex[:, :, ::1] z = None
    cdef bint has_noise = noise is not None
    if has_noise:
        z = noise
    cdef double complex mloss = mu + 0.5j * kappa
    cdef double complex mi_dt = -1j * dt
    cdef double complex p, lap, bracket
    cdef double n2, mx
    cdef Py_ssize_t s, b, j, jm, jp
    for s in range(nsteps):
        mx = 0.0
        for b in range(B):
            for j in range(L):
                jm = j - 1 if j > 0 else L - 1
                jp = j + 1 if j < L - 1 else 0
                p = cur[b, j]
                lap = cur[b, jm] + cur[b, jp] - 2.0 * p
                n2 = p.real * p.real + p.imag * p.imag
                bracket = (-J) * lap - mloss * p + omega + u * n2 * p
                p = p + mi_dt * bracket
                if has_noise:
                    p = p + cfac * z[s, b, j]
                nxt[b, j] = p
                n2 = p.real * p.real + p.imag * p.imag
                if n2 > mx:
                    mx = n2
        tmp = cur; cur = nxt; nxt = tmp
        if mx > cap2:
            if &cur[0, 0] != &psi[0, 0]:
                psi[...] = cur
            return s
    if &cur[0, 0] != &psi[0, 0]:
        psi[...] = cur
    return -1


def sgpe_segment_2d(double complex[:, ::1] psi, double J, double mu,
                    double kappa, double omega, double u, double dt,
                    Py_ssize_t nsteps, noise, double complex cfac, double cap2):
    cdef Py_ssize_t Lx = psi.shape[0], Ly = psi.shape[1]
    cdef double complex[:, ::1] cur = psi
    cdef double complex[:, ::1] nxt = np.empty((Lx, Ly), dtype=np.complex128)
    cdef double complex[:, ::1] tmp
    cdef double complex[:, :, ::1] z = None
    cdef bint has_noise = noise is not None
    if has_noise:
        z = noise
    cdef double complex mloss = mu + 0.5j * kappa
    cdef double complex mi_dt = -1j * dt
    cdef double complex p, lap, bracket
    cdef double n2, mx
    cdef Py_ssize_t s, i, j, im, ip, jm, jp
    for s in range(nsteps):
        mx = 0.0
        for i in range(Lx):
            im = i - 1 if i > 0 else Lx - 1
            ip = i + 1 if i < Lx - 1 else 0
            for j in range(Ly):
                jm = j - 1 if j > 0 else Ly - 1
                jp = j + 1 if j < Ly - 1 else 0
                p = cur[i, j]
                lap = cur[im, j] + cur[ip, j] + cur[i, jm] + cur[i, jp] - 4.0 * p
                n2 = p.real * p.real + p.imag * p.imag
                bracket = (-J) * lap - mloss * p + omega + u * n2 * p
                p = p + mi_dt * bracket
                if has_noise:
                    p = p + cfac * z[s, i, j]
                nxt[i, j] = p
                n2 = p.real * p.real + p.imag * p.imag
                if n2 > mx:
                    mx = n2
        tmp = cur; cur = nxt; nxt = tmp
        if mx > cap2:
            if &cur[0, 0] != &psi[0, 0]:
                psi[...] = cur
            return s
    if &cur[0, 0] != &psi[0, 0]:
        psi[...] = cur
    return -1


def modela_segment_1d(double[:, ::1] sig, double K, double r, double g,
                      double h, double dt, Py_ssize_t nsteps, noise,
                      double namp, double cap2):
    cdef Py_ssize_t B = sig.shape[0], L = sig.shape[1]
    cdef double[:, ::1] cur = sig
    cdef double[:, ::1] nxt = np.empty((B, L), dtype=np.float64)
    cdef double[:, ::1] tmp
    cdef double[:, :, ::1] z = None
    cdef bint has_noise = noise is not None
    if has_noise:
        z = noise
    cdef double v, lap, grad, mx
    cdef Py_ssize_t s, b, j, jm, jp
    for s in range(nsteps):
        mx = 0.0
        for b in range(B):
            for j in range(L):
                jm = j - 1 if j > 0 else L - 1
                jp = j + 1 if j < L - 1 else 0
                v = cur[b, j]
                lap = cur[b, jm] + cur[b, jp] - 2.0 * v
                grad = (-K) * lap + r * v + g * v * v * v + 0.5 * h
                v = v - dt * grad
                if has_noise:
                    v = v + namp * z[s, b, j]
                nxt[b, j] = v
                if v * v > mx:
                    mx = v * v
        tmp = cur; cur = nxt; nxt = tmp
        if mx > cap2:
            if &cur[0, 0] != &sig[0, 0]:
                sig[...] = cur
            return s
    if &cur[0, 0] != &sig[0, 0]:
        sig[...] = cur
    return -1


def modela_segment_2d(double[:, ::1] sig, double K, double r, double g,
                      double h, double dt, Py_ssize_t nsteps, noise,
                      double namp, double cap2):
    cdef Py_ssize_t Lx = sig.shape[0], Ly = sig.shape[1]
    cdef double[:, ::1] cur = sig
    cdef double[:, ::1] nxt = np.empty((Lx, Ly), dtype=np.float64)
    cdef double[:, ::1] tmp
    cdef double[:, :, ::1] z = None
    cdef bint has_noise = noise is not None
    if has_noise:
        z = noise
    cdef double v, lap, grad, mx
    cdef Py_ssize_t s, i, j, im, ip, jm, jp
    for s in range(nsteps):
        mx = 0.0
        for i in range(Lx):
            im = i - 1 if i > 0 else Lx - 1
            ip = i + 1 if i < Lx - 1 else 0
            for j in range(Ly):
                jm = j - 1 if j > 0 else Ly - 1
                jp = j + 1 if j < Ly - 1 else 0
                v = cur[i, j]
                lap = cur[im, j] + cur[ip, j] + cur[i, jm] + cur[i, jp] - 4.0 * v
                grad = (-K) * lap + r * v + g * v * v * v + 0.5 * h
                v = v - dt * grad
                if has_noise:
                    v = v + namp * z[s, i, j]
                nxt[i, j] = v
                if v * v > mx:
                    mx = v * v
        tmp = cur; cur = nxt; nxt = tmp
        if mx > cap2:
            if &cur[0, 0] != &sig[0, 0]:
                sig[...] = cur
            return s
    if &cur[0, 0] != &sig[0, 0]:
        sig[...] = cur
    return -1


cdef inline void _lb_rhs(double complex[:, ::1] rho, double complex[:, ::1] out,
                         double[::1] E, double[::1] sq, double kappa,
                         double Omega, Py_ssize_t D) noexcept:
    cdef Py_ssize_t m, n
    cdef double complex acc, drive
    for m in range(D):
        for n in range(D):
            acc = -1j * (E[m] - E[n]) * rho[m, n]
            drive = 0
            if m < D - 1:
                drive = drive + sq[m] * rho[m + 1, n]
            if m > 0:
                drive = drive + sq[m - 1] * rho[m - 1, n]
            if n > 0:
                drive = drive - sq[n - 1] * rho[m, n - 1]
            if n < D - 1:
                drive = drive - sq[n] * rho[m, n + 1]
            acc = acc - 1j * Omega * drive
            if m < D - 1 and n < D - 1:
                acc = acc + kappa * sq[m] * sq[n] * rho[m + 1, n + 1]
            acc = acc - kappa * 0.5 * (m + n) * rho[m, n]
            out[m, n] = acc


def lindblad_run(double complex[:, ::1] rho, double[::1] energies,
                 double[::1] sq, double kappa, double Omega, double dt,
                 Py_ssize_t nsteps):
    """RK4-advance a single-cavity density matrix in place."""
    cdef Py_ssize_t D = rho.shape[0]
    cdef double complex[:, ::1] vk1 = np.empty((D, D), dtype=np.complex128)
    cdef double complex[:, ::1] vk2 = np.empty((D, D), dtype=np.complex128)
    cdef double complex[:, ::1] vk3 = np.empty((D, D), dtype=np.complex128)
    cdef double complex[:, ::1] vk4 = np.empty((D, D), dtype=np.complex128)
    cdef double complex[:, ::1] vtmp = np.empty((D, D), dtype=np.complex128)
    cdef Py_ssize_t s, m, n
    for s in range(nsteps):
        _lb_rhs(rho, vk1, energies, sq, kappa, Omega, D)
        for m in range(D):
            for n in range(D):
                vtmp[m, n] = rho[m, n] + 0.5 * dt * vk1[m, n]
        _lb_rhs(vtmp, vk2, energies, sq, kappa, Omega, D)
        for m in range(D):
            for n in range(D):
                vtmp[m, n] = rho[m, n] + 0.5 * dt * vk2[m, n]
        _lb_rhs(vtmp, vk3, energies, sq, kappa, Omega, D)
        for m in range(D):
            for n in range(D):
                vtmp[m, n] = rho[m, n] + dt * vk3[m, n]
        _lb_rhs(vtmp, vk4, energies, sq, kappa, Omega, D)
        for m in range(D):
            for n in range(D):
                rho[m, n] = rho[m, n] + (dt / 6.0) * (vk1[m, n] + 2.0 * vk2[m, n]
                                                      + 2.0 * vk3[m, n] + vk4[m, n])
    return -1
