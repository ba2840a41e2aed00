"""Backend selection and the segmented stepping driver.

The compiled kernels (ddbh._kernels, Cython) are preferred when importable;
ddbh.pykernels is the pure-numpy fallback.  Set DDBH_BACKEND=python or
DDBH_BACKEND=cython to force one (forcing cython raises if the extension is
missing).  Both backends implement identical segment contracts, so results
agree to floating-point noise and all seeding/replay guarantees hold for
either.
"""

from __future__ import annotations

import os

import numpy as np

from . import pykernels
from .errors import ConfigError, IntegrationBlowupError

try:
    from . import _kernels
    _HAVE_CYTHON = True
except ImportError:
    _kernels = None
    _HAVE_CYTHON = False

# steps per noise block; bounded so noise buffers stay modest
NOISE_SEGMENT = 256


def available_backends():
    return ("python", "cython") if _HAVE_CYTHON else ("python",)


def get_backend(name=None):
    """Resolve a kernel module by name or by the DDBH_BACKEND env var."""
    name = name or os.environ.get("DDBH_BACKEND", "auto")
    if name == "auto":
        return _kernels if _HAVE_CYTHON else pykernels
    if name == "python":
        return pykernels
    if name == "cython":
        if not _HAVE_CYTHON:
            raise ConfigError("DDBH_BACKEND=cython but ddbh._kernels is not built")
        return _kernels
    raise ConfigError(f"unknown backend {name!r} (use auto, python or cython)")


_backend = get_backend()


def backend_name():
    return _backend.BACKEND_NAME


def _segment_sizes(nsteps):
    done = 0
    while done < nsteps:
        n = min(NOISE_SEGMENT, nsteps - done)
        yield done, n
        done += n


def advance_sgpe(field, params, dt, step0, nsteps, noise_stream, cap,
                 backend=None):
    """Advance the complex field through nsteps Euler-Maruyama steps in place.

    field: (L,), (B, L) for independent 1D rings, or (Lx, Ly) when
    params.dims == 2.  Noise for absolute step s comes from
    noise_stream.block(s, .) so chunking never affects the realization.
    """
    kern = backend or _backend
    J, mu, kappa, omega, u = params.J, params.mu, params.kappa, params.omega, params.u
    cfac = -1j * np.sqrt(kappa * dt / (2.0 * params.scaleN)) / np.sqrt(2.0)
    cap2 = float(cap) ** 2
    squeeze = False
    if params.dims == 1:
        if field.ndim == 1:
            work = field.reshape(1, -1)
            squeeze = True
        else:
            work = field
        seg_fn = kern.sgpe_segment_1d
        nsh = work.shape
    else:
        if field.ndim != 2:
            raise ConfigError("2D runs take a single (Lx, Ly) field")
        work = field
        seg_fn = kern.sgpe_segment_2d
        nsh = work.shape
    work = np.ascontiguousarray(work)
    for off, n in _segment_sizes(nsteps):
        if noise_stream is not None:
            z = noise_stream.block(step0 + off, n).reshape((n,) + nsh)
            z = np.ascontiguousarray(z)
        else:
            z = None
        bad = seg_fn(work, J, mu, kappa, omega, u, dt, n, z, cfac, cap2)
        if bad >= 0:
            step = step0 + off + bad
            raise IntegrationBlowupError(step, float(np.max(np.abs(work))), cap)
    if not np.shares_memory(work, field):
        field[...] = work.reshape(field.shape)
    return field


def advance_modela(sig, p, dt, step0, nsteps, noise_stream, noise_rate, cap,
                   backend=None):
    """Advance the real order-parameter field in place.

    noise_rate is the white-noise variance coefficient Gamma in
    <xi xi'> = Gamma delta(t - t'); each step adds sqrt(Gamma dt) x N(0,1).
    """
    kern = backend or _backend
    namp = float(np.sqrt(noise_rate * dt)) if noise_stream is not None else 0.0
    cap2 = float(cap) ** 2
    dims = getattr(p, "dims", 1)
    if dims == 1:
        work = sig.reshape(1, -1) if sig.ndim == 1 else sig
        seg_fn = kern.modela_segment_1d
    else:
        if sig.ndim != 2:
            raise ConfigError("2D runs take a single (Lx, Ly) field")
        work = sig
        seg_fn = kern.modela_segment_2d
    nsh = work.shape
    work = np.ascontiguousarray(work)
    for off, n in _segment_sizes(nsteps):
        if noise_stream is not None:
            z = noise_stream.block(step0 + off, n).reshape((n,) + nsh)
            z = np.ascontiguousarray(z)
        else:
            z = None
        bad = seg_fn(work, p.K, p.r, p.g, p.h, dt, n, z, namp, cap2)
        if bad >= 0:
            step = step0 + off + bad
            raise IntegrationBlowupError(step, float(np.max(np.abs(work))), cap)
    if not np.shares_memory(work, sig):
        sig[...] = work.reshape(sig.shape)
    return sig
