#!/usr/bin/env python3
"""Throughput comparison of the compiled and pure-numpy stepping kernels.

Run:  python benchmarks/bench_backends.py
"""

import time

import numpy as np

import ddbh.engine as engine
from ddbh.modela import ModelAParams
from ddbh.params import ModelParams
from ddbh.rng import CounterNoise
from ddbh.singlecavity import CavityParams, LindbladOperator


def rate(fn, site_steps, min_time=0.4):
    fn()  # warm up
    reps, elapsed = 0, 0.0
    while elapsed < min_time:
        t0 = time.perf_counter()
        fn()
        elapsed += time.perf_counter() - t0
        reps += 1
    return site_steps * reps / elapsed


def bench_sgpe(backend, L, nsteps, noisy):
    p = ModelParams.from_mu(mu=1.0, J=0.1, kappa=1.0, u=0.2, omega=1.0, scaleN=40.0)
    kern = engine.get_backend(backend)
    psi = np.full((1, L), 0.6 - 0.4j)
    stream = CounterNoise(1, L, complex_field=True) if noisy else None

    def go():
        engine.advance_sgpe(psi, p, 5e-3, 0, nsteps, stream, 1e6, backend=kern)

    return rate(go, L * nsteps)


def bench_modela(backend, L, nsteps):
    mp = ModelAParams(K=0.06, r=-0.05, h=0.0, g=0.12, T_eff=0.009)
    kern = engine.get_backend(backend)
    sig = np.zeros((1, L))
    stream = CounterNoise(2, L)

    def go():
        engine.advance_modela(sig, mp, 0.02, 0, nsteps, stream, mp.noise_rate,
                              1e6, backend=kern)

    return rate(go, L * nsteps)


def bench_lindblad(backend, D, nsteps):
    cav = CavityParams(delta=1.0, U=0.1, kappa=0.6, Omega=1.2)
    op = LindbladOperator(cav, D)
    kern = engine.get_backend(backend)
    rho = np.zeros((D, D), dtype=complex)
    rho[0, 0] = 1.0
    sq = np.ascontiguousarray(op.sq)

    def go():
        kern.lindblad_run(rho, op.energies, sq, cav.kappa, cav.Omega,
                          op.rk4_dt(), nsteps)

    return rate(go, D * D * nsteps)


def main():
    backends = engine.available_backends()
    print(f"available backends: {', '.join(backends)} "
          f"(auto selects {engine.backend_name()})")
    rows = []
    for L in (128, 4096):
        for noisy in (False, True):
            label = f"sgpe 1D L={L} {'noisy' if noisy else 'noiseless'}"
            vals = {b: bench_sgpe(b, L, 2000 if L <= 256 else 100, noisy)
                    for b in backends}
            rows.append((label, vals))
    rows.append(("modela 1D L=1024", {b: bench_modela(b, 1024, 500) for b in backends}))
    rows.append(("lindblad RK4 D=64 (rho-elements/s)",
                 {b: bench_lindblad(b, 64, 100) for b in backends}))

    width = max(len(r[0]) for r in rows)
    print(f"\n{'kernel':<{width}}  " + "".join(f"{b:>14}" for b in backends)
          + ("       speedup" if len(backends) == 2 else ""))
    for label, vals in rows:
        cells = "".join(f"{vals[b] / 1e6:>12.1f} M" for b in backends)
        if len(backends) == 2:
            cells += f"{vals['cython'] / vals['python']:>12.1f} x"
        print(f"{label:<{width}}  {cells}")
    print("\nrates are site-updates/s (sgpe, modela) or matrix-element "
          "updates/s (lindblad)")


if __name__ == "__main__":
    main()
