"""Acceptance suite: one test per headline criterion, each printing a
PASS/FAIL line.  Tolerances are pinned here and nowhere else.

Run with `pytest tests/test_acceptance.py -v -s`.  Set DDBH_FULL_SCALE=1 to
run the full 32x32 two-dimensional variant of the dimensional-dichotomy
criterion (hours-scale); the default runs the sanctioned 16x16 CI variant.
"""

import math
import os
import time

import numpy as np
import pytest

from ddbh import modela as ma
from ddbh import sgpe
from ddbh import singlecavity as sc
from ddbh import domainwall as dw
from ddbh.meanfield import steady_state_roots
from ddbh.params import (ModelParams, critical_point, from_ising_chart,
                         to_ising_chart)
from ddbh.rng import generator_for
from ddbh.stats import estimate, hysteresis_sweep

FULL_SCALE = os.environ.get("DDBH_FULL_SCALE", "") == "1"


def report(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {status} — {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


# -------------------------------------------------------------- shared state

FIG2_MODEL = ModelParams.from_mu(mu=1.0, J=0.0, kappa=0.6, u=0.1, omega=1.2,
                                 scaleN=1.0)
FIG2_CAV = sc.CavityParams(delta=1.0, U=0.1, kappa=0.6, Omega=1.2)


@pytest.fixture(scope="module")
def fig2_steady():
    return sc.steady_state(FIG2_CAV, tol=3e-7)


@pytest.fixture(scope="module")
def fig2_mf_densities():
    branches = [b for b in steady_state_roots(FIG2_MODEL) if b.stable]
    return branches[0].density, branches[-1].density


# -------------------------------------------------------------- criterion 1

def test_mean_field_critical_point():
    """critical_point(mu=1, u=0.1) reproduces the closed form to 1e-9."""
    p = ModelParams.from_mu(mu=1.0, J=0.0, kappa=1.0, u=0.1, omega=1.0, scaleN=1.0)
    cp = critical_point(p)
    expect = (math.sqrt(4.0 / 3.0), (2.0 / 3.0) ** 1.5 * math.sqrt(10.0),
              2.0 / 0.3)
    errs = (abs(cp.kappa_c - expect[0]), abs(cp.omega_c - expect[1]),
            abs(cp.n_c - expect[2]))
    ok = max(errs) < 1e-9 and abs(cp.kappa_c - 1.154701) < 1e-6 \
        and abs(cp.omega_c - 1.721326) < 1e-6 and abs(cp.n_c - 6.66667) < 1e-5
    report("mean-field critical point", ok,
           f"kappa_c={cp.kappa_c:.9f} omega_c={cp.omega_c:.9f} n_c={cp.n_c:.6f}")


# -------------------------------------------------------------- criterion 2

def test_single_cavity_bimodality(fig2_steady, fig2_mf_densities):
    """Exact steady state at (delta=1, U=0.1, kappa=0.6, Omega=1.2) is
    bimodal with lobes within 20% of the mean-field stable densities."""
    t0 = time.time()
    n_dark, n_bright = fig2_mf_densities
    P = sc.photon_distribution(fig2_steady.rho)
    peaks = sc.bimodal_peaks(P)
    fig2_steady.rho.validate()
    err_dark = abs(peaks.dark_mean - n_dark) / n_dark
    err_bright = abs(peaks.bright_mean - n_bright) / n_bright
    ok = err_dark < 0.20 and err_bright < 0.20 and peaks.depth_ratio > 1.0
    report("single-cavity bimodality", ok,
           f"lobes ({peaks.dark_mean:.3f}, {peaks.bright_mean:.3f}) vs "
           f"mean-field ({n_dark:.3f}, {n_bright:.3f}), "
           f"rel err ({err_dark:.3f}, {err_bright:.3f}), {time.time()-t0:.0f}s")


# -------------------------------------------------------------- criterion 3

def test_trajectory_switching(fig2_mf_densities):
    """One long quantum trajectory switches between mean-field-like states
    (bimodal windowed-occupation histogram); the ensemble mean over >= 200
    trajectories tracks the master equation within 2 sigma."""
    t0 = time.time()
    n_dark, n_bright = fig2_mf_densities
    tr = sc.mc_trajectory(FIG2_CAV, t_end=6000.0, rng=generator_for(11),
                          record_every=20)
    dt_rec = tr.times[1] - tr.times[0]
    per_w = max(1, int(round(50.0 / dt_rec)))
    nw = len(tr.n_expect) // per_w
    wm = tr.n_expect[: nw * per_w].reshape(nw, per_w).mean(axis=1)
    split = 0.5 * (n_dark + n_bright)
    lo, hi = wm[wm < split], wm[wm >= split]
    frac_lo, frac_hi = len(lo) / len(wm), len(hi) / len(wm)
    bimodal = (frac_lo > 0.10 and frac_hi > 0.10
               and abs(np.mean(lo) - n_dark) / n_dark < 0.5
               and abs(np.mean(hi) - n_bright) / n_bright < 0.3)

    n_traj = 240
    ens = sc.mc_trajectory(FIG2_CAV, t_end=30.0, rng=generator_for(17),
                           record_every=50, n_traj=n_traj)
    rho0 = np.zeros((sc.initial_cutoff(FIG2_CAV),) * 2, dtype=complex)
    rho0[0, 0] = 1.0
    exact = sc.evolve_expectation(FIG2_CAV, rho0, ens.times)
    mean_n = ens.n_expect.mean(axis=1)
    stderr = ens.n_expect.std(axis=1) / math.sqrt(n_traj)
    late = slice(1, None)
    within = np.abs(mean_n[late] - exact[late]) < 2.0 * stderr[late]
    ens_ok = np.mean(within) >= 0.9  # 2-sigma agreement pointwise
    report("quantum-trajectory switching", bimodal and ens_ok,
           f"window clusters at ({np.mean(lo):.2f}, {np.mean(hi):.2f}) with "
           f"fractions ({frac_lo:.2f}, {frac_hi:.2f}); ensemble 2sigma "
           f"coverage {np.mean(within):.2f}, {time.time()-t0:.0f}s")


# -------------------------------------------------------------- criterion 4

def test_large_scale_correspondence():
    """|exact <n>/N - sgpe <|Psi|^2>| decreases monotonically over
    N in {5, 10, 20} at the bistable benchmark point."""
    t0 = time.time()
    diffs = []
    for N in (5, 10, 20):
        p = ModelParams.from_mu(mu=1.0, J=0.0, kappa=0.6, u=0.1, omega=1.2,
                                scaleN=N)
        cav = sc.CavityParams.from_model(p)
        res = sc.steady_state(cav, tol=1e-6, init_branch="bright")
        n_exact = sc.mean_photon_number(res.rho) / N
        bright = max((b for b in steady_state_roots(p) if b.stable),
                     key=lambda b: b.density)
        cfg = sgpe.SgpeRunConfig(t_end=20000.0, seed=100 + N, record_every=50,
                                 burn_in=500.0)
        field = np.full((16, 1), bright.amplitude, dtype=complex)
        rec = sgpe.integrate(field, p, cfg,
                             observers={"n": lambda f: float(np.mean(np.abs(f) ** 2))})
        est = estimate(rec.observables["n"])
        diffs.append(abs(n_exact - est.mean))
    ok = diffs[0] > diffs[1] > diffs[2]
    report("large-N quantum/semiclassical correspondence", ok,
           "diffs " + ", ".join(f"{d:.4f}" for d in diffs)
           + f" over N=5,10,20; {time.time()-t0:.0f}s")


# -------------------------------------------------------------- criterion 5

def test_domain_wall_velocity_law():
    """Measured dv/dh at r=-0.1, J=u=0.1 matches the first-order law within
    10%; the shooting oracle matches it within 5% as h -> 0."""
    t0 = time.time()
    base = ModelParams.from_mu(mu=1.0, J=0.1, kappa=1.0, u=0.1, omega=1.7,
                               scaleN=50.0)
    r = -0.1
    hs = (0.02, 0.01, -0.01, -0.02)
    vs = []
    for h in hs:
        p = from_ising_chart(r, h, base)
        dt = sgpe.default_dt(p)
        run = sgpe.SgpeRunConfig(t_end=250.0, dt=dt, noise_on=False,
                                 record_every=max(1, int(round(250.0 / dt / 250))),
                                 burn_in=0.0)
        vs.append(dw.measure_velocity(p, run, L=128).fit_velocity)
    A = np.vstack([hs, np.ones(len(hs))]).T
    slope, _ = np.linalg.lstsq(A, np.array(vs), rcond=None)[0]
    from ddbh.params import IsingChart
    K = g = 0.1 / math.sqrt(3.0)
    slope_law = dw.analytic_velocity(IsingChart(r=r, h=1.0, K=K, g=g, T_eff=0.0))
    rel_meas = abs(slope - slope_law) / slope_law
    h_small = 0.005
    ch = to_ising_chart(from_ising_chart(r, h_small, base))
    v_shoot = dw.shooting_velocity(ch)
    v_law = dw.analytic_velocity(ch)
    rel_shoot = abs(v_shoot - v_law) / abs(v_law)
    ok = rel_meas < 0.10 and rel_shoot < 0.05
    report("domain-wall velocity law", ok,
           f"slope {slope:.4f} vs law {slope_law:.4f} ({100*rel_meas:.1f}%), "
           f"shooting at h={h_small}: {100*rel_shoot:.2f}%; {time.time()-t0:.0f}s")


# -------------------------------------------------------------- criterion 6

def test_zero_velocity_locus_near_criticality():
    """|h*(r=-0.02)| < 0.1 |r| (at u = mu, the mean-field-section coupling)."""
    t0 = time.time()
    base = ModelParams.from_mu(mu=1.0, J=0.1, kappa=1.0, u=1.0, omega=1.0,
                               scaleN=50.0)
    hstar = dw.zero_velocity_h(base, -0.02, t_end=1200.0, tol_h=0.0004)
    ok = abs(hstar) < 0.1 * 0.02
    report("zero-velocity locus near criticality", ok,
           f"h* = {hstar:.6f}, |h*|/|r| = {abs(hstar)/0.02:.4f}; "
           f"{time.time()-t0:.0f}s")


# -------------------------------------------------------------- criterion 7

def test_model_a_thermal_equilibrium():
    """Two-site sampler marginals match exp(-H/T_eff) quadrature with
    KS < 0.02 at T_eff = 0.002."""
    t0 = time.time()
    p = ma.ModelAParams(K=0.1 / math.sqrt(3.0), r=-0.02, h=0.0,
                        g=0.2 / math.sqrt(3.0), T_eff=0.002)
    ks1, ks2, n = ma.two_site_equilibrium_check(p, n_chains=64,
                                                t_sample=40000.0, burn=4000.0,
                                                dt=0.03, seed=42)
    ok = ks1 < 0.02 and ks2 < 0.02
    report("Model-A thermal equilibrium (Boltzmann quadrature)", ok,
           f"KS = ({ks1:.4f}, {ks2:.4f}) over {n} samples at T_eff = 0.002; "
           f"{time.time()-t0:.0f}s")


# -------------------------------------------------------------- criterion 8

def test_relaxational_descent():
    """Noiseless steps obey H_{k+1} <= H_k + 10 dt^2 |grad H|^2 over 100
    random starts."""
    t0 = time.time()
    p = ma.ModelAParams(K=0.1 / math.sqrt(3.0), r=-0.1, h=0.02,
                        g=0.2 / math.sqrt(3.0), T_eff=0.0)
    dt = ma.default_dt(p)
    rng = np.random.default_rng(123)
    violations = 0
    for _ in range(100):
        s = rng.normal(scale=1.2, size=24)
        for _ in range(40):
            H0 = ma.effective_hamiltonian(s, p)
            g2 = float(np.sum(ma.grad_hamiltonian(s, p) ** 2))
            s = ma.modela_step(s, p, xi=None, dt=dt)
            if ma.effective_hamiltonian(s, p) > H0 + 10.0 * dt * dt * g2:
                violations += 1
    report("relaxational descent", violations == 0,
           f"{violations} violations over 100 starts x 40 steps; "
           f"{time.time()-t0:.0f}s")


# -------------------------------------------------------------- criterion 9

def _dichotomy_sweep(dims, shape, scaleN, seed):
    base0 = ModelParams.from_mu(mu=1.0, J=0.1, kappa=1.0, u=0.2, omega=1.0,
                                scaleN=scaleN, dims=dims)
    base = from_ising_chart(-0.05, 0.0, base0)
    h_values = np.round(np.arange(-0.032, 0.0021, 0.001), 6)
    return hysteresis_sweep(base, h_values, shape, seed=seed, burn=300.0,
                            t_measure=1500.0, frac_tol=0.01,
                            max_time_per_point=12000.0, record_every=20)


def test_dimensional_dichotomy():
    """Along the (J,U) = (0.1, 0.2) mu cut: 1D density vs drive is a smooth
    crossover (loop area consistent with 0), 2D shows a first-order jump
    (loop area > 0 at 3 sigma, max slope >= 5x the 1D max slope)."""
    t0 = time.time()
    scaleN = 20.0
    res1 = _dichotomy_sweep(1, (128,), scaleN, seed=2024)
    shape2 = (32, 32) if FULL_SCALE else (16, 16)
    res2 = _dichotomy_sweep(2, shape2, scaleN, seed=2025)

    area_ok_1d = abs(res1.loop_area) <= 3.0 * res1.loop_area_err
    area_ok_2d = res2.loop_area > 3.0 * res2.loop_area_err

    def max_slope(res):
        h = res.up.h
        best = 0.0
        for branch in (res.up.mean, res.down.mean[::-1]):
            ds = np.abs(np.diff(branch) / np.diff(h))
            best = max(best, float(np.nanmax(ds)))
        return best

    s1, s2 = max_slope(res1), max_slope(res2)
    slope_ok = s2 >= 5.0 * s1
    ok = area_ok_1d and area_ok_2d and slope_ok
    report("dimensional dichotomy (1D crossover vs 2D first-order)", ok,
           f"1D loop {res1.loop_area:.4f}+-{res1.loop_area_err:.4f}, "
           f"2D[{shape2[0]}x{shape2[1]}] loop {res2.loop_area:.4f}"
           f"+-{res2.loop_area_err:.4f}, slopes {s1:.0f} vs {s2:.0f} "
           f"(x{s2/max(s1,1e-9):.1f}); {time.time()-t0:.0f}s")


# ------------------------------------------------------------- criterion 10

def test_noise_calibration():
    """Per-step complex noise variance matches kappa/(2 N dt) within 1%
    over 1e6 samples."""
    t0 = time.time()
    p = ModelParams.from_mu(mu=1.0, J=0.0, kappa=0.3, u=0.1, omega=1.0,
                            scaleN=50.0)
    rng = generator_for(2718)
    z = sgpe.sample_noise(rng, 0.01, p, shape=10 ** 6)
    target = 0.3 / (2.0 * 50.0 * 0.01)
    measured = float(np.mean(np.abs(z) ** 2))
    rel = abs(measured - target) / target
    # the same calibration must hold for the stream the integrator consumes
    from ddbh.rng import CounterNoise
    stream = CounterNoise(99, 1000, complex_field=True)
    blk = stream.block(0, 1000)
    amp2 = target  # <|zeta|^2> after scaling by sqrt(kappa/(2 N dt))/sqrt(2)
    measured2 = float(np.mean(np.abs(blk) ** 2)) * target / 2.0
    rel2 = abs(measured2 - amp2) / amp2
    ok = rel < 0.01 and rel2 < 0.01
    report("noise calibration", ok,
           f"<|zeta|^2> = {measured:.4f} vs {target:.4f} ({100*rel:.2f}%), "
           f"stream variance off by {100*rel2:.2f}%; {time.time()-t0:.0f}s")
