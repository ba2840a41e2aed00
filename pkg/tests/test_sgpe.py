import numpy as np
import pytest

from ddbh import sgpe
from ddbh.errors import IntegrationBlowupError
from ddbh.meanfield import steady_state_roots
from ddbh.params import ModelParams, to_ising_chart
from ddbh.rng import generator_for

FIG2 = ModelParams.from_mu(mu=1.0, J=0.0, kappa=0.6, u=0.1, omega=1.2, scaleN=1.0)


def test_drift_vacuum_and_linear_term():
    p = FIG2.replace(omega=0.0)
    f = np.zeros(6, dtype=complex)
    assert np.max(np.abs(sgpe.drift(f, p))) == 0.0
    # u = 0, J = 0, Psi = 0: drift is -i omega uniformly
    p2 = ModelParams.from_mu(mu=1.0, J=0.0, kappa=0.6, u=1e-300, omega=1.0, scaleN=1.0)
    d = sgpe.drift(np.zeros(4, dtype=complex), p2)
    assert np.allclose(d, -1j)


def test_drift_vanishes_on_cubic_roots_with_hopping():
    p = ModelParams.from_mu(mu=1.0, J=0.37, kappa=0.6, u=0.1, omega=1.2, scaleN=1.0)
    for b in steady_state_roots(p):
        f = np.full((3, 5), b.amplitude)
        assert np.max(np.abs(sgpe.drift(f, p))) < 1e-10


def test_noise_calibration():
    # <|zeta|^2> = kappa / (2 N dt) within 1% over 1e6 samples
    p = ModelParams.from_mu(mu=1.0, J=0.0, kappa=0.3, u=0.1, omega=1.0, scaleN=50.0)
    rng = generator_for(123)
    z = sgpe.sample_noise(rng, 0.01, p, shape=10 ** 6)
    target = 0.3 / (2 * 50 * 0.01)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(target, rel=0.01)
    # zero mean and no anomalous correlator, within 3 sigma
    n = z.size
    sig = np.sqrt(target / n)
    assert abs(np.mean(z.real)) < 3 * sig / np.sqrt(2) * 1.5
    assert abs(np.mean(z.imag)) < 3 * sig / np.sqrt(2) * 1.5
    anom = np.mean(z ** 2)
    assert abs(anom) < 3 * target / np.sqrt(n) * 1.5


def test_em_step_matches_engine_path():
    from ddbh import engine
    from ddbh.rng import CounterNoise
    p = FIG2.replace(scaleN=20.0)
    rng = np.random.default_rng(4)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    dt = 1e-3
    stream = CounterNoise(5, 8, complex_field=True)
    z = stream.block(0, 1)[0]
    # engine applies cfac * z with cfac = -i dt sqrt(kappa dt / 2N)/sqrt(2);
    # em_step takes zeta = sqrt(kappa/(2 N dt)) z / sqrt(2) and multiplies by -i dt
    zeta = np.sqrt(p.kappa / (2 * p.scaleN * dt)) * z / np.sqrt(2)
    a = sgpe.em_step(psi.copy(), p, dt, zeta)
    b = psi.copy()
    engine.advance_sgpe(b, p, dt, 0, 1, stream, 1e3)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-14)


def test_noiseless_relaxation_to_unique_root():
    # outside bistability the unique root attracts the vacuum start
    p = FIG2.replace(omega=2.2)
    roots = steady_state_roots(p)
    assert len(roots) == 1
    cfg = sgpe.SgpeRunConfig(t_end=50.0 / p.kappa, dt=1e-3, noise_on=False,
                             record_every=1000, burn_in=0.0)
    rec = sgpe.integrate(np.zeros(1, dtype=complex), p, cfg)
    assert abs(rec.final_field[0] - roots[0].amplitude) < 1e-6


def test_bistable_roots_persist():
    p = FIG2
    stable = [b for b in steady_state_roots(p) if b.stable]
    for b in stable:
        cfg = sgpe.SgpeRunConfig(t_end=100.0, dt=2e-3, noise_on=False,
                                 record_every=5000, burn_in=0.0)
        rec = sgpe.integrate(np.full(1, b.amplitude), p, cfg)
        assert abs(rec.final_field[0] - b.amplitude) < 1e-8


def test_small_perturbation_contracts_to_stable_root():
    p = FIG2
    stable = [b for b in steady_state_roots(p) if b.stable]
    for b in stable:
        psi0 = np.full(1, b.amplitude + 1e-3)
        cfg = sgpe.SgpeRunConfig(t_end=40.0, dt=1e-3, noise_on=False,
                                 record_every=400, burn_in=0.0)
        rec = sgpe.integrate(psi0, p, cfg,
                             observers={"dist": lambda f, b=b: float(np.abs(f[0] - b.amplitude))})
        d = rec.observables["dist"]
        assert d[-1] < d[0]
        assert d[-1] < 2e-4


def test_linear_cavity_closed_form():
    # u -> 0, J = 0: Psi(t) = Psi_ss + (Psi_0 - Psi_ss) exp((i mu - kappa/2) t)
    p = ModelParams.from_mu(mu=1.0, J=0.0, kappa=0.7, u=1e-300, omega=0.9, scaleN=1.0)
    psi_ss = p.omega / (p.mu + 0.5j * p.kappa)
    psi0 = 0.3 - 0.2j
    t_end = 5.0
    cfg = sgpe.SgpeRunConfig(t_end=t_end, dt=1e-3, noise_on=False,
                             record_every=100000, burn_in=0.0)
    rec = sgpe.integrate(np.full(1, psi0), p, cfg)
    exact = psi_ss + (psi0 - psi_ss) * np.exp((1j * p.mu - 0.5 * p.kappa) * t_end)
    err1 = abs(rec.final_field[0] - exact)
    assert err1 < 1e-3 * 5  # first order in dt
    cfg2 = sgpe.SgpeRunConfig(t_end=t_end, dt=5e-4, noise_on=False,
                              record_every=100000, burn_in=0.0)
    rec2 = sgpe.integrate(np.full(1, psi0), p, cfg2)
    err2 = abs(rec2.final_field[0] - exact)
    assert err2 < 0.6 * err1  # halving dt roughly halves the error
    cfg3 = sgpe.SgpeRunConfig(t_end=t_end, dt=1e-6, noise_on=False,
                              record_every=10 ** 7, burn_in=0.0)
    rec3 = sgpe.integrate(np.full(1, psi0), p, cfg3)
    assert abs(rec3.final_field[0] - exact) < 1e-6


def test_replay_determinism():
    p = FIG2.replace(scaleN=10.0)
    cfg = sgpe.SgpeRunConfig(t_end=2.0, dt=1e-3, seed=99, record_every=50,
                             burn_in=1.0)
    f0 = np.full(16, 1.0 + 0.0j)
    r1 = sgpe.integrate(f0, p, cfg)
    r2 = sgpe.integrate(f0, p, cfg)
    assert np.array_equal(r1.final_field, r2.final_field)
    assert np.array_equal(r1.observables["mean_density"],
                          r2.observables["mean_density"])
    r3 = sgpe.integrate(f0, p, sgpe.SgpeRunConfig(
        t_end=2.0, dt=1e-3, seed=100, record_every=50, burn_in=1.0))
    assert not np.array_equal(r1.final_field, r3.final_field)


def test_weak_convergence_dt_halving():
    # additive noise: <|Psi|^2> statistics agree for dt and dt/2 within errors
    p = FIG2.replace(scaleN=20.0, omega=2.2)
    root = steady_state_roots(p)[0]

    def run(dt, seed):
        cfg = sgpe.SgpeRunConfig(t_end=4000.0, dt=dt, seed=seed,
                                 record_every=max(1, int(0.5 / dt)), burn_in=100.0)
        f0 = np.full((8, 1), root.amplitude)
        rec = sgpe.integrate(f0, p, cfg,
                             observers={"n": lambda f: float(np.mean(np.abs(f) ** 2))})
        from ddbh.stats import estimate
        return estimate(rec.observables["n"])

    e1 = run(0.01, 1)
    e2 = run(0.005, 2)
    assert abs(e1.mean - e2.mean) < 3.0 * np.hypot(e1.stderr, e2.stderr)


def test_blowup_guard_reports_step():
    p = FIG2
    cfg = sgpe.SgpeRunConfig(t_end=10.0, dt=0.5, noise_on=False, burn_in=0.0)
    with pytest.raises(IntegrationBlowupError) as exc:
        sgpe.integrate(np.full(4, 30.0 + 0.0j), p, cfg)
    assert exc.value.step_index >= 0


def test_default_dt_rule():
    p = ModelParams.from_mu(mu=1.0, J=0.1, kappa=0.5, u=0.2, omega=1.0, scaleN=50.0)
    n_c = 2.0 / (3 * 0.2)
    expected = 0.01 * min(1 / 0.5, 1.0, 1 / (0.2 * n_c), 1 / (2 * 2 * 0.1))
    assert sgpe.default_dt(p) == pytest.approx(expected, rel=1e-12)


def test_default_burn_in_rule():
    p = ModelParams.from_mu(mu=1.0, J=0.0, kappa=0.6, u=0.1, omega=1.2, scaleN=1.0)
    r = to_ising_chart(p).r
    assert sgpe.default_burn_in(p) == pytest.approx(20.0 / abs(r))


def test_spacetime_domain_coexistence_near_crossover():
    # noisy 1D run near the crossover drive keeps bright and dark domains
    # coexisting in the late-time field (the space-time-map regime)
    from ddbh.params import from_ising_chart
    base = ModelParams.from_mu(mu=1.0, J=0.1, kappa=1.0, u=0.2, omega=1.0,
                               scaleN=20.0)
    p = from_ising_chart(-0.05, -0.016, base)
    stable = [b for b in steady_state_roots(p) if b.stable]
    rng = np.random.default_rng(0)
    L = 128
    alpha = rng.random(L)
    field = alpha * stable[0].amplitude + (1 - alpha) * stable[-1].amplitude
    cfg = sgpe.SgpeRunConfig(t_end=800.0, seed=5, record_every=400, burn_in=200.0)
    rec = sgpe.integrate(field, p, cfg)
    dens = np.abs(rec.final_field) ** 2
    mid = 0.5 * (stable[0].density + stable[-1].density)
    frac_dark = float(np.mean(dens < mid))
    assert 0.15 < frac_dark < 0.85


def test_integrate_until_converged_raises_when_asked():
    p = FIG2.replace(scaleN=3.0)  # loud noise, tight tolerance: cannot converge fast
    cfg = sgpe.SgpeRunConfig(t_end=20.0, dt=0.005, seed=1, record_every=5,
                             burn_in=0.0)
    f0 = np.full(4, 1.0 + 0.0j)
    with pytest.raises(sgpe.UnconvergedError):
        sgpe.integrate_until_converged(f0, p, cfg, frac_tol=1e-5,
                                       max_time=40.0, chunk_time=20.0,
                                       raise_unconverged=True)
