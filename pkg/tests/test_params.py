import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddbh.errors import ParameterDomainError
from ddbh.params import (ModelParams, critical_point, from_ising_chart,
                         to_ising_chart)


def test_critical_point_closed_form():
    p = ModelParams.from_mu(mu=1.0, J=0.0, kappa=1.0, u=0.1, omega=1.0, scaleN=1.0)
    cp = critical_point(p)
    assert cp.kappa_c == pytest.approx(1.154701, abs=5e-7)
    assert cp.omega_c == pytest.approx(1.721326, abs=5e-7)
    assert cp.n_c == pytest.approx(6.66667, abs=5e-6)
    assert abs(cp.psi_c) ** 2 == pytest.approx(cp.n_c, rel=1e-12)
    assert math.degrees(np.angle(cp.psi_c)) == pytest.approx(-60.0, abs=1e-9)


def test_critical_density_exact_when_u_is_two_thirds():
    p = ModelParams.from_mu(mu=1.0, J=0.0, kappa=1.0, u=2.0 / 3.0, omega=1.0, scaleN=1.0)
    assert critical_point(p).n_c == pytest.approx(1.0, rel=1e-14)


def test_kappa_c_linear_in_mu():
    p1 = ModelParams.from_mu(mu=1.0, J=0.0, kappa=1.0, u=0.1, omega=1.0)
    p2 = ModelParams.from_mu(mu=2.0, J=0.0, kappa=1.0, u=0.1, omega=1.0)
    c1, c2 = critical_point(p1), critical_point(p2)
    assert c2.kappa_c == pytest.approx(2.0 * c1.kappa_c, rel=1e-14)
    assert c2.kappa_c == pytest.approx(2.309401, abs=5e-7)


def test_mu_recomputed_from_delta_and_J():
    p = ModelParams(J=0.25, delta=0.5, kappa=1.0, u=0.1, omega=1.0, dims=2)
    assert p.z == 4
    assert p.mu == pytest.approx(0.5 + 4 * 0.25)
    q = p.replace(J=0.1)
    assert q.mu == pytest.approx(0.5 + 0.4)


def test_chart_origin_and_directions():
    p = ModelParams.from_mu(mu=1.0, J=0.0, kappa=1.0, u=0.1, omega=1.0)
    cp = critical_point(p)
    at_c = p.replace(kappa=cp.kappa_c, omega=cp.omega_c)
    ch = to_ising_chart(at_c)
    assert ch.r == pytest.approx(0.0, abs=1e-14)
    assert ch.h == pytest.approx(0.0, abs=1e-12)

    ch2 = to_ising_chart(p.replace(kappa=cp.kappa_c - 0.2, omega=cp.omega_c))
    assert ch2.r == pytest.approx(-0.1, rel=1e-12)
    assert ch2.h == pytest.approx(0.516398, abs=5e-7)

    ch3 = to_ising_chart(p.replace(kappa=cp.kappa_c, omega=cp.omega_c + 0.01))
    assert ch3.r == pytest.approx(0.0, abs=1e-14)
    assert ch3.h == pytest.approx(0.023094, abs=5e-7)


def test_chart_constants():
    p = ModelParams.from_mu(mu=1.0, J=0.1, kappa=0.3, u=0.2, omega=0.5, scaleN=50.0)
    ch = to_ising_chart(p)
    assert ch.K == pytest.approx(0.1 / math.sqrt(3.0), rel=1e-14)
    assert ch.g == pytest.approx(0.2 / math.sqrt(3.0), rel=1e-14)
    assert ch.T_eff == pytest.approx(0.002, rel=1e-14)


def test_inverse_chart_matches_algebra():
    base = ModelParams.from_mu(mu=1.0, J=0.0, kappa=1.0, u=0.1, omega=1.0)
    cp = critical_point(base)
    p = from_ising_chart(-0.1, 0.0, base)
    assert p.kappa == pytest.approx(cp.kappa_c - 0.2, rel=1e-12)
    expected_omega = cp.omega_c - 0.2 * math.sqrt(2.0 / 0.3) * math.sqrt(3.0) / 4.0
    assert p.omega == pytest.approx(expected_omega, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(r=st.floats(-0.3, 0.3), h=st.floats(-0.3, 0.3))
def test_chart_round_trip(r, h):
    base = ModelParams.from_mu(mu=1.0, J=0.05, kappa=1.0, u=0.4, omega=1.0)
    try:
        p = from_ising_chart(r, h, base)
    except ParameterDomainError:
        return  # resulting omega < 0 is legitimately rejected
    ch = to_ising_chart(p)
    assert ch.r == pytest.approx(r, abs=1e-12)
    assert ch.h == pytest.approx(h, abs=1e-12)


def test_mu_units_normalization():
    p = ModelParams(J=0.5, delta=1.0, kappa=3.0, u=0.6, omega=2.0, dims=1)
    q = p.in_mu_units()
    assert q.mu == pytest.approx(1.0, rel=1e-14)
    assert q.kappa == pytest.approx(3.0 / p.mu)
    assert q.u == pytest.approx(0.6 / p.mu)


def test_domain_errors():
    with pytest.raises(ParameterDomainError):
        ModelParams(J=0.1, delta=1.0, kappa=-1.0, u=0.1, omega=1.0)
    with pytest.raises(ParameterDomainError):
        ModelParams(J=0.1, delta=1.0, kappa=1.0, u=0.0, omega=1.0)
    with pytest.raises(ParameterDomainError):
        ModelParams(J=0.1, delta=1.0, kappa=1.0, u=0.1, omega=-0.5)
    with pytest.raises(ParameterDomainError):
        ModelParams(J=0.1, delta=1.0, kappa=1.0, u=0.1, omega=1.0, dims=3)
    base = ModelParams.from_mu(mu=1.0, J=0.0, kappa=1.0, u=0.1, omega=1.0)
    with pytest.raises(ParameterDomainError):
        from_ising_chart(-2.0, 0.0, base)  # kappa would go negative
