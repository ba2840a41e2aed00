import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddbh.errors import ParameterDomainError
from ddbh.lattice import (bond_differences_squared, domain_wall_field,
                          laplacian, uniform_field)


def test_constant_field_has_zero_laplacian():
    f = uniform_field(8, 0.7 + 0.2j)
    assert np.max(np.abs(laplacian(f))) == 0.0
    g = uniform_field((4, 6), 1.5 + 0.0j)
    assert np.max(np.abs(laplacian(g))) == 0.0


def test_impulse_stencils():
    f = np.zeros(4, dtype=complex)
    f[0] = 1.0
    assert np.allclose(laplacian(f), [-2, 1, 0, 1])
    g = np.zeros((3, 3), dtype=complex)
    g[1, 1] = 1.0
    lap = laplacian(g)
    assert lap[1, 1] == -4
    assert lap[0, 1] == lap[2, 1] == lap[1, 0] == lap[1, 2] == 1
    assert lap[0, 0] == lap[0, 2] == lap[2, 0] == lap[2, 2] == 0


def test_domain_wall_layout():
    f = domain_wall_field(8, 1 + 0j, 2 + 0j, 4)
    assert np.array_equal(f[:4], np.full(4, 1 + 0j))
    assert np.array_equal(f[4:], np.full(4, 2 + 0j))
    g = domain_wall_field((6, 3), -1.0, 1.0, 2)
    assert (g[:2] == -1).all() and (g[2:] == 1).all()
    with pytest.raises(ParameterDomainError):
        domain_wall_field(8, 1.0, 2.0, 0)
    with pytest.raises(ParameterDomainError):
        domain_wall_field(8, 1.0, 2.0, 8)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([5, 8, 16]))
def test_laplacian_linearity_and_symmetry(seed, L):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=L) + 1j * rng.normal(size=L)
    g = rng.normal(size=L) + 1j * rng.normal(size=L)
    a, b = 1.3, -0.4 + 0.2j
    lhs = laplacian(a * f + b * g)
    rhs = a * laplacian(f) + b * laplacian(g)
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * max(1.0, np.max(np.abs(lhs)))
    # real inner product on interleaved re/im = Re <f, g>
    ip1 = np.sum(np.conj(f) * laplacian(g)).real
    ip2 = np.sum(np.conj(laplacian(f)) * g).real
    assert ip1 == pytest.approx(ip2, abs=1e-11 * max(1.0, abs(ip1)))


def test_zero_sum_telescoping():
    rng = np.random.default_rng(7)
    for shape in (16, (8, 8)):
        f = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        L = f.size
        tol = 1e-12 * L * np.max(np.abs(f))
        assert abs(np.sum(laplacian(f))) < tol


def test_bond_identity_matches_laplacian():
    rng = np.random.default_rng(11)
    for shape in (2, 9, (5, 4), (2, 2)):
        s = rng.normal(size=shape)
        lhs = -np.sum(s * laplacian(s))
        rhs = bond_differences_squared(s)
        assert lhs == pytest.approx(rhs, abs=1e-10)
