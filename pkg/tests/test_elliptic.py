import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.special import ellipe, ellipj, ellipk

import reference as ref
from eulerconj import DomainError
from eulerconj.elliptic import (
    complete_E,
    complete_K,
    epsilon_critical,
    find_k0,
    jacobi,
    jacobi_am,
    jacobi_critical,
    jacobi_epsilon,
    jacobi_with_epsilon,
)

moduli = st.floats(0.0, 0.999)
args = st.floats(-20.0, 20.0)


def test_complete_integrals_at_zero():
    assert complete_K(0.0) == pytest.approx(math.pi / 2, abs=1e-15)
    assert complete_E(0.0) == pytest.approx(math.pi / 2, abs=1e-15)


@pytest.mark.parametrize("k", [0.1, 0.5, 0.9, 0.99, 0.999999])
def test_complete_integrals_match_quadrature(k):
    assert float(complete_K(k)) == pytest.approx(float(ref.K(k)), rel=1e-13)
    assert float(complete_E(k)) == pytest.approx(float(ref.E(k)), rel=1e-13)


def test_complete_integrals_at_half_to_1e12():
    assert abs(float(complete_K(0.5)) - float(ref.K(0.5))) <= 1e-12
    assert abs(float(complete_E(0.5)) - float(ref.E(0.5))) <= 1e-12


def test_complete_integrals_vectorize_like_scipy():
    k = np.linspace(0.0, 0.99, 50)
    np.testing.assert_allclose(complete_K(k), ellipk(k * k), rtol=1e-13)
    np.testing.assert_allclose(complete_E(k), ellipe(k * k), rtol=1e-13)


def test_monotone_in_k():
    k = np.linspace(0.0, 0.999, 400)
    assert np.all(np.diff(complete_K(k)) > 0)
    assert np.all(np.diff(complete_E(k)) < 0)
    assert np.all(complete_E(k[1:]) < complete_K(k[1:]))
    assert complete_K(0.999) > complete_K(0.9)


@pytest.mark.parametrize("k", [1.0, 1.5, -0.1, float("nan")])
def test_modulus_outside_range_rejected(k):
    with pytest.raises(DomainError):
        complete_K(k)
    with pytest.raises(DomainError):
        jacobi(0.3, k)


@pytest.mark.parametrize("u", [float("inf"), float("-inf"), float("nan")])
def test_nonfinite_argument_rejected(u):
    with pytest.raises(DomainError):
        jacobi(u, 0.5)
    with pytest.raises(DomainError):
        jacobi_epsilon(u, 0.5)


@pytest.mark.parametrize("k", [0.0, 0.3, 0.9, 0.999])
def test_quarter_period_values(k):
    sn, cn, dn = jacobi(0.0, k)
    assert (sn, cn, dn) == (0.0, 1.0, 1.0)
    K = float(complete_K(k))
    sn, cn, dn = jacobi(K, k)
    assert sn == pytest.approx(1.0, abs=1e-14)
    assert cn == pytest.approx(0.0, abs=1e-14)
    assert dn == pytest.approx(math.sqrt(1 - k * k), abs=1e-14)
    assert float(jacobi_epsilon(K, k)) == pytest.approx(float(complete_E(k)), abs=1e-14)


def test_jacobi_matches_ode_oracle():
    k = 0.6

    def rhs(_, y):
        s, c, d = y
        return [c * d, -s * d, -k * k * s * c]

    sol = solve_ivp(rhs, (0.0, 0.7), [0.0, 1.0, 1.0], method="DOP853", rtol=1e-13, atol=1e-14)
    expected = sol.y[:, -1]
    got = np.array(jacobi(0.7, k))
    assert np.max(np.abs(got - expected)) <= 1e-10


def test_jacobi_matches_mpmath_on_random_points():
    rng = np.random.default_rng(7)
    for u, k in zip(rng.uniform(-30, 30, 40), rng.uniform(0, 0.9999, 40)):
        m = mp.mpf(k) ** 2
        got = jacobi(u, k)
        for name, v in zip(("sn", "cn", "dn"), got):
            assert abs(v - float(mp.ellipfun(name, u, m=m))) <= 5e-14


def test_epsilon_matches_quadrature():
    assert abs(float(jacobi_epsilon(1.3, 0.8)) - float(ref.epsilon(1.3, 0.8))) <= 1e-11


def test_epsilon_at_zero_modulus_is_identity():
    u = np.linspace(-12, 12, 101)
    np.testing.assert_allclose(jacobi_epsilon(u, 0.0), u, atol=1e-13)


def test_epsilon_matches_scipy_incomplete_integral():
    from scipy.special import ellipeinc

    k = 0.7
    u = np.linspace(-9, 9, 77)
    sn, cn, dn, ph = ellipj(u, k * k)
    np.testing.assert_allclose(jacobi_epsilon(u, k), ellipeinc(ph, k * k), atol=1e-13)


def test_identity_grid_of_1000_points():
    u, k = np.meshgrid(np.linspace(-20, 20, 40), np.linspace(0.0, 0.999, 25))
    u, k = u.ravel(), k.ravel()
    assert u.size == 1000
    sn, cn, dn = jacobi(u, k)
    assert np.max(np.abs(sn**2 + cn**2 - 1)) <= 1e-12
    assert np.max(np.abs(dn**2 + k**2 * sn**2 - 1)) <= 1e-12
    assert np.all(dn >= np.sqrt(1 - k * k) - 1e-15)


def test_periodicity_on_grid():
    u, k = np.meshgrid(np.linspace(-20, 20, 40), np.linspace(0.0, 0.999, 25))
    u, k = u.ravel(), k.ravel()
    K = complete_K(k)
    assert np.max(np.abs(jacobi(u + 4 * K, k).sn - jacobi(u, k).sn)) <= 1e-10
    assert np.max(np.abs(jacobi(u + 4 * K, k).cn - jacobi(u, k).cn)) <= 1e-10
    assert np.max(np.abs(jacobi(u + 2 * K, k).dn - jacobi(u, k).dn)) <= 1e-10


def test_epsilon_quasi_periodicity_on_grid():
    u, k = np.meshgrid(np.linspace(-20, 20, 40), np.linspace(0.0, 0.999, 25))
    u, k = u.ravel(), k.ravel()
    K, E = complete_K(k), complete_E(k)
    gap = jacobi_epsilon(u + 2 * K, k) - jacobi_epsilon(u, k) - 2 * E
    assert np.max(np.abs(gap)) <= 1e-10


@pytest.mark.parametrize("k", [0.2, 0.6, 0.95])
def test_derivatives_against_central_differences(k):
    h = 1e-6
    u = np.linspace(-5, 5, 41)
    sn_p = (jacobi(u + h, k).sn - jacobi(u - h, k).sn) / (2 * h)
    _, cn, dn = jacobi(u, k)
    assert np.max(np.abs(sn_p - cn * dn)) <= 1e-6
    eps_p = (jacobi_epsilon(u + h, k) - jacobi_epsilon(u - h, k)) / (2 * h)
    assert np.max(np.abs(eps_p - dn**2)) <= 1e-6


def test_amplitude_is_consistent():
    u = np.linspace(-7, 7, 31)
    k = 0.8
    am = jacobi_am(u, k)
    sn, cn, _ = jacobi(u, k)
    np.testing.assert_allclose(np.sin(am), sn, atol=1e-14)
    np.testing.assert_allclose(np.cos(am), cn, atol=1e-14)


def test_critical_helpers_are_hyperbolic():
    u = np.linspace(-4, 4, 17)
    sn, cn, dn = jacobi_critical(u)
    np.testing.assert_allclose(sn, np.tanh(u))
    np.testing.assert_allclose(cn, 1 / np.cosh(u))
    np.testing.assert_allclose(dn, 1 / np.cosh(u))
    np.testing.assert_allclose(epsilon_critical(u), np.tanh(u))


def test_critical_helpers_are_the_limit():
    k = 1 - 1e-12
    u = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(jacobi(u, k).sn, jacobi_critical(u).sn, atol=1e-10)


def test_with_epsilon_agrees_with_separate_calls():
    u = np.linspace(-10, 10, 21)
    s, c, d, E = jacobi_with_epsilon(u, 0.4)
    np.testing.assert_array_equal(np.array([s, c, d]), np.array(jacobi(u, 0.4)))
    np.testing.assert_array_equal(E, jacobi_epsilon(u, 0.4))


def test_k0():
    k0 = find_k0()
    assert 0.908 < k0 < 0.910
    assert abs(2 * float(complete_E(k0)) - float(complete_K(k0))) <= 1e-10
    assert 2 * float(complete_E(0.0)) - float(complete_K(0.0)) == pytest.approx(math.pi / 2)


def test_k0_matches_high_precision_root():
    expected = 0.90890855754854147824  # mpmath findroot of 2E - K at 40 digits
    assert find_k0() == pytest.approx(expected, abs=1e-13)


@given(args, moduli)
def test_sn_odd_cn_dn_even(u, k):
    a, b = jacobi(u, k), jacobi(-u, k)
    assert a.sn == pytest.approx(-b.sn, abs=1e-14)
    assert a.cn == pytest.approx(b.cn, abs=1e-14)
    assert a.dn == pytest.approx(b.dn, abs=1e-14)
    assert float(jacobi_epsilon(u, k)) == pytest.approx(-float(jacobi_epsilon(-u, k)), abs=1e-13)


@given(st.floats(1e-3, 20.0), moduli)
def test_epsilon_exceeds_lower_bound(u, k):
    # E(u) - (1-k^2) u = k^2 * integral of cn^2 >= 0
    gap = float(jacobi_epsilon(u, k)) - (1 - k * k) * u
    assert gap >= -1e-13
    assert gap <= k * k * u + 1e-13


@given(args, moduli)
def test_type_invariants(u, k):
    sn, cn, dn = jacobi(u, k)
    assert abs(sn * sn + cn * cn - 1) <= 1e-14
    assert abs(dn * dn + k * k * sn * sn - 1) <= 1e-14
    assert dn >= math.sqrt(1 - k * k) - 1e-15
