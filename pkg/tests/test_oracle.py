import json
import math

import numpy as np
import pytest

from eulerconj import DomainError, StratumError
from eulerconj.conjugate import cut_bound, t1conj
from eulerconj.elliptic import complete_K, find_k0
from eulerconj.oracle import (
    STANDARD_SEED,
    crosscheck,
    energy,
    exp_jacobian_fd,
    exp_map,
    exp_trajectory,
    fd_determinant_scan,
    random_n1_covectors,
    random_n2_covectors,
)
from eulerconj.oracle import _pair, _perturbations
from eulerconj.strata import Covector, Stratum, curvature_N1, initial_state, natural_period


def test_time_zero_is_initial_state():
    lam = Covector.n1(0.6, 0.9, 2.0)
    st0 = initial_state(lam)
    s = exp_map(lam, 0.0)
    assert (s.x, s.y, s.theta, s.beta, s.c) == (0.0, 0.0, 0.0, st0.beta, st0.c)


def test_line_is_straight():
    s = exp_map(Covector.line(), 3.5)
    assert (s.x, s.y, s.theta) == pytest.approx((3.5, 0.0, 0.0))


def test_circle():
    c = 0.8
    t = np.linspace(0, 10, 21)
    rows = exp_trajectory(Covector.n6(c), t)
    np.testing.assert_allclose(rows[:, 0], np.sin(c * t) / c, atol=1e-10)
    np.testing.assert_allclose(rows[:, 1], (1 - np.cos(c * t)) / c, atol=1e-10)


def test_turning_rate_is_closed_form_curvature():
    lam = Covector.n1(0.7, 0.4, 1.5)
    t = np.linspace(0, 15, 61)
    rows = exp_trajectory(lam, t)
    assert np.max(np.abs(rows[:, 4] - curvature_N1(lam, t))) <= 1e-8
    # theta integrates the curvature, so its derivative is c as well
    h = 1e-4
    th = exp_trajectory(lam, [5.0 - h, 5.0 + h])[:, 2]
    assert (th[1] - th[0]) / (2 * h) == pytest.approx(float(curvature_N1(lam, 5.0)), abs=1e-7)


@pytest.mark.parametrize("tol", [1e-10, 1e-12])
@pytest.mark.parametrize("lam", [Covector.n1(0.4, 0.3, 1.0), Covector.n1(0.98, 1.0, 2.0), Covector.n2(0.5, 0.1, 1.0)])
def test_energy_conserved_over_four_periods(lam, tol):
    T = natural_period(lam)
    rows = exp_trajectory(lam, np.linspace(0, 4 * T, 81), tol)
    e = energy(lam, rows)
    assert np.max(np.abs(e - e[0])) <= tol


def test_bad_times_and_tolerances():
    with pytest.raises(DomainError):
        exp_trajectory(Covector.n1(0.5), [-1.0])
    with pytest.raises(DomainError):
        exp_trajectory(Covector.n1(0.5), [1.0], tol=0.0)
    with pytest.raises(DomainError):
        exp_jacobian_fd(Covector.n1(0.5), -1.0)


def test_difference_quotient_needs_elliptic_stratum():
    with pytest.raises(StratumError):
        exp_jacobian_fd(Covector.n3(), 1.0)
    with pytest.raises(DomainError):
        exp_jacobian_fd(Covector.n1(0.5), 1.0, h=0.0)


def test_k_step_shrinks_near_one():
    lams, steps = _perturbations(Covector.n1(1 - 1e-7), 0.5)
    ks = [lam.k for lam in lams[2:4]]
    assert all(0 < k < 1 for k in ks)
    assert steps[1] <= 1e-7


def test_richardson_consistency():
    lam = Covector.n1(0.6, 0.5, 1.2)
    t = 4.0
    d = [exp_jacobian_fd(lam, t, h) for h in (4e-2, 2e-2, 1e-2, 5e-3)]
    changes = [abs(b - a) for a, b in zip(d, d[1:])]
    for prev, nxt in zip(changes, changes[1:]):
        assert nxt <= 4 * prev
    # second order: each halving cuts the change by about four
    assert changes[-1] < changes[0] / 8


def test_scan_finds_first_conjugate_time():
    lam = Covector.n1(0.5, 0.2, 1.0)
    T = natural_period(lam)
    scan = fd_determinant_scan(lam, 1.5 * T)
    assert scan.zeros[0] == pytest.approx(t1conj(lam).first_time, abs=1e-4 * T)
    text = scan.to_csv()
    assert text.splitlines()[0] == "t,det"
    assert len(text.splitlines()) == len(scan.times) + 1


def test_scan_window():
    with pytest.raises(DomainError):
        fd_determinant_scan(Covector.n1(0.5), 1.0, t_min=2.0)


def test_crosscheck_at_k0():
    lam = Covector.n1(find_k0(), 0.3, 1.0)
    T = natural_period(lam)
    rep = crosscheck(lam, 1.5 * T)
    assert rep.ok
    # the first pair sits at T; a second conjugate time follows before 1.5 T
    assert rep.pairs[0][0] == pytest.approx(T, rel=1e-12)
    assert len(rep.pairs) == 2 and rep.pairs[1][0] < 1.5 * T
    assert rep.max_mismatch <= 1e-4 * T


def test_crosscheck_before_cut_bound_is_empty():
    lam = Covector.n1(0.5, 0.7, 1.0)
    rep = crosscheck(lam, 0.9 * cut_bound(lam))
    assert rep.ok and rep.pairs == [] and rep.fd_zeros == []


def test_crosscheck_n2_is_empty():
    lam = Covector.n2(0.6, 0.3, 1.0)
    rep = crosscheck(lam, 4 * natural_period(lam))
    assert rep.ok and rep.pairs == []
    assert np.all(rep.scan.dets < 0) or np.all(rep.scan.dets > 0)


def test_crosscheck_report_is_json():
    lam = Covector.n1(0.8, 1.0, 2.0)
    rep = crosscheck(lam, 1.5 * natural_period(lam))
    out = json.loads(json.dumps(rep.to_json()))
    assert out["ok"] is True
    assert out["covector"]["stratum"] == "N1"
    assert out["pairs"][0]["mismatch"] <= out["tolerance"]


def test_pairing():
    pairs, ucf, ufd = _pair([1.0, 2.0, 5.0], [1.00001, 2.2, 4.99999], 1e-3)
    assert pairs == [(1.0, 1.00001), (5.0, 4.99999)]
    assert ucf == [2.0] and ufd == [2.2]


def test_standard_sets_are_reproducible():
    a = random_n1_covectors()
    assert a == random_n1_covectors(seed=STANDARD_SEED)
    assert len(a) == 20 and all(lam.stratum == Stratum.N1 for lam in a)
    for lam in a:
        assert 0.05 <= lam.k <= 0.98
        assert 0 <= lam.phase * math.sqrt(lam.r) <= 4 * float(complete_K(lam.k))
    b = random_n2_covectors()
    assert len(b) == 10 and all(lam.stratum.is_n2 for lam in b)
    assert random_n1_covectors(seed=1) != a
