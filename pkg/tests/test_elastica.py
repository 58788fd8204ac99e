import csv
import io
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eulerconj import DomainError
from eulerconj.conjugate import t1conj
from eulerconj.elastica import (
    Marker,
    Rule,
    Status,
    classify_stability,
    count_inflections,
    emit_plot,
    inflection_counts,
    inflection_times,
    markers_for,
    render_svg,
    sample_arc,
)
from eulerconj.elliptic import complete_K, find_k0
from eulerconj.roots import root_px1
from eulerconj.strata import Covector, curvature_N1, period_N1

K0 = find_k0()
SVG = "{http://www.w3.org/2000/svg}"


def _K(k):
    return float(complete_K(k))


def test_line_samples_are_collinear():
    arc = sample_arc(Covector.line(), 5.0, 20)
    assert np.all(arc.samples[:, 2] == 0.0)
    np.testing.assert_allclose(arc.samples[:, 1], arc.s)


def test_circle_samples():
    c = 1.3
    arc = sample_arc(Covector.n6(c), 4.0, 50)
    x, y = arc.samples[:, 1], arc.samples[:, 2]
    np.testing.assert_allclose(np.hypot(x, y - 1 / c), 1 / c, atol=1e-10)
    assert np.all(arc.curvature == c)


def test_samples_are_ordered_and_match_curvature():
    lam = Covector.n1(0.6, 0.3, 1.4)
    arc = sample_arc(lam, 9.0, 90)
    assert arc.s[0] == 0.0 and arc.s[-1] == 9.0
    assert np.all(np.diff(arc.s) > 0)
    assert np.max(np.abs(arc.curvature - curvature_N1(lam, arc.s))) <= 1e-9


def test_sample_arguments():
    with pytest.raises(DomainError):
        sample_arc(Covector.n1(0.5), 0.0)
    with pytest.raises(DomainError):
        sample_arc(Covector.n1(0.5), 1.0, n=1)


def test_two_zeros_per_period():
    lam = Covector.n1(0.5, 0.3, 1.0)
    T = period_N1(lam)
    arc = sample_arc(lam, T, 400)
    c = arc.curvature
    assert np.count_nonzero(np.sign(c[:-1]) * np.sign(c[1:]) < 0) == 2
    assert inflection_counts(lam, T) == (2, 0)


def test_closed_form_inflections_are_curvature_zeros():
    lam = Covector.n1(0.8, 1.1, 2.5)
    zs = inflection_times(lam, 20.0)
    assert len(zs) > 3
    assert np.max(np.abs(curvature_N1(lam, np.array(zs)))) <= 1e-12


def test_counts_examples():
    # starts at a vertex: first zero at K/sqrt(r)
    lam = Covector.n1(0.5, 0.0, 1.0)
    assert count_inflections(sample_arc(lam, 0.5 * _K(0.5), 10)) == (0, 0)
    # one period from a zero: zeros at 0, 2K and 4K
    lam = Covector.n1(0.5, _K(0.5), 1.0)
    assert inflection_counts(lam, period_N1(lam)) == (1, 2)
    assert inflection_counts(Covector.n2(0.5, 0.2), 30.0) == (0, 0)


@given(st.floats(0.02, 0.99), st.floats(-10, 10), st.floats(0.1, 10), st.floats(0.01, 0.499))
def test_short_arcs_have_at_most_one_zero(k, phi, r, frac):
    lam = Covector.n1(k, phi, r)
    interior, boundary = inflection_counts(lam, frac * period_N1(lam))
    assert interior + boundary <= 1


def test_no_inflection_rule():
    v = classify_stability(Covector.n1(0.95, 0.0, 1.0), 0.5 * _K(0.95))
    assert (v.status, v.rule) == (Status.LocallyOptimal, Rule.NoInflection)
    v = classify_stability(Covector.n2(0.5, 0.1), 100.0)
    assert (v.status, v.rule) == (Status.LocallyOptimal, Rule.NoInflection)


def test_one_inflection_small_k():
    k = 0.7
    lam = Covector.n1(k, 0.0, 1.0)
    t = 1.5 * _K(k)
    assert inflection_counts(lam, t) == (1, 0)
    v = classify_stability(lam, t)
    assert (v.status, v.rule) == (Status.LocallyOptimal, Rule.OneInflectionSmallK)


def test_three_inflections():
    lam = Covector.n1(0.3, 0.0, 1.0)
    t = 5.5 * _K(0.3)
    assert inflection_counts(lam, t)[0] == 3
    v = classify_stability(lam, t)
    assert (v.status, v.rule) == (Status.NotLocallyOptimal, Rule.ThreePlusInflections)


def test_one_inflection_beyond_kbar_can_fail():
    # inflection-centred arc with half-length p between px1 and 2K
    k = 0.995
    K = _K(k)
    p = 0.5 * (root_px1(1, k) + 2 * K)
    lam = Covector.n1(k, K - p, 1.0)
    t = 2 * p
    assert inflection_counts(lam, t) == (1, 0)
    v = classify_stability(lam, t)
    assert v.status == Status.NotLocallyOptimal
    assert v.rule == Rule.ConjugateTimeComparison
    assert v.certificate == t1conj(lam).first_time < t


def test_boundary_is_undetermined():
    lam = Covector.n1(0.5, 0.2, 1.0)
    tc = t1conj(lam).first_time
    v = classify_stability(lam, tc)
    assert v.status == Status.UndeterminedBoundary
    assert v.status.slug == "undetermined-boundary"
    assert classify_stability(lam, tc * (1 + 1e-6)).status == Status.NotLocallyOptimal
    assert classify_stability(lam, tc * (1 - 1e-6)).status == Status.LocallyOptimal


def _random_arcs(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        k, r = rng.uniform(0.02, 0.99), rng.uniform(0.2, 5)
        lam = Covector.n1(k, rng.uniform(0, 4 * _K(k)) / math.sqrt(r), r)
        yield lam, rng.uniform(0.05, 3.0) * period_N1(lam)


def test_rules_agree_with_conjugate_time_on_200_arcs():
    for lam, t in _random_arcs(200, 99):
        v = classify_stability(lam, t)
        tc = t1conj(lam).first_time
        if v.rule in (Rule.NoInflection, Rule.OneInflectionSmallK):
            assert t <= tc
        elif v.rule == Rule.ThreePlusInflections:
            assert t > tc
        if v.rule == Rule.ThreePlusInflections:
            assert v.status == Status.NotLocallyOptimal
        if v.rule == Rule.NoInflection:
            assert v.status == Status.LocallyOptimal


def test_losing_optimality_is_permanent():
    for lam, t in _random_arcs(30, 5):
        if classify_stability(lam, t).status != Status.NotLocallyOptimal:
            continue
        for later in np.linspace(t, 4 * period_N1(lam), 12)[1:]:
            assert classify_stability(lam, later).status == Status.NotLocallyOptimal


def test_verdict_json():
    out = classify_stability(Covector.n1(0.5, 0.2, 1.0), 20.0).to_json()
    assert out["status"] == "NotLocallyOptimal"
    assert set(out) == {"status", "rule", "certificate"}


# -- plots ------------------------------------------------------------------

def test_empty_markers_give_polyline_only():
    arc = sample_arc(Covector.n1(0.5, 0.2, 1.0), 5.0, 50)
    root = ET.fromstring(render_svg(arc, []))
    tags = [child.tag for child in root]
    assert tags == [SVG + "polyline"]


def test_arc_through_conjugate_point_has_one_cross():
    lam = Covector.n1(0.5, 0.2, 1.0)
    t = t1conj(lam).first_time + 0.5
    ms = markers_for(lam, t)
    assert sum(1 for m in ms if m.kind == "conjugate") == 1
    root = ET.fromstring(render_svg(sample_arc(lam, t, 100), ms))
    assert len(root.findall(SVG + "path")) == 1
    assert len(root.findall(SVG + "circle")) == len(inflection_times(lam, t))


def test_svg_is_deterministic(tmp_path):
    lam = Covector.n1(0.8, 0.4, 1.0)
    arc = sample_arc(lam, 10.0, 80)
    ms = markers_for(lam, 10.0)
    a, csv_a = emit_plot(arc, ms, tmp_path / "a.svg")
    b, _ = emit_plot(sample_arc(lam, 10.0, 80), markers_for(lam, 10.0), tmp_path / "b.svg")
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(io.StringIO(csv_a.read_text())))
    assert rows[0] == ["s", "x", "y", "theta", "curvature"]
    assert len(rows) == 82


def test_plot_to_missing_directory_fails(tmp_path):
    arc = sample_arc(Covector.line(), 1.0, 4)
    with pytest.raises(OSError):
        emit_plot(arc, [Marker("inflection", 0.5)], tmp_path / "nope" / "x.svg")
