import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from reeb_steady import EdgeMeasure, LogTerm, edge_moment, edge_weight, fit_log_coefficients, total_mass_and_weight
from reeb_steady.catalog import pretzel, torus
from reeb_steady.measures import MeasureError, QuadratureError, realize_weight


def test_uniform_moments_are_exact():
    m = EdgeMeasure.uniform(Fr(0), Fr(1))
    assert edge_moment(m, 0) == 1
    assert edge_moment(m, 2) == Fr(1, 3)
    assert [m.integrate(i) for i in range(5)] == [Fr(1, i + 1) for i in range(5)]


def test_log_density_first_moment_matches_adaptive_quadrature():
    m = EdgeMeasure.polynomial(0.0, 1.0, (0.0,), (LogTerm(0.0, -1.0, "tail"),))
    oracle, _ = integrate.quad(lambda f: -f * math.log(f), 0.0, 1.0, epsabs=1e-14)
    assert edge_moment(m, 1) == pytest.approx(0.25, abs=1e-15)
    assert oracle == pytest.approx(0.25, abs=1e-13)


def test_symmetric_density_has_zero_weight():
    m = EdgeMeasure.polynomial(Fr(-1), Fr(1), (Fr(2), Fr(0), Fr(3)))
    assert edge_weight(m) == 0


def test_torus_weights_reproduce_the_targets():
    a = (Fr(-3), Fr(-1), Fr(2), Fr(2))
    g = torus(a)
    assert [g.weights[e] for e in ("e1", "e2", "e3", "e4")] == list(a)
    assert total_mass_and_weight(g)[1] == 0


def test_pretzel_weights():
    g = pretzel()
    assert sorted(g.weights.values()) == [-1, -1, 0, 0, 0, 1, 1]
    assert total_mass_and_weight(g)[1] == 0


def test_two_edge_sphere_total_weight():
    from reeb_steady import MeasuredReebGraph

    g = MeasuredReebGraph.build(
        [("a", "Min", Fr(-2)), ("s", "Saddle", Fr(-1)), ("b", "Max", Fr(1))],
        [("e", "a", "s", realize_weight(Fr(-2), Fr(-1), Fr(-1))), ("f", "s", "b", realize_weight(Fr(-1), Fr(1), Fr(1)))],
    )
    assert total_mass_and_weight(g)[1] == 0


@pytest.mark.parametrize("lo,hi,target", [(Fr(1), Fr(2), Fr(3)), (Fr(-3), Fr(-1), Fr(-2)), (Fr(-1), Fr(2), Fr(-1, 3)), (Fr(-2), Fr(1), Fr(5))])
def test_realize_weight_hits_target_with_positive_density(lo, hi, target):
    m = realize_weight(lo, hi, target)
    assert m.weight() == target
    assert m.min_interior_density() > 0


def test_realize_weight_rejects_impossible_sign():
    with pytest.raises(MeasureError):
        realize_weight(Fr(1), Fr(2), Fr(-1))


def test_from_table_is_piecewise_constant():
    m = EdgeMeasure.from_table([0.0, 1.0, 3.0], [0.0, 2.0, 3.0])
    assert m.mass() == pytest.approx(3.0)
    assert m.density(0.5) == pytest.approx(2.0)
    assert m.density(2.0) == pytest.approx(0.5)
    with pytest.raises(MeasureError):
        EdgeMeasure.from_table([0.0, 1.0], [1.0, 0.5])


def test_json_round_trip_keeps_moments():
    m = EdgeMeasure.polynomial(Fr(-1), Fr(2), (Fr(3), Fr(1, 2)))
    back = EdgeMeasure.from_json(m.to_json(), Fr(-1), Fr(2))
    assert [back.integrate(i) for i in range(4)] == [m.integrate(i) for i in range(4)]


def test_quadrature_shortfall_raises():
    m = EdgeMeasure.polynomial(1e-300, 1.0, (0.0,), (LogTerm(0.0, -1.0, "external"),))
    with pytest.raises(QuadratureError):
        m.integrate_quad(0, tol=1e-300)


# -- properties ------------------------------------------------------------------

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=7)
positive = st.fractions(min_value=Fr(1, 7), max_value=3, max_denominator=7)


@given(lo=rationals, width=positive, c0=positive, c2=positive, cut=st.fractions(min_value=Fr(1, 10), max_value=Fr(9, 10), max_denominator=10), i=st.integers(0, 10))
def test_moments_add_under_subdivision(lo, width, c0, c2, cut, i):
    hi = lo + width
    m = EdgeMeasure.polynomial(lo, hi, (c0, 0, c2))
    mid = lo + cut * width
    assert m.integrate(i) == m.restrict(lo, mid).integrate(i) + m.restrict(mid, hi).integrate(i)


@given(lo=st.floats(-2, 1), width=st.floats(0.2, 3), c0=st.floats(0.1, 3), log_coef=st.floats(-1, -0.01), i=st.integers(0, 10))
def test_quadrature_matches_closed_form_with_log_terms(lo, width, c0, log_coef, i):
    hi = lo + width
    m = EdgeMeasure.polynomial(lo, hi, (c0, 0.5), (LogTerm(lo, log_coef, "tail"),))
    closed = m.integrate(i)
    tol = 1e-10 * max(1.0, abs(closed))
    quad = m.integrate_quad(i, tol=tol)
    assert abs(quad - closed) <= 10 * tol


@given(lo=rationals, width=positive, c0=positive, c1=rationals)
def test_mass_and_density_positive(lo, width, c0, c1):
    hi = lo + width
    # c1 bounded so the linear density stays positive on the edge
    slope = c1 * c0 / (4 * max(abs(lo), abs(hi), Fr(1)))
    m = EdgeMeasure.polynomial(lo, hi, (c0, slope))
    assert m.mass() > 0
    assert m.min_interior_density(1000) > 0


# -- log-coefficient fitting ------------------------------------------------------

def _samples(kappas, smooth=lambda u: u):
    u = np.concatenate([np.linspace(-0.2, -0.001, 20), np.linspace(0.001, 0.2, 20)])
    out = []
    for k in kappas:
        out.append((u, k * u * np.log(np.abs(u)) + smooth(u)))
    return out


def test_fit_recovers_synthetic_log_model():
    fit = fit_log_coefficients(_samples((2.0, -1.0, -1.0)))
    assert fit.ratios == pytest.approx((2.0, -1.0, -1.0), abs=1e-9)


def test_fit_on_smooth_measure_sees_no_log_term():
    fit = fit_log_coefficients(_samples((0.0, 0.0, 0.0), smooth=lambda u: 1.3 * u + 0.4 * u**2))
    assert all(abs(k) < 1e-9 for k in fit.kappa)


def test_fit_needs_enough_samples():
    u = np.linspace(0.01, 0.1, 4)
    with pytest.raises(ValueError):
        fit_log_coefficients([(u, u)] * 3)
