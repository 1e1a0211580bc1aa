import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import Polynomial

from tomo.bodies import Ellipsoid, ball
from tomo.polyalg import (AlgebraicEquation, FitError, derivative_at_zero, discriminant_in_w, fit_polynomial,
                          has_real_singularities, hilbert_transform, hilbert_transform_many, numeric_discriminant,
                          test_hilbert_polynomiality as hilbert_polynomiality,
                          test_polynomial_integrability as polynomial_integrability,
                          test_power_polynomiality as power_polynomiality, trim_poly)
from tomo.sections import section_profile

import oracles
from conftest import corpus

# frozen from oracles.hilbert_excision applied to 1 - s^2 on [-1, 1]
HILBERT_PARABOLA = {0.0: 0.0, 0.3: 0.3702980646839307}


def test_fit_recovers_cubic():
    t = np.linspace(-2, 3, 40)
    y = 1 - 2 * t + 0.5 * t**3
    rep = fit_polynomial(t, y, max_degree=8)
    assert rep.verdict == "polynomial"
    assert rep.degree == 3
    np.testing.assert_allclose(rep.coefficients, [1, -2, 0, 0.5], atol=1e-10)
    assert rep.poly()(1.5) == pytest.approx(1 - 3 + 0.5 * 1.5**3)


def test_fit_rejects_sqrt():
    t = np.linspace(-0.9, 0.9, 60)
    rep = fit_polynomial(t, np.sqrt(1 - t**2), max_degree=6)
    assert rep.verdict == "not-polynomial"
    assert rep.degree is None
    assert len(rep.residuals_by_degree) == 7


def test_fit_inconclusive_band():
    t = np.linspace(-1, 1, 40)
    y = t + 3e-7 * np.cos(40 * t)
    rep = fit_polynomial(t, y, max_degree=4, tol=1e-7)
    assert rep.verdict == "inconclusive"


def test_fit_input_checks():
    with pytest.raises(FitError, match="max_degree"):
        fit_polynomial(np.arange(5.0), np.arange(5.0), max_degree=4)
    with pytest.raises(FitError, match="distinct"):
        fit_polynomial(np.zeros(20), np.zeros(20), max_degree=2)
    with pytest.raises(ValueError):
        fit_polynomial(np.arange(10.0), np.arange(9.0), max_degree=2)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6))
def test_fit_reproduces_random_polynomials(coef):
    p = Polynomial(coef)
    t = np.linspace(-1, 1, 30)
    y = p(t)
    if np.abs(y).max() < 1e-3:
        return
    rep = fit_polynomial(t, y, max_degree=8)
    assert rep.verdict == "polynomial"
    assert rep.degree <= len(coef) - 1
    np.testing.assert_allclose(rep.poly()(t), y, atol=1e-6 * np.abs(y).max())


def test_trim_poly():
    assert trim_poly(Polynomial([1.0, 2.0, 1e-16])).degree() == 1
    assert trim_poly(Polynomial([0.0, 0.0])).coef.tolist() == [0.0]


def test_ellipse_square_section_is_quadratic():
    E = corpus()["ellipse"]
    dirs = [[1.0, 0.0], [0.6, 0.8]]
    rep = power_polynomiality(E, 2, dirs, max_degree=6)
    assert rep.verdict == "polynomial"
    assert all(it["degree"] == 2 for it in rep.items)
    assert rep.params["m"] == 2
    assert polynomial_integrability(E, dirs, max_degree=6).verdict == "not-polynomial"


def test_ball3_sections_are_polynomial():
    rep = polynomial_integrability(ball(3), [[0.0, 0.0, 1.0], [0.6, 0.0, 0.8]], max_degree=6)
    assert rep.verdict == "polynomial"
    assert rep.to_dict()["items"][0]["degree"] == 2


def test_square_is_not_polynomial():
    rep = power_polynomiality(corpus()["square"], 2, [[0.6, 0.8]], max_degree=2)
    assert rep.verdict == "not-polynomial"
    with pytest.raises(ValueError):
        power_polynomiality(corpus()["square"], 0, [[0.6, 0.8]])


def test_frozen_hilbert_oracle():
    for t, v in HILBERT_PARABOLA.items():
        assert oracles.hilbert_excision(lambda s: 1 - s * s, -1.0, 1.0, t) == pytest.approx(v, abs=1e-9)


@pytest.mark.parametrize("t", sorted(HILBERT_PARABOLA))
def test_hilbert_ball3(t):
    prof = section_profile(ball(3), [0.0, 0.0, 1.0], 48)
    assert hilbert_transform(prof, t) == pytest.approx(math.pi * HILBERT_PARABOLA[t], abs=1e-10)


def test_hilbert_disk_is_linear():
    prof = section_profile(ball(2), [1.0, 0.0], 48)
    ts = np.linspace(-0.8, 0.8, 9)
    np.testing.assert_allclose(hilbert_transform_many(prof, ts), 2 * ts, atol=1e-10)


def test_hilbert_outside_support_matches_quad():
    prof = section_profile(ball(2), [1.0, 0.0], 48)
    # H of sqrt(1 - s^2) outside [-1, 1] is t - sign(t) sqrt(t^2 - 1)
    assert hilbert_transform(prof, 2.0) == pytest.approx(2 * (2.0 - math.sqrt(3.0)), rel=1e-7)


def test_hilbert_many_rejects_outside():
    prof = section_profile(ball(2), [1.0, 0.0], 32)
    with pytest.raises(ValueError):
        hilbert_transform_many(prof, [1.5])


def test_hilbert_polynomiality_verdicts():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        good = hilbert_polynomiality(corpus()["ellipse"], [[0.6, 0.8]], max_degree=4)
        bad = hilbert_polynomiality(corpus()["square"], [[0.6, 0.8]], max_degree=1)
    assert good.verdict == "polynomial"
    assert bad.verdict == "not-polynomial"


def test_hilbert_odd_dimension_warns():
    with pytest.warns(UserWarning, match="even dimension"):
        hilbert_polynomiality(ball(3), [[0.0, 0.0, 1.0]], max_degree=4)


def test_derivatives_of_ball_profile():
    prof = section_profile(ball(3), [0.0, 0.0, 1.0], 64)
    assert derivative_at_zero(prof, 0) == pytest.approx(math.pi, rel=1e-10)
    assert derivative_at_zero(prof, 1) == pytest.approx(0.0, abs=1e-9)
    assert derivative_at_zero(prof, 2) == pytest.approx(-2 * math.pi, rel=1e-8)
    assert derivative_at_zero(prof, 3) == pytest.approx(0.0, abs=1e-6)


def test_derivative_order_limits():
    prof = section_profile(ball(3), [0.0, 0.0, 1.0], 64)
    with pytest.raises(ValueError, match="too large"):
        derivative_at_zero(prof, 13)
    shifted = section_profile(Ellipsoid(np.eye(3), [0, 0, 2.0]), [0.0, 0.0, 1.0], 32)
    with pytest.raises(ValueError, match="strictly inside"):
        derivative_at_zero(shifted, 1)


@pytest.mark.parametrize("coef", [[2.0, -3.0, 1.0], [-1.0, 0.0, 0.0, 1.0], [1.0, 2.0, 0.5, -1.0, 0.3]])
def test_numeric_discriminant_vs_roots(coef):
    assert numeric_discriminant(np.array(coef)) == pytest.approx(oracles.discriminant_from_roots(coef), rel=1e-9)


def test_discriminant_frozen_values():
    assert numeric_discriminant(np.array([2.0, -3.0, 1.0])) == pytest.approx(1.0)
    assert numeric_discriminant(np.array([-1.0, 0.0, 0.0, 1.0])) == pytest.approx(-27.0)
    # the oracle resultant differs from D only by sign and the leading coefficient
    f, g = [1.0, -3.0, 2.0], [2.0, -3.0]
    assert -oracles.sylvester_det(f, g) == pytest.approx(1.0)


def test_discriminant_of_linear_and_sqrt_equations():
    lin = AlgebraicEquation([Polynomial([0, 0, -1]), Polynomial([1.0])])
    np.testing.assert_allclose(discriminant_in_w(lin).coef, [1.0])
    sq = AlgebraicEquation([Polynomial([0, -1.0]), Polynomial([0.0]), Polynomial([1.0])])
    # w^2 - t: D = 4t
    np.testing.assert_allclose(discriminant_in_w(sq).coef, [0.0, 4.0], atol=1e-12)


def test_rational_equation_discriminant_is_q():
    eq = AlgebraicEquation([Polynomial([0, 0, -1.0]), Polynomial([1.0, 0, 1.0])])
    np.testing.assert_allclose(discriminant_in_w(eq).coef, [1.0, 0.0, 1.0], atol=1e-12)


def test_singularity_verdicts():
    free = has_real_singularities(AlgebraicEquation([Polynomial([0, 0, -1.0]), Polynomial([1.0, 0, 1.0])]))
    assert free.kind == "free"
    sing = has_real_singularities(AlgebraicEquation([Polynomial([0, -1.0]), Polynomial([0.0]), Polynomial([1.0])]))
    assert sing.kind == "singular"
    assert sing.roots == pytest.approx([0.0], abs=1e-9)
    assert sing.to_dict()["kind"] == "singular"
    # (w - t)^2 has D identically zero
    dbl = AlgebraicEquation([Polynomial([0, 0, 1.0]), Polynomial([0, -2.0]), Polynomial([1.0])])
    assert has_real_singularities(dbl).kind == "degenerate-at-infinity"
    sq = AlgebraicEquation([Polynomial([0, -1.0]), Polynomial([0.0]), Polynomial([1.0])])
    assert has_real_singularities(sq, reference_degree=3).kind == "degenerate-at-infinity"


def test_equation_validation():
    with pytest.raises(ValueError):
        AlgebraicEquation([])
    with pytest.raises(ValueError, match="zero polynomial"):
        AlgebraicEquation([Polynomial([1.0]), Polynomial([0.0])])
    eq = AlgebraicEquation([[1.0, 2.0], [3.0]])
    assert eq.N == 1 and eq.t_degree == 1
    np.testing.assert_allclose(eq.w_coefficients(2.0), [5.0, 3.0])
