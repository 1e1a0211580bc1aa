import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tomo.bodies import Ellipsoid, LpBall, OracleBody, Polytope, ball, normalize, support, translate
from tomo.sections import (BodySampler, QuadratureConfig, QuadratureError, ball_section, cutoff_volume,
                           fourier_slice, integrate_offsets, invert_radon_3d, local_section_profile,
                           section_function, section_profile, section_values, volume)

import oracles
from conftest import corpus

XI3 = np.array([1.0, 2.0, 2.0]) / 3.0

# frozen from oracles.ellipsoid_section / ellipsoid_cutoff on the ellipsoid3 fixture
ELLIPSOID3_SECTION = {-0.5: 2.230773052233657, 0.0: 3.494610303049487, 0.4: 3.2057332171487256}
ELLIPSOID3_CUTOFF = {-0.5: 0.4690702912287689, 0.0: 1.9756445378362115, 0.4: 3.3542301866626225}
# frozen from oracles.polytope_section_hull on the cube [-1, 1]^3
CUBE_SECTION = {0.0: 5.25, 0.5: 3.75, 1.2: 0.735}
# frozen from oracles.chord_lp on the square [-1, 1]^2 with xi = (3, 4) / 5
SQUARE_CHORD = {0.0: 2.5, 0.5: 1.875, 1.2: 0.41666666666666674}


def test_frozen_values_still_match_oracles(ellipsoid3):
    for t, v in ELLIPSOID3_SECTION.items():
        assert oracles.ellipsoid_section(ellipsoid3.shape, ellipsoid3.center, XI3, t) == pytest.approx(v, rel=1e-13)
    for t, v in ELLIPSOID3_CUTOFF.items():
        assert oracles.ellipsoid_cutoff(ellipsoid3.shape, ellipsoid3.center, XI3, t) == pytest.approx(v, rel=1e-13)
    V = oracles.polytope_vertices(np.vstack([np.eye(3), -np.eye(3)]), np.ones(6))
    for t, v in CUBE_SECTION.items():
        assert oracles.polytope_section_hull(V, XI3, t) == pytest.approx(v, rel=1e-12)


@pytest.mark.parametrize("t", sorted(ELLIPSOID3_SECTION))
def test_ellipsoid_section_exact(ellipsoid3, t):
    assert section_function(ellipsoid3, XI3, t)[0] == pytest.approx(ELLIPSOID3_SECTION[t], rel=1e-12)


@pytest.mark.parametrize("t", sorted(CUBE_SECTION))
def test_cube_section_by_clipping(cube, t):
    assert section_function(cube, XI3, t)[0] == pytest.approx(CUBE_SECTION[t], rel=1e-12)


@pytest.mark.parametrize("t", sorted(SQUARE_CHORD))
def test_square_chord(square, t):
    xi = np.array([0.6, 0.8])
    assert section_function(square, xi, t)[0] == pytest.approx(SQUARE_CHORD[t], rel=1e-12)


def test_ball_closed_form():
    for n in (2, 3, 4):
        for t in (-0.7, 0.0, 0.3):
            xi = normalize(np.arange(1.0, n + 1))
            assert section_function(ball(n), xi, t)[0] == pytest.approx(oracles.ball_section(n, t), rel=1e-12)
            assert ball_section(n, t) == pytest.approx(oracles.ball_section(n, t), rel=1e-14)


def test_zero_outside_support(ellipsoid3):
    lo = -support(ellipsoid3, -XI3)
    hi = support(ellipsoid3, XI3)
    assert section_function(ellipsoid3, XI3, hi + 0.1) == (0.0, 0.0)
    assert section_function(ellipsoid3, XI3, lo - 1e-3) == (0.0, 0.0)


def test_tangency_clamp(square):
    # within 1e-6 of the width from a support value the section is set to zero
    xi = np.array([1.0, 0.0])
    assert section_function(square, xi, 1.0 - 1e-7)[0] == 0.0
    assert section_function(square, xi, 1.0 - 1e-4)[0] == pytest.approx(2.0)


def test_monte_carlo_within_four_sigma(ellipsoid3):
    cfg = QuadratureConfig(method="monte-carlo", samples=100_000, seed=5)
    v, err = section_function(ellipsoid3, XI3, 0.0, cfg)
    assert err > 0
    assert abs(v - ELLIPSOID3_SECTION[0.0]) < 4 * err
    again = section_function(ellipsoid3, XI3, 0.0, cfg)
    assert again == (v, err)


def test_tensor_gauss_oracle_body():
    cfg = QuadratureConfig(method="tensor-gauss", points=128)
    cube = OracleBody(3, lambda x: np.all(np.abs(x) <= 1.0, axis=-1), lambda xi: np.abs(xi).sum(axis=-1), 2.0)
    v, err = section_function(cube, [0.0, 0.0, 1.0], 0.3, cfg)
    # indicator integrands converge slowly; the halving estimate must bracket the truth
    assert abs(v - 4.0) <= err
    sphere = OracleBody(3, lambda x: np.sum(x**2, axis=-1) <= 1.0, lambda xi: np.linalg.norm(xi, axis=-1), 1.0)
    v, err = section_function(sphere, [0.0, 0.0, 1.0], 0.3, cfg)
    assert abs(v - math.pi * 0.91) <= 2 * err


def test_lpball_exact_against_area():
    L = LpBall(4, [1, 1], [0, 0])
    assert volume(L) == pytest.approx(oracles.lp_area(4, 2), rel=1e-10)
    L3 = LpBall(4, [1, 1, 1], [0, 0, 0])
    assert volume(L3, XI3) == pytest.approx(oracles.lp_area(4, 3), rel=1e-9)


def test_lpball_section_symmetric():
    L3 = LpBall(4, [1, 1, 1], [0, 0, 0])
    a, _ = section_values(L3, XI3, [-0.4, 0.4])
    assert a[0] == pytest.approx(a[1], rel=1e-12)


def test_unknown_method_rejected(ellipsoid3):
    with pytest.raises(ValueError):
        QuadratureConfig(method="simpson")
    with pytest.raises(ValueError, match="not available"):
        section_function(ellipsoid3, XI3, 0.0, QuadratureConfig(method="clipping"))


def test_profile_chebyshev_offsets(ellipsoid3):
    prof = section_profile(ellipsoid3, XI3, grid_size=16)
    assert prof.offsets.size == 16
    assert np.all(np.diff(prof.offsets) > 0)
    assert prof.b_minus < prof.offsets[0] and prof.offsets[-1] < prof.b_plus
    assert prof.width == pytest.approx(2 * math.sqrt(XI3 @ ellipsoid3.shape @ XI3))
    assert len(list(prof.rows())) == 16
    with pytest.raises(ValueError):
        section_profile(ellipsoid3, XI3, grid_size=4)


@pytest.mark.parametrize("t", sorted(ELLIPSOID3_CUTOFF))
def test_cutoff_volume(ellipsoid3, t):
    assert cutoff_volume(ellipsoid3, XI3, t) == pytest.approx(ELLIPSOID3_CUTOFF[t], rel=1e-10)
    total = 4 / 3 * math.pi * math.sqrt(np.linalg.det(ellipsoid3.shape))
    assert cutoff_volume(ellipsoid3, XI3, t, "+") == pytest.approx(total - ELLIPSOID3_CUTOFF[t], rel=1e-10)


def test_volume_independent_of_direction(cube, rng):
    for _ in range(3):
        assert volume(cube, normalize(rng.normal(size=3))) == pytest.approx(8.0, rel=1e-10)


def test_fourier_slice_closed_forms():
    assert fourier_slice(ball(3), XI3, 5.0) == pytest.approx(-0.23898574868457986, abs=1e-11)
    assert fourier_slice(ball(2), [0.6, 0.8], 5.0) == pytest.approx(-0.41164808485065096, abs=1e-11)
    assert fourier_slice(ball(3), XI3, 5.0) == pytest.approx(oracles.ball3_fourier(5.0), abs=1e-11)


def test_fourier_slice_translation_phase(ellipsoid3):
    shift = np.array([0.3, -0.1, 0.2])
    lam = 3.0
    a = fourier_slice(ellipsoid3, XI3, lam)
    b = fourier_slice(translate(ellipsoid3, shift), XI3, lam)
    assert b == pytest.approx(a * np.exp(1j * lam * (shift @ XI3)), abs=1e-11)


def test_integrate_offsets_vector_integrand(ellipsoid3):
    got = integrate_offsets(ellipsoid3, XI3, lambda t, A: np.stack([A, t * A], axis=-1))
    assert got.shape == (2,)
    vol = 4 / 3 * math.pi * math.sqrt(np.linalg.det(ellipsoid3.shape))
    assert got[0] == pytest.approx(vol, rel=1e-10)
    # first moment is Vol times the centroid offset
    assert got[1] == pytest.approx(vol * ellipsoid3.center @ XI3, rel=1e-9)


def test_quadrature_error_carries_estimate():
    cfg = QuadratureConfig(max_nodes=32)
    with pytest.raises(QuadratureError) as info:
        fourier_slice(ball(3), [0.0, 0.0, 1.0], 500.0, cfg)
    assert np.isfinite(info.value.estimate)
    assert "achieved estimate" in str(info.value)


@pytest.mark.parametrize("x, expected", [([0.0, 0.0, 0.0], 1.0), ([0.5, 0.3, -0.2], 1.0),
                                         ([0.0, 0.0, 3.0], 0.0), ([2.0, 0.0, 0.0], 0.0)])
def test_inversion_ball(x, expected):
    res = invert_radon_3d(BodySampler(ball(3)), x)
    assert res.value == pytest.approx(expected, abs=1e-6)
    assert not res.near_boundary


def test_inversion_ellipsoid_and_near_flag(ellipsoid3):
    s = BodySampler(ellipsoid3)
    assert invert_radon_3d(s, ellipsoid3.center).value == pytest.approx(1.0, abs=1e-6)
    on = ellipsoid3.center + np.linalg.cholesky(ellipsoid3.shape) @ np.array([0.0, 0.0, 1.0])
    assert invert_radon_3d(s, on).near_boundary


def test_inversion_fixed_grid_plain_callable():
    def sampler(X, T):
        return ball_section(3, T)

    res = invert_radon_3d(sampler, [0.0, 0.0, 0.0])
    assert res.value == pytest.approx(1.0, abs=1e-2)


def test_local_profile_ball():
    a = np.array([0.0, 0.0, 1.0])
    prof = local_section_profile(ball(3), a, [0.01, 0.1, 0.5])
    assert_allclose(prof.xi, [0.0, 0.0, -1.0])
    # inward offsets t below the tangent plane: disk of radius^2 = 1 - (1 - t)^2
    expected = [math.pi * (1 - (1 - t) ** 2) for t in (0.01, 0.1, 0.5)]
    assert_allclose(prof.values, expected, rtol=1e-12)


def test_local_profile_requires_boundary_point():
    with pytest.raises(Exception, match="not on the boundary"):
        local_section_profile(ball(3), [0.0, 0.0, 0.5], [0.1])


def test_polytope_2d_pentagon_chords_vs_lp(rng):
    P = corpus()["pentagon"]
    for _ in range(5):
        xi = normalize(rng.normal(size=2))
        for t in np.linspace(-0.5, 0.5, 5):
            got = section_function(P, xi, t)[0]
            assert got == pytest.approx(oracles.chord_lp(P.normals, P.offsets, xi, t), abs=1e-9)


def test_random_polytope_3d_vs_hull(rng):
    normals = np.vstack([np.eye(3), -np.eye(3), rng.normal(size=(6, 3))])
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    offsets = rng.uniform(0.8, 1.2, size=len(normals))
    P = Polytope(normals, offsets)
    V = oracles.polytope_vertices(normals, offsets)
    xi = normalize(rng.normal(size=3))
    for t in (-0.4, 0.0, 0.35):
        assert section_function(P, xi, t)[0] == pytest.approx(oracles.polytope_section_hull(V, xi, t), rel=1e-9)


def test_ellipsoid_random_directions(rng):
    A = rng.normal(size=(3, 3))
    E = Ellipsoid(A @ A.T + np.eye(3), rng.normal(size=3) * 0.2)
    for _ in range(4):
        xi = normalize(rng.normal(size=3))
        t = E.center @ xi + 0.3
        assert section_function(E, xi, t)[0] == pytest.approx(
            oracles.ellipsoid_section(E.shape, E.center, xi, t), rel=1e-11)
