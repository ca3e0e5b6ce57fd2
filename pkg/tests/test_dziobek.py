import math

import numpy as np
import pytest

from ccfour import (DomainError, DziobekState, MassVector, OrientedAreas,
                    PsiValues, ResidualVector, SquaredDistances,
                    balanced_residuals, cayley, cayley_gradient, cc_residuals,
                    dilate_state, oriented_areas, psi, psi_prime, q_identity,
                    q_residuals, scaling_transform, sign_det, solve_kite,
                    squared_distances, t_values)
from ccfour.dziobek import chord_value, eqconf3_printed_residual, t_spread
from conftest import random_convex_config

EQUAL = MassVector(alpha=1.0, beta=1.0)
SQUARE_SQ = SquaredDistances(2, 1, 1, 1, 1, 2)
SQUARE_AREAS = OrientedAreas(-0.5, -0.5, 0.5, 0.5)
SQUARE_NU = 1.0 - 2.0 ** -1.5          # from psi'(2) - psi'(1) = nu/2
SQUARE_XI = -(2.0 ** -2.5) - SQUARE_NU / 4.0


def square_state(nu=SQUARE_NU, xi=SQUARE_XI):
    return DziobekState(sq=SQUARE_SQ, areas=SQUARE_AREAS, nu=nu, xi=xi)


def test_psi_values():
    assert psi(1.0) == 1.0
    assert psi(4.0) == 0.5
    assert psi(2.0) == pytest.approx(2.0 ** -0.5)
    assert psi_prime(1.0) == -0.5
    assert psi_prime(2.0) == pytest.approx(-(2.0 ** -2.5))
    assert psi_prime(4.0) == -0.0625
    for bad in (0.0, -1.0):
        with pytest.raises(DomainError):
            psi(bad)
        with pytest.raises(DomainError):
            psi_prime(bad)


def test_psi_prime_monotone_increasing(rng):
    s = rng.uniform(0.01, 50.0, size=(1000, 2))
    lo, hi = s.min(axis=1), s.max(axis=1)
    keep = hi - lo > 1e-9
    assert all(psi_prime(h) > psi_prime(l)
               for l, h in zip(lo[keep], hi[keep]))


def test_cayley_square_is_planar():
    assert abs(cayley(SQUARE_SQ)) < 1e-12


def test_cayley_regular_tetrahedron():
    # |S| = 288 V^2 with V = 1/(6 sqrt 2); the sign is fixed by the
    # gradient identity below, which makes S negative on tetrahedra.
    s = cayley((1, 1, 1, 1, 1, 1))
    vol = 1.0 / (6.0 * math.sqrt(2.0))
    assert abs(s) == pytest.approx(288.0 * vol * vol, rel=1e-12)
    assert s == pytest.approx(-4.0, rel=1e-12)


def test_cayley_vanishes_on_planar_configs(rng):
    for _ in range(50):
        p = random_convex_config(rng)
        sq = squared_distances(p)
        scale_sq = np.mean(sq)
        assert abs(cayley(sq)) < 1e-9 * scale_sq ** 2


def test_cayley_gradient_square():
    grad = cayley_gradient(SQUARE_SQ)
    areas = np.asarray(SQUARE_AREAS)
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    expected = [32 * areas[i] * areas[j] for i, j in pairs]
    assert grad[0] == pytest.approx(8.0, rel=1e-7)
    assert grad[1] == pytest.approx(-8.0, rel=1e-7)
    assert np.allclose(grad, expected, rtol=1e-6)


def test_cayley_gradient_matches_dziobek_identity(rng):
    for _ in range(100):
        p = random_convex_config(rng)
        sq = squared_distances(p)
        areas = np.asarray(oriented_areas(p))
        grad = cayley_gradient(sq)
        pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        expected = np.array([32 * areas[i] * areas[j] for i, j in pairs])
        assert np.allclose(grad, expected, rtol=1e-6)


def test_cc_residuals_square_closed_form():
    res = cc_residuals(square_state(), EQUAL)
    assert np.max(np.abs(res)) < 1e-12


def test_cc_residuals_nu_zero_nonzero():
    res = cc_residuals(square_state(nu=0.0), EQUAL)
    psiv = np.array([psi_prime(s) for s in SQUARE_SQ])
    assert np.allclose(res, psiv - SQUARE_XI)
    assert np.max(np.abs(res)) > 0.1


def test_t_values_square_zero():
    t = t_values(SQUARE_SQ, SQUARE_AREAS)
    assert np.allclose(t, 0.0, atol=1e-15)


def test_t_values_equal_on_any_planar_config(rng):
    # sum Delta_i = 0 and sum Delta_i q_i = 0 make t_k = sum Delta_i |q_i|^2
    # for every k, so equality of the t's holds on all planar configs
    for _ in range(20):
        p = random_convex_config(rng)
        t = t_values(squared_distances(p), oriented_areas(p))
        common = float(sum(a * np.dot(q, q)
                           for a, q in zip(oriented_areas(p), p.points)))
        assert np.allclose(t, common, atol=1e-10 * p.scale ** 4 + 1e-12)


def test_t_spread_detects_nonplanar_sq():
    spread = t_spread((1, 1, 1, 1, 1, 1), SQUARE_AREAS)
    assert spread > 0.1


def test_t_area_weighted_sum_vanishes_on_planar(rng):
    # sum_k Delta_k t_k = 2 sum_{i<j} Delta_i Delta_j r_ij^2 = (1/16) sq . grad S,
    # and S is homogeneous of degree 3, so this is 3S/16 = 0 on planar configs.
    pairs = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    for _ in range(50):
        p = random_convex_config(rng)
        sq = squared_distances(p)
        areas = list(oriented_areas(p))
        t = t_values(sq, areas)
        weighted = sum(areas[k] * t[k] for k in range(4))
        pairwise = 2.0 * sum(areas[i] * areas[j] * sq[k]
                             for k, (i, j) in enumerate(pairs))
        assert weighted == pytest.approx(pairwise, rel=1e-12, abs=1e-12)
        assert abs(weighted) < 1e-9 * p.scale ** 4


def test_q_identity_zero_for_equal_t():
    t = [1.3, 1.3, 1.3, 1.3]
    areas = [-0.4, -0.3, 0.35, 0.35]
    assert q_identity(1, 2, 3, t, areas, EQUAL) == pytest.approx(0.0)
    assert np.allclose(q_residuals(t, areas, EQUAL), 0.0, atol=1e-15)


def test_q_identity_square_zero():
    t = t_values(SQUARE_SQ, SQUARE_AREAS)
    assert q_identity(2, 3, 4, t, SQUARE_AREAS, EQUAL) == pytest.approx(0.0)


def test_q_identity_generic_nonzero():
    t = [0.1, 0.7, -0.3, 0.4]
    areas = [-0.5, -0.2, 0.3, 0.4]
    assert abs(q_identity(1, 2, 3, t, areas, EQUAL)) > 1e-3


def test_q_identity_bad_indices():
    with pytest.raises(IndexError):
        q_identity(1, 1, 2, [0, 0, 0, 0], SQUARE_AREAS, EQUAL)
    with pytest.raises(IndexError):
        q_identity(0, 1, 2, [0, 0, 0, 0], SQUARE_AREAS, EQUAL)


@pytest.mark.parametrize("form", ["expanded", "appendix1", "appendix2"])
def test_balanced_residuals_square(form):
    psiv = PsiValues.from_sq(SQUARE_SQ)
    res = balanced_residuals(SQUARE_SQ, psiv, EQUAL, form=form)
    assert np.max(np.abs(res)) < 1e-10


@pytest.mark.parametrize("form", ["expanded", "appendix1", "appendix2"])
def test_balanced_residuals_kite(form):
    m = MassVector(alpha=0.5, beta=0.8)
    st = solve_kite(m).state
    scale = math.sqrt(np.mean(st.sq))
    res = balanced_residuals(st.sq, PsiValues.from_sq(st.sq), m, form=form)
    assert np.max(np.abs(res)) < 1e-9 * scale


def test_balanced_residuals_generic_nonzero(rng):
    p = random_convex_config(rng)
    sq = squared_distances(p)
    res = balanced_residuals(sq, PsiValues.from_sq(sq), EQUAL)
    assert np.max(np.abs(res)) > 1e-6


def test_balanced_residuals_unknown_form():
    with pytest.raises(ValueError):
        balanced_residuals(SQUARE_SQ, PsiValues.from_sq(SQUARE_SQ), EQUAL,
                           form="nope")


def test_eqconf3_printed_reading_available():
    # verbose cross-report of the reading as printed; at a symmetric state
    # (e appears twice) it coincides with the corrected one
    m = MassVector(alpha=0.5, beta=0.8)
    st = solve_kite(m).state
    res = eqconf3_printed_residual(st.sq, PsiValues.from_sq(st.sq), m)
    assert isinstance(res, float)


def test_sign_det_collinear_zero():
    assert sign_det(3, 2, 1, 3, 2, 1) == pytest.approx(0.0)


def test_sign_det_psi_prime_spot_value():
    d = sign_det(3, 2, 1, psi_prime(3), psi_prime(2), psi_prime(1))
    assert d == pytest.approx(0.2426717, abs=1e-6)


def test_sign_det_antisymmetric(rng):
    for _ in range(100):
        u, v, w, U, V, W = rng.normal(size=6)
        assert sign_det(u, v, w, U, V, W) == pytest.approx(
            -sign_det(w, v, u, W, V, U), abs=1e-12)


def test_sign_det_concavity_property(rng):
    count = 0
    while count < 1000:
        vals = np.sort(rng.uniform(0.01, 20.0, size=3))
        w, v, u = vals
        if u - v < 1e-6 or v - w < 1e-6:
            continue
        count += 1
        assert sign_det(u, v, w, psi_prime(u), psi_prime(v),
                        psi_prime(w)) > 0


def test_chord_identity(rng):
    for _ in range(100):
        w, v, u = np.sort(rng.uniform(0.1, 10.0, size=3))
        U, V, W = rng.normal(size=3)
        vp = chord_value(u, w, U, W, v)
        assert sign_det(u, v, w, U, V, W) == pytest.approx(
            (u - w) * (V - vp), rel=1e-10, abs=1e-12)


def test_closure_term_sign_and_forms(rng):
    # for d > b > 0:  b psi'(b) - d psi'(d) = (1/2)(sqrt b - sqrt d)/sqrt(bd) < 0
    for _ in range(200):
        lo, hi = np.sort(rng.uniform(0.01, 20.0, size=2))
        if hi - lo < 1e-9:
            continue
        b, d = lo, hi
        direct = b * psi_prime(b) - d * psi_prime(d)
        closed = 0.5 * (math.sqrt(b) - math.sqrt(d)) / math.sqrt(b * d)
        assert direct < 0
        assert direct == pytest.approx(closed, rel=1e-14)


def test_scaling_transform_identity():
    st = square_state()
    st2, m2 = scaling_transform(st, EQUAL, 1.0)
    assert np.allclose(np.asarray(st2.sq), np.asarray(st.sq))
    assert m2.masses == EQUAL.masses


def test_scaling_transform_square():
    st2, m2 = scaling_transform(square_state(), EQUAL, 8.0)
    assert m2.masses == (0.125, 0.125, 0.125, 0.125)
    assert np.allclose(np.asarray(st2.sq), np.asarray(SQUARE_SQ) / 4.0)
    assert np.max(np.abs(cc_residuals(st2, m2))) < 1e-12


def test_scaling_transform_group_property():
    st1, m1 = scaling_transform(square_state(), EQUAL, 3.0)
    st2, m2 = scaling_transform(st1, m1, 5.0)
    st3, m3 = scaling_transform(square_state(), EQUAL, 15.0)
    assert np.allclose(np.asarray(st2.sq), np.asarray(st3.sq), rtol=1e-14)
    assert st2.nu == pytest.approx(st3.nu, rel=1e-14)
    assert m2.masses == pytest.approx(m3.masses, rel=1e-14)


def test_scaling_transform_rejects_nonpositive():
    with pytest.raises(DomainError):
        scaling_transform(square_state(), EQUAL, 0.0)


def test_dilate_state_preserves_residuals():
    st = dilate_state(square_state(), 2.5)
    assert np.max(np.abs(cc_residuals(st, EQUAL))) < 1e-12


def test_state_derived_quantities():
    st = square_state()
    assert st.lambda_dz == st.nu / 32.0
    assert st.mu(EQUAL) == st.xi * 4.0


def test_residual_vector_square():
    rv = ResidualVector.evaluate(square_state(), EQUAL)
    assert np.max(np.abs(rv.cc)) < 1e-12
    assert abs(rv.planarity) < 1e-12
    assert rv.t_spread < 1e-15
    assert t_spread(SQUARE_SQ, SQUARE_AREAS) == rv.t_spread
