import math

import numpy as np
import pytest

from ccfour import (Degenerate, MassVector, NotConvex, NotPlanar,
                    PlanarConfig, canonicalize, congruent, oriented_areas,
                    realize, squared_distances)
from conftest import random_convex_config, unit_square_config

EQUAL = MassVector(alpha=1.0, beta=1.0)


def rotated(p: PlanarConfig, angle: float) -> PlanarConfig:
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return PlanarConfig.from_points(p.points @ rot.T, p.masses)


def test_planar_config_rejects_offset_centroid():
    pts = [[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, -1.0]]
    with pytest.raises(ValueError, match="centroid"):
        PlanarConfig(points=np.array(pts), masses=EQUAL)
    # from_points recenters the same data
    PlanarConfig.from_points(pts, EQUAL)


def test_planar_config_rejects_coincident_points():
    pts = [[-1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [-1.0, 0.0]]
    with pytest.raises(ValueError, match="coincide"):
        PlanarConfig.from_points(pts, EQUAL)


def test_oriented_areas_square():
    areas = oriented_areas(unit_square_config())
    assert np.allclose(areas, [-0.5, -0.5, 0.5, 0.5], atol=1e-15)


def test_oriented_areas_sum_to_zero(rng):
    for _ in range(50):
        p = random_convex_config(rng)
        areas = oriented_areas(p)
        assert abs(sum(areas)) < 1e-12 * p.scale ** 2


def test_oriented_areas_collinear_degenerate():
    pts = [[-3.0, 0.0], [3.0, 0.0], [1.0, 0.0], [-1.0, 0.0]]
    p = PlanarConfig.from_points(pts, EQUAL)
    with pytest.raises(Degenerate):
        oriented_areas(p)


def test_oriented_areas_point_inside_triangle_not_convex():
    pts = [[0.0, 0.0], [2.0, 0.0], [1.0, 2.0], [1.0, 0.5]]
    p = PlanarConfig.from_points(pts, EQUAL)
    with pytest.raises(NotConvex):
        oriented_areas(p)


def test_oriented_areas_scale_quadratically(rng):
    p = random_convex_config(rng)
    k = 3.7
    scaled = PlanarConfig.from_points(p.points * k, p.masses)
    assert np.allclose(np.asarray(oriented_areas(scaled)),
                       k * k * np.asarray(oriented_areas(p)), rtol=1e-12)


def test_squared_distances_square():
    sq = squared_distances(unit_square_config())
    assert np.allclose(sq, [2, 1, 1, 1, 1, 2], atol=1e-15)


def test_squared_distances_rhombus():
    p_half, r_half = 1.3, 0.6
    pts = [[-p_half, 0], [p_half, 0], [0, r_half], [0, -r_half]]
    sq = squared_distances(PlanarConfig.from_points(pts, EQUAL))
    side = p_half ** 2 + r_half ** 2
    assert np.allclose(sq, [4 * p_half ** 2, side, side, side, side,
                            4 * r_half ** 2], rtol=1e-14)


def test_squared_distances_homogeneous(rng):
    p = random_convex_config(rng)
    k = 0.42
    scaled = PlanarConfig.from_points(p.points * k, p.masses)
    assert np.allclose(np.asarray(squared_distances(scaled)),
                       k * k * np.asarray(squared_distances(p)), rtol=1e-12)


def test_realize_square():
    p = realize((2, 1, 1, 1, 1, 2), EQUAL)
    assert congruent(p, unit_square_config(), tol=1e-10)


def test_realize_tetrahedron_not_planar():
    with pytest.raises(NotPlanar):
        realize((1, 1, 1, 1, 1, 1), EQUAL)


def test_realize_round_trip(rng):
    for _ in range(100):
        p = random_convex_config(rng)
        sq = squared_distances(p)
        back = squared_distances(realize(sq, p.masses))
        assert np.allclose(np.asarray(back), np.asarray(sq), rtol=1e-10)


def test_canonicalize_square_frame():
    frame = canonicalize(unit_square_config())
    assert frame.u == pytest.approx(frame.v, abs=1e-12)
    assert frame.t == pytest.approx(frame.s, abs=1e-12)
    assert frame.theta == pytest.approx(math.pi / 2, abs=1e-12)
    assert frame.reconstruct(EQUAL).moment_of_inertia() == pytest.approx(
        1.0, abs=1e-12)


def test_canonicalize_quotients_symmetries(rng):
    p = random_convex_config(rng)
    f0 = canonicalize(p).as_vector()
    moved = rotated(p, 1.0)
    moved = PlanarConfig.from_points(moved.points * 7.0, p.masses)
    reflected = PlanarConfig.from_points(moved.points * [1, -1], p.masses)
    assert np.allclose(canonicalize(reflected).as_vector(), f0, atol=1e-10)


def test_canonicalize_separates_shapes(rng):
    p = random_convex_config(rng)
    pts = p.points.copy()
    pts[2] += [1e-3, -1e-3]
    q = PlanarConfig.from_points(pts, p.masses)
    gap = np.abs(canonicalize(p).as_vector() - canonicalize(q).as_vector())
    assert gap.max() > 1e-6


def test_congruent_examples(rng):
    p = random_convex_config(rng)
    assert congruent(p, rotated(p, 1.0))
    assert congruent(p, PlanarConfig.from_points(p.points * 7.0, p.masses))
    square = unit_square_config()
    rhombus = realize((3, 1, 1, 1, 1, 1.0), EQUAL)  # theta = pi/3 rhombus
    assert not congruent(square, rhombus)
