"""Planar configurations, oriented areas and the distance <-> point maps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .dziobek import MassVector, SquaredDistances, cayley
from .errors import Degenerate, NotConvex, NotPlanar, NotRealizable

COINCIDENCE_TOL = 1e-12
CENTROID_TOL = 1e-12
AREA_TOL = 1e-12
PLANARITY_TOL = 1e-8


class OrientedAreas(NamedTuple):
    """Signed areas of the four sub-triangles, convention (-, -, +, +)."""

    d1: float
    d2: float
    d3: float
    d4: float


@dataclass(frozen=True)
class PlanarConfig:
    """Four labeled points with the weighted centroid at the origin."""

    points: np.ndarray  # shape (4, 2)
    masses: MassVector

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (4, 2):
            raise ValueError(f"points must have shape (4, 2), got {pts.shape}")
        object.__setattr__(self, "points", pts)
        scale = self.scale
        w = np.asarray(self.masses.masses)
        com = (w[:, None] * pts).sum(axis=0) / w.sum()
        if np.linalg.norm(com) > CENTROID_TOL * max(scale, 1e-300):
            raise ValueError("weighted centroid is not at the origin")
        for i in range(4):
            for j in range(i + 1, 4):
                if np.linalg.norm(pts[i] - pts[j]) <= COINCIDENCE_TOL * scale:
                    raise ValueError(f"points {i + 1} and {j + 1} coincide")

    @classmethod
    def from_points(cls, points, masses: MassVector) -> "PlanarConfig":
        """Translate arbitrary points to the weighted centroid frame."""
        pts = np.asarray(points, dtype=float).reshape(4, 2)
        w = np.asarray(masses.masses)
        com = (w[:, None] * pts).sum(axis=0) / w.sum()
        return cls(points=pts - com, masses=masses)

    @property
    def scale(self) -> float:
        """RMS mutual distance."""
        pts = np.asarray(self.points, dtype=float)
        sq = [float(np.sum((pts[i] - pts[j]) ** 2))
              for i in range(4) for j in range(i + 1, 4)]
        return math.sqrt(sum(sq) / 6.0)

    def moment_of_inertia(self) -> float:
        """I = (1/m') sum m_i m_j r_ij^2 = sum m_i |q_i|^2 (centroid at 0)."""
        w = np.asarray(self.masses.masses)
        return float((w * (self.points ** 2).sum(axis=1)).sum())

    def to_json_dict(self) -> dict:
        return {
            "masses": list(self.masses.masses),
            "points": [[float(x), float(y)] for x, y in self.points],
        }


def _signed_area(p, q, r) -> float:
    return 0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))


def _segments_cross(p1, p2, p3, p4) -> bool:
    """Strict proper intersection of open segments p1-p2 and p3-p4."""
    d1 = _signed_area(p3, p4, p1)
    d2 = _signed_area(p3, p4, p2)
    d3 = _signed_area(p1, p2, p3)
    d4 = _signed_area(p1, p2, p4)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def _check_convex(p: PlanarConfig) -> None:
    q = p.points
    if not _segments_cross(q[0], q[1], q[2], q[3]):
        raise NotConvex("diagonals q1-q2 and q3-q4 do not properly intersect")


def oriented_areas(p: PlanarConfig) -> OrientedAreas:
    """Signed sub-triangle areas with the convention (-, -, +, +).

    |Delta_i| is the area of the triangle on the three vertices other than i.
    """
    q = p.points
    scale_sq = p.scale ** 2
    mags = [
        abs(_signed_area(q[1], q[2], q[3])),
        abs(_signed_area(q[0], q[2], q[3])),
        abs(_signed_area(q[0], q[1], q[3])),
        abs(_signed_area(q[0], q[1], q[2])),
    ]
    if min(mags) < AREA_TOL * scale_sq:
        raise Degenerate("a sub-triangle has numerically zero area")
    _check_convex(p)
    return OrientedAreas(-mags[0], -mags[1], mags[2], mags[3])


def squared_distances(p: PlanarConfig) -> SquaredDistances:
    q = p.points
    def d2(i, j):
        return float(np.sum((q[i] - q[j]) ** 2))
    return SquaredDistances(a=d2(0, 1), b=d2(0, 2), c=d2(0, 3),
                            d=d2(1, 2), e=d2(1, 3), f=d2(2, 3))


def trilaterate(sq: Sequence[float]) -> np.ndarray:
    """Place q1 at the origin, q2 on the positive x-axis, q3 above and q4
    below the axis, from the squared distances alone (f is not used).

    Raises NotRealizable when a face triangle inequality fails.
    """
    a, b, c, d, e, f = sq
    if min(a, b, c, d, e, f) <= 0:
        raise NotRealizable("squared distances must be positive")
    r12 = math.sqrt(a)
    x3 = (a + b - d) / (2.0 * r12)
    y3_sq = b - x3 * x3
    x4 = (a + c - e) / (2.0 * r12)
    y4_sq = c - x4 * x4
    if y3_sq <= 0 or y4_sq <= 0:
        raise NotRealizable("a face triangle inequality is violated")
    return np.array([
        [0.0, 0.0],
        [r12, 0.0],
        [x3, math.sqrt(y3_sq)],
        [x4, -math.sqrt(y4_sq)],
    ])


def realize(sq: Sequence[float], m: MassVector) -> PlanarConfig:
    """Inverse of squared_distances, up to congruence.

    Checks planarity via the Cayley determinant before trilaterating, and
    recenters on the weighted centroid.
    """
    sqt = SquaredDistances(*sq)
    scale_sq = sqt.scale_sq
    s_val = cayley(sqt)
    if abs(s_val) > PLANARITY_TOL * scale_sq ** 2:
        raise NotPlanar(f"Cayley determinant {s_val:.3e} exceeds tolerance")
    pts = trilaterate(sqt)
    return PlanarConfig.from_points(pts, m)


@dataclass(frozen=True)
class CanonicalFrame:
    """Representative of a configuration modulo rotation, translation,
    reflection and dilation.

    The diagonal q1-q2 lies on the x-axis with the diagonal crossing at the
    origin and q1 on the negative side; q3 sits in the upper half-plane at
    angle theta; the scale is fixed by moment of inertia I = 1.
    """

    u: float
    v: float
    t: float
    s: float
    theta: float

    def __post_init__(self):
        if min(self.u, self.v, self.t, self.s) <= 0:
            raise ValueError("frame radii must be positive")
        if not 0.0 < self.theta < math.pi:
            raise ValueError("theta must lie in (0, pi)")

    def as_vector(self) -> np.ndarray:
        return np.array([self.u, self.v, self.t, self.s, self.theta])

    def raw_points(self) -> np.ndarray:
        ct, st_ = math.cos(self.theta), math.sin(self.theta)
        return np.array([
            [-self.u, 0.0],
            [self.v, 0.0],
            [self.t * ct, self.t * st_],
            [-self.s * ct, -self.s * st_],
        ])

    def reconstruct(self, m: MassVector) -> PlanarConfig:
        return PlanarConfig.from_points(self.raw_points(), m)

    def rescaled_to_unit_inertia(self, m: MassVector) -> "CanonicalFrame":
        inertia = self.reconstruct(m).moment_of_inertia()
        k = 1.0 / math.sqrt(inertia)
        return CanonicalFrame(u=self.u * k, v=self.v * k, t=self.t * k,
                              s=self.s * k, theta=self.theta)

    def to_json_dict(self) -> dict:
        return {"u": self.u, "v": self.v, "t": self.t, "s": self.s,
                "theta": self.theta}


def canonicalize(p: PlanarConfig) -> CanonicalFrame:
    """Map a convex configuration (1, 2 opposite) to its canonical frame."""
    _check_convex(p)
    q = p.points
    # diagonal crossing: q1 + lam (q2 - q1) on segment q3-q4
    d12 = q[1] - q[0]
    d34 = q[3] - q[2]
    denom = d12[0] * d34[1] - d12[1] * d34[0]
    rhs = q[2] - q[0]
    lam = (rhs[0] * d34[1] - rhs[1] * d34[0]) / denom
    cross = q[0] + lam * d12
    shifted = q - cross
    # rotate q1-q2 onto the x-axis, q1 negative side
    phi = math.atan2(shifted[1][1], shifted[1][0])
    rot = np.array([[math.cos(-phi), -math.sin(-phi)],
                    [math.sin(-phi), math.cos(-phi)]])
    aligned = shifted @ rot.T
    if aligned[2][1] < 0:  # reflect so q3 is in the upper half-plane
        aligned[:, 1] = -aligned[:, 1]
    frame = CanonicalFrame(
        u=float(-aligned[0][0]),
        v=float(aligned[1][0]),
        t=float(np.hypot(*aligned[2])),
        s=float(np.hypot(*aligned[3])),
        theta=float(math.atan2(aligned[2][1], aligned[2][0])),
    )
    return frame.rescaled_to_unit_inertia(p.masses)


def congruent(p1: PlanarConfig, p2: PlanarConfig, tol: float = 1e-8) -> bool:
    """True iff the canonical frames agree componentwise within tol."""
    f1 = canonicalize(p1).as_vector()
    f2 = canonicalize(p2).as_vector()
    return bool(np.all(np.abs(f1 - f2) <= tol))
