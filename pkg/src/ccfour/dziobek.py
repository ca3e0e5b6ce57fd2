"""Algebra of the planar four-body problem in squared-distance coordinates.

The six squared mutual distances (a, b, c, d, e, f) are the primary
variables.  Everything here is a pure function of those six numbers, the
oriented areas and the two multipliers (nu, xi); no geometry is realized
in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, TYPE_CHECKING

import numpy as np

from .errors import DomainError

if TYPE_CHECKING:  # pragma: no cover
    from .geometry import OrientedAreas


@dataclass(frozen=True)
class MassVector:
    """Masses (delta, delta, alpha, beta) with the equal pair at vertices 1, 2.

    The default normalization is delta = 1; mass-scaling transforms produce
    general delta.
    """

    alpha: float
    beta: float
    delta: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0 or self.delta <= 0:
            raise DomainError("masses must be strictly positive")

    @property
    def masses(self) -> tuple[float, float, float, float]:
        return (self.delta, self.delta, self.alpha, self.beta)

    @property
    def mprime(self) -> float:
        return 2.0 * self.delta + self.alpha + self.beta


class SquaredDistances(NamedTuple):
    """a=r12^2, b=r13^2, c=r14^2, d=r23^2, e=r24^2, f=r34^2."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)

    @property
    def scale_sq(self) -> float:
        """Mean squared distance; the natural area-like scale."""
        return sum(self) / 6.0


class PsiValues(NamedTuple):
    """psi'(s) evaluated at each of the six squared distances."""

    A: float
    B: float
    C: float
    D: float
    E: float
    F: float

    @classmethod
    def from_sq(cls, sq: Sequence[float]) -> "PsiValues":
        return cls(*(psi_prime(s) for s in sq))


# index pairs for (a, b, c, d, e, f), zero-based vertex labels
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


@dataclass(frozen=True)
class DziobekState:
    """Squared distances + oriented areas + the two multipliers."""

    sq: SquaredDistances
    areas: "OrientedAreas"
    nu: float
    xi: float

    @property
    def lambda_dz(self) -> float:
        return self.nu / 32.0

    def mu(self, m: MassVector) -> float:
        return self.xi * m.mprime

    def to_json_dict(self) -> dict:
        return {
            "sq": list(self.sq),
            "areas": list(self.areas),
            "nu": self.nu,
            "xi": self.xi,
        }


def psi(s: float) -> float:
    """s**(-1/2), the pair potential as a function of squared distance."""
    if s <= 0:
        raise DomainError(f"psi requires s > 0, got {s}")
    return s ** -0.5


def psi_prime(s: float) -> float:
    """Derivative of psi: -(1/2) s**(-3/2).  Negative, increasing, concave."""
    if s <= 0:
        raise DomainError(f"psi_prime requires s > 0, got {s}")
    return -0.5 * s ** -1.5


def _cayley_matrix_many(sq: np.ndarray) -> np.ndarray:
    n = sq.shape[0]
    M = np.zeros((n, 5, 5))
    M[:, 0, 1:] = 1.0
    M[:, 1:, 0] = 1.0
    a, b, c, d, e, f = (sq[:, k] for k in range(6))
    M[:, 1, 2] = M[:, 2, 1] = a
    M[:, 1, 3] = M[:, 3, 1] = b
    M[:, 1, 4] = M[:, 4, 1] = c
    M[:, 2, 3] = M[:, 3, 2] = d
    M[:, 2, 4] = M[:, 4, 2] = e
    M[:, 3, 4] = M[:, 4, 3] = f
    return M


def cayley_many(sq: np.ndarray) -> np.ndarray:
    """Vectorized Cayley determinant over rows of a (n, 6) array.

    Sign convention: dS/d(r_ij^2) = +32 Delta_i Delta_j with the oriented
    areas signed (-, -, +, +) on convex quadrilaterals; this is the negative
    of the symmetric bordered determinant, so S = -288 V^2 for tetrahedral
    distance sets.
    """
    sq = np.atleast_2d(np.asarray(sq, dtype=float))
    return -np.linalg.det(_cayley_matrix_many(sq))


def cayley(sq: Sequence[float]) -> float:
    """Cayley determinant S of the six squared distances; S=0 iff planar."""
    return float(cayley_many(np.asarray(sq, dtype=float)[None, :])[0])


def cayley_gradient(sq: Sequence[float], step_rel: float = 1e-6) -> np.ndarray:
    """Central finite differences of S with respect to (a, ..., f).

    Step is step_rel times the mean squared distance.  Raises NotPlanar when
    the input does not (numerically) embed in the plane, since the Dziobek
    identity dS/dr_ij^2 = 32 Delta_i Delta_j is only meaningful there.
    """
    from .errors import NotPlanar

    x = np.asarray(sq, dtype=float)
    scale_sq = float(np.mean(x))
    if abs(cayley(x)) > 1e-8 * scale_sq ** 2:
        raise NotPlanar("cayley_gradient requires planar squared distances")
    h = step_rel * scale_sq
    grad = np.empty(6)
    for k in range(6):
        up = x.copy()
        dn = x.copy()
        up[k] += h
        dn[k] -= h
        grad[k] = (cayley(up) - cayley(dn)) / (2.0 * h)
    return grad


def cc_residuals(st: DziobekState, m: MassVector) -> np.ndarray:
    """The six central-configuration equations, left minus right.

    Entry for pair (i, j):  psi'(r_ij^2) - nu * Delta_i Delta_j / (m_i m_j) - xi.
    """
    masses = m.masses
    areas = list(st.areas)
    res = np.empty(6)
    for k, (i, j) in enumerate(PAIRS):
        g = areas[i] * areas[j] / (masses[i] * masses[j])
        res[k] = psi_prime(st.sq[k]) - st.nu * g - st.xi
    return res


def t_values(sq: Sequence[float], areas: Iterable[float]) -> np.ndarray:
    """t_k = sum_i Delta_i r_ik^2 (with r_kk = 0); all equal at a c.c."""
    a, b, c, d, e, f = sq
    d1, d2, d3, d4 = areas
    return np.array([
        d2 * a + d3 * b + d4 * c,
        d1 * a + d3 * d + d4 * e,
        d1 * b + d2 * d + d4 * f,
        d1 * c + d2 * e + d3 * f,
    ])


def t_spread(sq: Sequence[float], areas: Iterable[float]) -> float:
    t = t_values(sq, areas)
    return float(t.max() - t.min())


def _det3(r1, r2, r3) -> float:
    return float(np.linalg.det(np.array([r1, r2, r3], dtype=float)))


def q_identity(i: int, j: int, k: int, t: Sequence[float],
               areas: Iterable[float], m: MassVector) -> float:
    """Determinant Q_ijk (1-based indices); zero whenever t_i = t_j = t_k."""
    idx = (i - 1, j - 1, k - 1)
    if len(set(idx)) != 3 or not all(0 <= p <= 3 for p in idx):
        raise IndexError(f"indices must be distinct and in 1..4: {(i, j, k)}")
    masses = m.masses
    ar = list(areas)
    return _det3(
        [1.0, 1.0, 1.0],
        [t[p] for p in idx],
        [ar[p] / masses[p] for p in idx],
    )


def q_residuals(t: Sequence[float], areas: Iterable[float],
                m: MassVector) -> np.ndarray:
    """The four determinants Q_234, Q_134, Q_124, Q_123."""
    ar = list(areas)
    return np.array([
        q_identity(2, 3, 4, t, ar, m),
        q_identity(1, 3, 4, t, ar, m),
        q_identity(1, 2, 4, t, ar, m),
        q_identity(1, 2, 3, t, ar, m),
    ])


def balanced_residuals(sq: Sequence[float], psiv: PsiValues, m: MassVector,
                       form: str = "expanded") -> np.ndarray:
    """Left minus right of the four balanced-configuration identities.

    form="expanded" is the determinant system as printed (with the corrected
    third-equation entry a-e-c); "appendix1" and "appendix2" are the two
    rewritten families.  All vanish at states with equal t_k.
    """
    a, b, c, d, e, f = sq
    A, B, C, D, E, F = psiv
    al, be = m.alpha / m.delta, m.beta / m.delta
    one = [1.0, 1.0, 1.0]

    if form == "expanded":
        return np.array([
            _det3(one, [f - e - d, al * (e - d - f), be * (d - f - e)], [F, E, D])
            - _det3(one, [a + f, b + e, c + d], [A, B, C]),
            _det3(one, [f - c - b, be * (b - f - c), al * (c - b - f)], [F, B, C])
            - _det3(one, [a + f, b + e, c + d], [A, E, D]),
            _det3(one, [be * (a - e - c), e - c - a, c - a - e], [A, E, C])
            - al * _det3(one, [a + f, b + e, c + d], [F, B, D]),
            _det3(one, [al * (a - d - b), b - a - d, d - b - a], [A, B, D])
            - be * _det3(one, [a + f, b + e, c + d], [F, E, C]),
        ])
    if form == "appendix1":
        return np.array([
            -(1 - al) * (f - e - d) * (D - E)
            + (be - al) * (d - f - e) * (F - E)
            + 2 * al * _det3(one, [f, e, d], [F, E, D])
            - _det3(one, [a, b, c], [A, B, C])
            - _det3(one, [f, e, d], [A, B, C]),
            -(1 - al) * (f - c - b) * (C - B)
            + (be - al) * (b - f - c) * (C - F)
            + 2 * al * _det3(one, [f, b, c], [F, B, C])
            - _det3(one, [a, e, d], [A, E, D])
            - _det3(one, [f, b, c], [A, E, D]),
            -(be - 1) * (a - e - c) * (C - E)
            + 2 * _det3(one, [a, e, c], [A, E, C])
            - al * _det3(one, [a, e, c], [F, B, D])
            - al * _det3(one, [f, b, d], [F, B, D]),
            -(al - 1) * (a - d - b) * (D - B)
            + 2 * _det3(one, [a, b, d], [A, B, D])
            - be * _det3(one, [f, e, c], [F, E, C])
            - be * _det3(one, [a, b, d], [F, E, C]),
        ])
    if form == "appendix2":
        return np.array([
            (1 + be) * _det3(one, [f, e, d], [F, E, D])
            - (1 - al) * (F * (d - e) + e * E - d * D)
            - (be - al) * (D * (e - f) + f * F - e * E)
            - _det3(one, [a, b, c], [A, B, C])
            - _det3(one, [f, e, d], [A, B, C]),
            (be + 1) * _det3(one, [f, b, c], [F, B, C])
            - (1 - al) * (F * (c - b) + b * B - c * C)
            - (be - al) * (B * (f - c) + c * C - f * F)
            - _det3(one, [a, e, d], [A, E, D])
            - _det3(one, [f, b, c], [A, E, D]),
            (be + 1) * _det3(one, [a, e, c], [A, E, C])
            - (be - 1) * (A * (c - e) + e * E - c * C)
            - al * _det3(one, [a, e, c], [F, B, D])
            - al * _det3(one, [f, b, d], [F, B, D]),
            (al + 1) * _det3(one, [a, b, d], [A, B, D])
            - (al - 1) * (A * (d - b) + b * B - d * D)
            - be * _det3(one, [f, e, c], [F, E, C])
            - be * _det3(one, [a, b, d], [F, E, C]),
        ])
    raise ValueError(f"unknown form {form!r}")


def eqconf3_printed_residual(sq: Sequence[float], psiv: PsiValues,
                             m: MassVector) -> float:
    """The third expanded identity with the entry exactly as printed (a-e-e).

    Kept for verbose cross-reporting against the corrected reading.
    """
    a, b, c, d, e, f = sq
    A, B, C, D, E, F = psiv
    al, be = m.alpha / m.delta, m.beta / m.delta
    one = [1.0, 1.0, 1.0]
    return (_det3(one, [be * (a - e - e), e - c - a, c - a - e], [A, E, C])
            - al * _det3(one, [a + f, b + e, c + d], [F, B, D]))


def sign_det(u: float, v: float, w: float,
             U: float, V: float, W: float) -> float:
    """det [[1,1,1],[u,v,w],[U,V,W]]: twice the oriented area of the triangle
    with vertices (u,U), (v,V), (w,W)."""
    return _det3([1.0, 1.0, 1.0], [u, v, w], [U, V, W])


def chord_value(u: float, w: float, U: float, W: float, v: float) -> float:
    """Value at v of the line through (u, U) and (w, W)."""
    return (v - w) / (u - w) * U + (u - v) / (u - w) * W


def dilate_state(st: DziobekState, k: float) -> DziobekState:
    """Dilate all lengths by k (masses fixed): sq, areas, nu, xi rescale so
    the central-configuration equations are preserved."""
    from .geometry import OrientedAreas

    if k <= 0:
        raise DomainError("dilation factor must be positive")
    sq = SquaredDistances(*(s * k * k for s in st.sq))
    areas = OrientedAreas(*(x * k * k for x in st.areas))
    return DziobekState(sq=sq, areas=areas, nu=st.nu * k ** -7,
                        xi=st.xi * k ** -3)


def scaling_transform(st: DziobekState, m: MassVector,
                      eta: float) -> tuple[DziobekState, MassVector]:
    """Simultaneous mass/length scaling that fixes the c.c. parameter lambda.

    Masses are divided by eta, squared distances multiplied by eta**(-2/3);
    nu and xi are recomputed so the residual equations transform covariantly.
    """
    from .geometry import OrientedAreas

    if eta <= 0:
        raise DomainError("eta must be positive")
    k2 = eta ** (-2.0 / 3.0)
    sq = SquaredDistances(*(s * k2 for s in st.sq))
    areas = OrientedAreas(*(x * k2 for x in st.areas))
    new_state = DziobekState(sq=sq, areas=areas,
                             nu=st.nu * eta ** (1.0 / 3.0),
                             xi=st.xi * eta)
    new_m = MassVector(alpha=m.alpha / eta, beta=m.beta / eta,
                       delta=m.delta / eta)
    return new_state, new_m


@dataclass(frozen=True)
class ResidualVector:
    """Stacked diagnostics: the six c.c. residuals, planarity and t-spread."""

    cc: np.ndarray
    planarity: float
    t_spread: float

    @classmethod
    def evaluate(cls, st: DziobekState, m: MassVector) -> "ResidualVector":
        return cls(cc=cc_residuals(st, m),
                   planarity=cayley(st.sq),
                   t_spread=t_spread(st.sq, st.areas))

    def to_json_dict(self) -> dict:
        return {
            "cc": [float(x) for x in self.cc],
            "planarity": self.planarity,
            "t_spread": self.t_spread,
        }
