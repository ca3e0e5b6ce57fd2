"""Global search for convex central configurations at fixed masses.

Seeds a deterministic lattice over canonical frames, polishes every seed
with the damped-Newton core, then groups the converged states into
congruence classes and labels their symmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dziobek import DziobekState, MassVector
from .geometry import CanonicalFrame, canonicalize, realize
from .solver import (CONVERGED, SolveOptions, _batch_geometry,
                     _lsq_multipliers, _newton_batch, _residual_factory,
                     _state_from_vector)

DEDUPE_TOL = 1e-6
SEED_AREA_MARGIN = 1e-3
CLASSIFY_TOL = 1e-6


@dataclass(frozen=True)
class SymmetryLabel:
    """One of square, rhombus, kite_axis_34, kite_axis_12, asymmetric."""

    label: str
    tol: float

    def __str__(self) -> str:  # pragma: no cover
        return self.label


def classify_symmetry(st: DziobekState,
                      tol: float = CLASSIFY_TOL) -> SymmetryLabel:
    """Distance-equality classification on scale-normalized distances.

    square dominates rhombus dominates kite dominates asymmetric.
    """
    r = np.sqrt(np.asarray(st.sq, dtype=float))
    scale = float(np.sqrt(np.mean(st.sq)))
    ra, rb, rc, rd, re, rf = r
    eq = lambda x, y: abs(x - y) < tol * scale
    sides_equal = eq(rb, rc) and eq(rb, rd) and eq(rb, re) and eq(rc, rd)
    if sides_equal and eq(ra, rf):
        return SymmetryLabel("square", tol)
    if sides_equal:
        return SymmetryLabel("rhombus", tol)
    if eq(rb, rd) and eq(rc, re):
        return SymmetryLabel("kite_axis_34", tol)
    if eq(rb, rc) and eq(rd, re):
        return SymmetryLabel("kite_axis_12", tol)
    return SymmetryLabel("asymmetric", tol)


def seed_grid(resolution: int,
              m: MassVector | None = None) -> list[CanonicalFrame]:
    """Deterministic lattice over the convex canonical-frame moduli.

    u is gauge-fixed to 1 before the inertia normalization; the remaining
    four parameters (v, t, s, theta) each take `resolution` values.  Frames
    whose smallest sub-triangle area falls below the degeneracy margin are
    dropped.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if m is None:
        m = MassVector(alpha=1.0, beta=1.0)
    v_vals = np.geomspace(0.5, 2.0, resolution)
    t_vals = np.geomspace(0.35, 2.8, resolution)
    s_vals = np.geomspace(0.35, 2.8, resolution)
    th_vals = np.linspace(0.3 * math.pi, 0.7 * math.pi, resolution)
    frames = []
    for v in v_vals:
        for t in t_vals:
            for s in s_vals:
                for th in th_vals:
                    frame = CanonicalFrame(u=1.0, v=float(v), t=float(t),
                                           s=float(s), theta=float(th))
                    pts = frame.raw_points()
                    scale_sq = sum(
                        float(np.sum((pts[i] - pts[j]) ** 2))
                        for i in range(4) for j in range(i + 1, 4)) / 6.0
                    min_area = min(
                        _triangle_area(pts, i) for i in range(4))
                    if min_area < SEED_AREA_MARGIN * scale_sq:
                        continue
                    frames.append(frame.rescaled_to_unit_inertia(m))
    return frames


def _triangle_area(pts: np.ndarray, omit: int) -> float:
    keep = [i for i in range(4) if i != omit]
    p, q, r = pts[keep]
    return 0.5 * abs((q[0] - p[0]) * (r[1] - p[1])
                     - (q[1] - p[1]) * (r[0] - p[0]))


@dataclass(frozen=True)
class CensusClass:
    frame: CanonicalFrame
    state: DziobekState
    symmetry: SymmetryLabel
    basin: int

    def to_json_dict(self) -> dict:
        return {
            "frame": self.frame.to_json_dict(),
            "state": self.state.to_json_dict(),
            "symmetry": self.symmetry.label,
            "basin": self.basin,
        }


@dataclass(frozen=True)
class CensusReport:
    masses: MassVector
    classes: list[CensusClass]
    seeds_total: int
    seeds_converged: int

    @property
    def outside_theorem_hypothesis(self) -> bool:
        return min(self.masses.alpha, self.masses.beta) > self.masses.delta

    def to_json_dict(self) -> dict:
        return {
            "masses": list(self.masses.masses),
            "classes": [c.to_json_dict() for c in self.classes],
            "seeds_total": self.seeds_total,
            "seeds_converged": self.seeds_converged,
            "outside_theorem_hypothesis": self.outside_theorem_hypothesis,
        }


def _seed_vectors(frames: Sequence[CanonicalFrame],
                  m: MassVector) -> np.ndarray:
    from .geometry import squared_distances

    sq = np.array([squared_distances(f.reconstruct(m))
                   for f in frames], dtype=float)
    _, areas = _batch_geometry(sq)
    nu_xi = _lsq_multipliers(sq, areas, m)
    return np.concatenate([sq, nu_xi], axis=1)


def census(m: MassVector, resolution: int = 8,
           opts: SolveOptions = SolveOptions(),
           threads: int = 1) -> CensusReport:
    """Polish every seed, keep converged convex states with nu > 0, and
    group them by canonical-frame distance (dedupe tolerance 1e-6)."""
    frames = seed_grid(resolution, m)
    x0 = _seed_vectors(frames, m)
    fun = _residual_factory(m, opts.normalization)
    if threads > 1 and x0.shape[0] > threads:
        from concurrent.futures import ThreadPoolExecutor

        chunks = np.array_split(np.arange(x0.shape[0]), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(
                lambda idx: _newton_batch(fun, x0[idx], opts), chunks))
        x = np.concatenate([p[0] for p in parts])
        status = np.concatenate([p[1] for p in parts])
    else:
        x, status, _, _ = _newton_batch(fun, x0, opts)

    converged = np.flatnonzero(status == CONVERGED)
    reps: list[tuple[np.ndarray, CanonicalFrame, DziobekState, int]] = []
    n_converged = 0
    for i in converged:
        if x[i, 6] <= 0:  # nu must be positive at a genuine c.c.
            continue
        try:
            state = _state_from_vector(x[i], m)
            frame = canonicalize(realize(state.sq, m))
        except Exception:
            continue
        n_converged += 1
        vec = frame.as_vector()
        for k, (rvec, rframe, rstate, count) in enumerate(reps):
            if np.linalg.norm(vec - rvec) < DEDUPE_TOL:
                reps[k] = (rvec, rframe, rstate, count + 1)
                break
        else:
            reps.append((vec, frame, state, 1))

    classes = [CensusClass(frame=fr, state=st,
                           symmetry=classify_symmetry(st), basin=count)
               for _, fr, st, count in reps]
    classes.sort(key=lambda c: -c.basin)
    return CensusReport(masses=m, classes=classes,
                        seeds_total=len(frames),
                        seeds_converged=n_converged)
