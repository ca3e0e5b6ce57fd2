"""Newton solution of the Dziobek system and symmetry-reduced variants.

The damped-Newton core is vectorized over a batch of starting points so the
census grids run at numpy speed; the public solvers wrap batches of size 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .dziobek import (DziobekState, MassVector, SquaredDistances, cayley_many,
                      dilate_state, psi_prime, t_spread)
from .errors import (DomainError, LeftConvexRegion, NoConvergence,
                     SingularJacobian)
from .geometry import OrientedAreas, oriented_areas, realize

# batch status codes
RUNNING = 0
CONVERGED = 1
NO_CONVERGENCE = 2
LEFT_CONVEX = 3
SINGULAR = 4

_FD_STEP = 1e-7
_MAX_BACKTRACKS = 40


@dataclass(frozen=True)
class SolveOptions:
    max_iterations: int = 100
    residual_tol: float = 1e-12
    damping: float = 1.0
    normalization: str = "fix_inertia_one"

    def __post_init__(self):
        if self.residual_tol <= 0:
            raise ValueError("residual_tol must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")
        if self.normalization not in ("fix_inertia_one", "fix_a_one"):
            raise ValueError(f"unknown normalization {self.normalization!r}")


@dataclass(frozen=True)
class SolveReport:
    state: DziobekState
    iterations: int
    final_residual: float
    converged: bool
    symmetry: str

    def to_json_dict(self) -> dict:
        return {
            "state": self.state.to_json_dict(),
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "converged": self.converged,
            "symmetry": self.symmetry,
        }


def _batch_geometry(sq: np.ndarray):
    """Trilateration, convexity mask and oriented areas for (n, 6) inputs."""
    a, b, c, d, e, f = (sq[:, k] for k in range(6))
    valid = np.all(sq > 0, axis=1)
    with np.errstate(all="ignore"):
        r12 = np.sqrt(np.where(valid, a, 1.0))
        x3 = (a + b - d) / (2.0 * r12)
        y3_sq = b - x3 * x3
        x4 = (a + c - e) / (2.0 * r12)
        y4_sq = c - x4 * x4
        valid &= (y3_sq > 0) & (y4_sq > 0)
        y3 = np.sqrt(np.where(valid, y3_sq, 1.0))
        y4m = np.sqrt(np.where(valid, y4_sq, 1.0))
        # diagonal q3-q4 must cross the open segment q1-q2
        xc = x3 + (x4 - x3) * y3 / (y3 + y4m)
        valid &= (xc > 0) & (xc < r12)
        mag1 = 0.5 * np.abs((x3 - r12) * (-y4m) - y3 * (x4 - r12))
        mag2 = 0.5 * np.abs(x3 * (-y4m) - y3 * x4)
        mag3 = 0.5 * r12 * y4m
        mag4 = 0.5 * r12 * y3
    areas = np.stack([-mag1, -mag2, mag3, mag4], axis=1)
    return valid, areas


def _residual_factory(m: MassVector, normalization: str,
                      eq_indices: Sequence[int] | None = None,
                      embed: Callable[[np.ndarray], np.ndarray] | None = None):
    """Build fun(x) -> (residuals, valid) for the damped-Newton core.

    The unreduced unknown vector is (a, b, c, d, e, f, nu, xi); `embed` maps
    a reduced vector onto it and `eq_indices` selects the equations kept.
    """
    m1, m2, m3, m4 = m.masses
    mp = m.mprime
    inv_mm = np.array([1.0 / (m1 * m2), 1.0 / (m1 * m3), 1.0 / (m1 * m4),
                       1.0 / (m2 * m3), 1.0 / (m2 * m4), 1.0 / (m3 * m4)])
    w_inertia = np.array([m1 * m2, m1 * m3, m1 * m4,
                          m2 * m3, m2 * m4, m3 * m4]) / mp
    pair_idx = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    sel = None if eq_indices is None else np.asarray(eq_indices)

    def fun(x: np.ndarray):
        xf = x if embed is None else embed(x)
        sq = xf[:, :6]
        nu = xf[:, 6]
        xi = xf[:, 7]
        valid, areas = _batch_geometry(sq)
        with np.errstate(all="ignore"):
            psiv = -0.5 * np.where(sq > 0, sq, 1.0) ** -1.5
            res = np.empty((x.shape[0], 8))
            for k, (i, j) in enumerate(pair_idx):
                res[:, k] = (psiv[:, k]
                             - nu * inv_mm[k] * areas[:, i] * areas[:, j]
                             - xi)
            res[:, 6] = cayley_many(sq) / 32.0
            if normalization == "fix_inertia_one":
                res[:, 7] = sq @ w_inertia - 1.0
            else:
                res[:, 7] = sq[:, 0] - 1.0
        if sel is not None:
            res = res[:, sel]
        res[~valid] = np.nan
        return res, valid

    return fun


def _fd_jacobian(fun, x: np.ndarray) -> np.ndarray:
    n, k = x.shape
    jac = np.empty((n, k, k))
    for j in range(k):
        h = _FD_STEP * np.maximum(1.0, np.abs(x[:, j]))
        up = x.copy()
        dn = x.copy()
        up[:, j] += h
        dn[:, j] -= h
        f_up, _ = fun(up)
        f_dn, _ = fun(dn)
        jac[:, :, j] = (f_up - f_dn) / (2.0 * h)[:, None]
    return jac


def _solve_linear(jac: np.ndarray, rhs: np.ndarray):
    """Batched solve with per-item fallback; returns (dx, singular mask)."""
    n = jac.shape[0]
    singular = np.zeros(n, dtype=bool)
    dx = np.full_like(rhs, np.nan)
    finite = np.isfinite(jac).all(axis=(1, 2)) & np.isfinite(rhs).all(axis=1)
    singular |= ~finite
    idx = np.flatnonzero(finite)
    if idx.size:
        try:
            dx[idx] = np.linalg.solve(jac[idx], rhs[idx, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            for i in idx:
                try:
                    dx[i] = np.linalg.solve(jac[i], rhs[i])
                except np.linalg.LinAlgError:
                    singular[i] = True
    bad = ~np.isfinite(dx).all(axis=1)
    singular |= bad
    return dx, singular


def _newton_batch(fun, x0: np.ndarray, opts: SolveOptions):
    """Damped Newton with halving backtracking on the residual 2-norm.

    Returns (x, status, iterations, final inf-norm residual).
    """
    x = np.array(x0, dtype=float)
    n = x.shape[0]
    status = np.full(n, RUNNING, dtype=int)
    iters = np.zeros(n, dtype=int)

    res, valid = fun(x)
    status[~valid] = LEFT_CONVEX
    with np.errstate(all="ignore"):
        norm_inf = np.nanmax(np.abs(res), axis=1)
        norm2 = np.sqrt(np.nansum(res * res, axis=1))
    status[(status == RUNNING) & (norm_inf < opts.residual_tol)] = CONVERGED

    for it in range(1, opts.max_iterations + 1):
        act = np.flatnonzero(status == RUNNING)
        if act.size == 0:
            break
        xa = x[act]
        ra = res[act]
        jac = _fd_jacobian(fun, xa)
        dx, singular = _solve_linear(jac, -ra)
        status[act[singular]] = SINGULAR
        live = np.flatnonzero(~singular)
        if live.size == 0:
            continue
        ids = act[live]
        xl = xa[live]
        dxl = dx[live]
        base2 = norm2[ids]
        lam = np.full(live.size, opts.damping)
        accepted = np.zeros(live.size, dtype=bool)
        last_invalid = np.zeros(live.size, dtype=bool)
        for _ in range(_MAX_BACKTRACKS):
            rem = np.flatnonzero(~accepted)
            if rem.size == 0:
                break
            xt = xl[rem] + lam[rem, None] * dxl[rem]
            rt, vt = fun(xt)
            with np.errstate(all="ignore"):
                nt2 = np.sqrt(np.nansum(rt * rt, axis=1))
            ok = vt & (nt2 <= (1.0 - 1e-4 * lam[rem]) * base2[rem])
            take = rem[ok]
            if take.size:
                xl[take] = xt[ok]
                x[ids[take]] = xt[ok]
                res[ids[take]] = rt[ok]
                norm2[ids[take]] = nt2[ok]
                with np.errstate(all="ignore"):
                    norm_inf[ids[take]] = np.max(np.abs(rt[ok]), axis=1)
                accepted[take] = True
            fail = rem[~ok]
            lam[fail] *= 0.5
            last_invalid[fail] = ~vt[~ok]
        stuck = ~accepted
        status[ids[stuck & last_invalid]] = LEFT_CONVEX
        status[ids[stuck & ~last_invalid]] = NO_CONVERGENCE
        moved = ids[accepted]
        iters[moved] = it
        status[moved[norm_inf[moved] < opts.residual_tol]] = CONVERGED

    status[status == RUNNING] = NO_CONVERGENCE
    return x, status, iters, norm_inf


def _lsq_multipliers(sq: np.ndarray, areas: np.ndarray,
                     m: MassVector) -> np.ndarray:
    """Least-squares (nu, xi) from the six c.c. equations at fixed geometry."""
    m1, m2, m3, m4 = m.masses
    inv_mm = np.array([1.0 / (m1 * m2), 1.0 / (m1 * m3), 1.0 / (m1 * m4),
                       1.0 / (m2 * m3), 1.0 / (m2 * m4), 1.0 / (m3 * m4)])
    pair_idx = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    g = np.stack([inv_mm[k] * areas[:, i] * areas[:, j]
                  for k, (i, j) in enumerate(pair_idx)], axis=1)
    y = -0.5 * sq ** -1.5
    n = 6.0
    sg = g.sum(axis=1)
    sy = y.sum(axis=1)
    sgg = (g * g).sum(axis=1)
    sgy = (g * y).sum(axis=1)
    denom = n * sgg - sg * sg
    nu = np.where(np.abs(denom) > 0, (n * sgy - sg * sy) / denom, 0.0)
    xi = (sy - nu * sg) / n
    return np.stack([nu, xi], axis=1)


def _state_from_vector(xf: np.ndarray, m: MassVector) -> DziobekState:
    sq = SquaredDistances(*(float(v) for v in xf[:6]))
    config = realize(sq, m)
    areas = oriented_areas(config)
    return DziobekState(sq=sq, areas=areas, nu=float(xf[6]), xi=float(xf[7]))


def _classify(st: DziobekState) -> str:
    from .census import classify_symmetry

    return classify_symmetry(st).label


def _raise_for_status(code: int, norm: float, opts: SolveOptions):
    if code == LEFT_CONVEX:
        raise LeftConvexRegion("iterate left the convex region")
    if code == SINGULAR:
        raise SingularJacobian("Newton correction could not be computed")
    raise NoConvergence(
        f"residual {norm:.3e} after {opts.max_iterations} iterations "
        f"(tol {opts.residual_tol:.1e})")


def seed_state(sq: Sequence[float], m: MassVector) -> DziobekState:
    """Seed for newton_solve from squared distances alone.

    Unlike realized states this skips the planarity check (seeds are
    generally not planar in f); areas come from trilateration, which never
    uses f, and the multipliers from a least-squares fit.
    """
    x = seed_vector(sq, m)
    valid, areas = _batch_geometry(x[None, :6])
    if not valid[0]:
        raise LeftConvexRegion("seed does not trilaterate to a convex "
                               "quadrilateral")
    return DziobekState(sq=SquaredDistances(*(float(s) for s in x[:6])),
                        areas=OrientedAreas(*(float(v) for v in areas[0])),
                        nu=float(x[6]), xi=float(x[7]))


def seed_vector(sq: Sequence[float], m: MassVector) -> np.ndarray:
    """Full unknown vector (a..f, nu, xi) from squared distances alone."""
    sq_arr = np.asarray(sq, dtype=float)[None, :]
    _, areas = _batch_geometry(sq_arr)
    nu_xi = _lsq_multipliers(sq_arr, areas, m)
    return np.concatenate([sq_arr[0], nu_xi[0]])


def newton_solve(seed: DziobekState, m: MassVector,
                 opts: SolveOptions = SolveOptions()) -> SolveReport:
    """Damped Newton on (a..f, nu, xi) with the six c.c. equations, S = 0
    and the chosen normalization; areas recomputed from trilateration at
    every iterate."""
    fun = _residual_factory(m, opts.normalization)
    x0 = np.array([[*seed.sq, seed.nu, seed.xi]], dtype=float)
    x, status, iters, norm = _newton_batch(fun, x0, opts)
    if status[0] != CONVERGED:
        _raise_for_status(int(status[0]), float(norm[0]), opts)
    state = _state_from_vector(x[0], m)
    if state.nu <= 0:
        raise NoConvergence("converged to a state with nu <= 0 (not a c.c.)")
    return SolveReport(state=state, iterations=int(iters[0]),
                       final_residual=float(norm[0]), converged=True,
                       symmetry=_classify(state))


def _kite_embed(x: np.ndarray) -> np.ndarray:
    """(a, b, c, f, nu, xi) -> (a, b, c, d=b, e=c, f, nu, xi)."""
    return x[:, [0, 1, 2, 1, 2, 3, 4, 5]]


_KITE_EQS = (0, 1, 2, 5, 6, 7)  # cc12, cc13, cc14, cc34, S, normalization


def _kite_seed_vectors(m: MassVector) -> np.ndarray:
    """Deterministic family of symmetric seeds, inertia-normalized."""
    seeds = []
    for t in (0.6, 1.0, 1.6):
        for s in (0.6, 1.0, 1.6):
            u = 1.0
            sq = np.array([4 * u * u, u * u + t * t, u * u + s * s,
                           u * u + t * t, u * u + s * s, (t + s) ** 2])
            m1, m2, m3, m4 = m.masses
            w = np.array([m1 * m2, m1 * m3, m1 * m4,
                          m2 * m3, m2 * m4, m3 * m4]) / m.mprime
            sq = sq / float(sq @ w)
            seeds.append(seed_vector(sq, m)[[0, 1, 2, 5, 6, 7]])
    return np.array(seeds)


def solve_kite(m: MassVector,
               opts: SolveOptions = SolveOptions()) -> SolveReport:
    """Solve the kite-reduced system (b = d and c = e by construction)."""
    fun = _residual_factory(m, opts.normalization,
                            eq_indices=_KITE_EQS, embed=_kite_embed)
    seeds = _kite_seed_vectors(m)
    x, status, iters, norm = _newton_batch(fun, seeds, opts)
    for i in range(seeds.shape[0]):
        if status[i] != CONVERGED:
            continue
        state = _state_from_vector(_kite_embed(x[i:i + 1])[0], m)
        if state.nu <= 0:
            continue
        return SolveReport(state=state, iterations=int(iters[i]),
                           final_residual=float(norm[i]), converged=True,
                           symmetry=_classify(state))
    raise NoConvergence("no kite seed converged")


def rhombus_ratio(alpha: float) -> float:
    """Diagonal half-length ratio r/p of the rhombus solution, from a 1-D
    bracketing root-find on the combined residual.

    With q1 = (-p, 0), q2 = (p, 0), q3 = (0, r), q4 = (0, -r) and x = r/p,
    eliminating nu and xi from the three distinct equations leaves
    psi'(4) - psi'(1+x^2) = alpha [psi'(4 x^2) - psi'(1+x^2)].
    """
    if alpha <= 0:
        raise DomainError("alpha must be positive")

    def g(x):
        return (psi_prime(4.0) - psi_prime(1.0 + x * x)
                - alpha * (psi_prime(4.0 * x * x) - psi_prime(1.0 + x * x)))

    return float(brentq(g, 1e-6, 1e6, xtol=1e-15, rtol=8.9e-16))


def solve_rhombus(alpha: float,
                  opts: SolveOptions = SolveOptions()) -> SolveReport:
    """Rhombus ansatz b = c = d = e; independent of the Newton machinery."""
    x = rhombus_ratio(alpha)
    side = 1.0 + x * x
    sq = SquaredDistances(a=4.0, b=side, c=side, d=side, e=side,
                          f=4.0 * x * x)
    # Delta_1 Delta_2 = (p r)^2 = x^2 at p = 1
    nu = ((psi_prime(4.0) - psi_prime(side)) * alpha
          / (x * x * (alpha + 1.0)))
    xi = psi_prime(4.0) - nu * x * x
    areas = OrientedAreas(-x, -x, x, x)
    state = DziobekState(sq=sq, areas=areas, nu=nu, xi=xi)
    if opts.normalization == "fix_inertia_one":
        m = MassVector(alpha=alpha, beta=alpha)
        w = np.array([1.0, alpha, alpha, alpha, alpha,
                      alpha * alpha]) / m.mprime
        inertia = float(np.asarray(sq) @ w)
        state = dilate_state(state, 1.0 / math.sqrt(inertia))
    return SolveReport(state=state, iterations=0,
                       final_residual=0.0, converged=True,
                       symmetry=_classify(state))


@dataclass(frozen=True)
class SweepCell:
    alpha: float
    beta: float
    report: SolveReport | None
    error: str | None = None

    def to_row(self) -> dict:
        row = {"alpha": self.alpha, "beta": self.beta}
        if self.report is None:
            row.update({k: math.nan for k in
                        ("a", "b", "c", "d", "e", "f", "nu", "xi",
                         "lambda_cc")})
            row.update({"symmetry": "failed", "iterations": 0,
                        "residual": math.nan})
            return row
        st = self.report.state
        from .verifier import newtonian_oracle

        m = MassVector(alpha=self.alpha, beta=self.beta)
        lam_cc, _ = newtonian_oracle(realize(st.sq, m), m)
        row.update(dict(zip("abcdef", st.sq)))
        row.update({"nu": st.nu, "xi": st.xi, "lambda_cc": lam_cc,
                    "symmetry": self.report.symmetry,
                    "iterations": self.report.iterations,
                    "residual": self.report.final_residual})
        return row


def sweep(alpha_grid: Sequence[float], beta_grid: Sequence[float],
          opts: SolveOptions = SolveOptions()) -> list[SweepCell]:
    """Mass-parameter sweep with warm starts along each alpha row.

    Each cell is polished by the full (unreduced) Newton solve; failures are
    recorded per cell and do not abort the sweep.
    """
    if not len(alpha_grid) or not len(beta_grid):
        raise ValueError("grids must be non-empty")
    if min(alpha_grid) <= 0 or min(beta_grid) <= 0:
        raise DomainError("grid masses must be positive")
    cells: list[SweepCell] = []
    for alpha in alpha_grid:
        prev: DziobekState | None = None
        for beta in beta_grid:
            m = MassVector(alpha=float(alpha), beta=float(beta))
            try:
                if prev is None:
                    seed_state = solve_kite(m, opts).state
                    x0 = np.array([*seed_state.sq, seed_state.nu,
                                   seed_state.xi])
                else:
                    x0 = seed_vector(prev.sq, m)
                fun = _residual_factory(m, opts.normalization)
                x, status, iters, norm = _newton_batch(fun, x0[None, :], opts)
                if status[0] != CONVERGED:
                    _raise_for_status(int(status[0]), float(norm[0]), opts)
                state = _state_from_vector(x[0], m)
                report = SolveReport(state=state, iterations=int(iters[0]),
                                     final_residual=float(norm[0]),
                                     converged=True,
                                     symmetry=_classify(state))
                cells.append(SweepCell(float(alpha), float(beta), report))
                prev = state
            except (NoConvergence, LeftConvexRegion, SingularJacobian) as exc:
                cells.append(SweepCell(float(alpha), float(beta), None,
                                       error=str(exc)))
                prev = None
    return cells
