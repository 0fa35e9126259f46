"""The p-cone K_p^{n+1} = {(t, x) : t >= ||x||_p} as a computational object.

Points are plain float arrays ``[t, x_1, ..., x_n]``; stacks of points
are arrays of shape ``(m, n + 1)``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionMismatchError, NotPolyhedralError, PConeError
from .pnorm import Exponent, as_exponent, conjugate, norm

__all__ = [
    "ConeSpec",
    "Membership",
    "as_cone",
    "contains",
    "membership_gap",
    "default_tol",
    "dual",
    "extreme_rays",
    "sample_boundary",
    "project",
    "project_many",
]


@dataclass(frozen=True)
class ConeSpec:
    """K_p^{dim}; ``dim`` is the ambient dimension n + 1."""

    exponent: Exponent
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "exponent", as_exponent(self.exponent))
        if int(self.dim) != self.dim or self.dim < 2:
            raise PConeError(f"ambient dimension must be an integer >= 2, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def n(self) -> int:
        return self.dim - 1

    @property
    def p(self) -> float:
        return self.exponent.value

    def dual(self) -> "ConeSpec":
        return dual(self)

    def to_json(self) -> dict:
        return {"p": self.exponent.to_json(), "dim": self.dim}

    @classmethod
    def from_json(cls, obj) -> "ConeSpec":
        return cls(Exponent.parse(obj["p"]), int(obj["dim"]))

    def __str__(self):
        return f"K_{self.exponent}^{self.dim}"


def as_cone(p, dim=None) -> ConeSpec:
    if isinstance(p, ConeSpec):
        return p
    return ConeSpec(as_exponent(p), dim)


class Membership(enum.Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


def _points(spec, z):
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != spec.dim:
        raise DimensionMismatchError(f"{spec} expects points of length {spec.dim}, got {z.shape[-1]}")
    return z


def default_tol(z) -> float:
    return 1e-9 * (1.0 + float(np.linalg.norm(z)))


def membership_gap(spec: ConeSpec, z) -> np.ndarray:
    """``t - ||x||_p`` for one point or a stack of points."""
    z = _points(spec, z)
    return z[..., 0] - norm(z[..., 1:], spec.exponent)


def contains(spec: ConeSpec, z, tol=None) -> Membership:
    z = _points(spec, z)
    if tol is None:
        tol = default_tol(z)
    if tol < 0:
        raise PConeError("tolerance must be non-negative")
    gap = float(membership_gap(spec, z))
    if gap > tol:
        return Membership.INTERIOR
    if gap >= -tol:
        return Membership.BOUNDARY
    return Membership.OUTSIDE


def dual(spec: ConeSpec) -> ConeSpec:
    """Dual under the Euclidean inner product: K_p* = K_q."""
    return ConeSpec(conjugate(spec.exponent), spec.dim)


def extreme_rays(spec: ConeSpec) -> np.ndarray:
    """Unit generators of the extreme rays of K_1 or K_inf.

    Rows come in a fixed order: for p = 1 the rays (1, +e_1), (1, -e_1),
    (1, +e_2), ...; for p = inf the sign vectors in lexicographic order
    with +1 before -1.
    """
    e, n = spec.exponent, spec.n
    if e.value == 1.0:
        rows = []
        for i in range(n):
            for s in (1.0, -1.0):
                r = np.zeros(n + 1)
                r[0] = 1.0
                r[1 + i] = s
                rows.append(r)
    elif e.is_infinite:
        rows = [np.array((1.0,) + signs) for signs in itertools.product((1.0, -1.0), repeat=n)]
    else:
        raise NotPolyhedralError(f"{spec} is not polyhedral; only p in {{1, inf}} has finitely many extreme rays")
    rays = np.array(rows)
    return rays / np.linalg.norm(rays, axis=1, keepdims=True)


def sample_boundary(spec: ConeSpec, count: int, seed: int, smooth: bool = False) -> np.ndarray:
    """Points ``(||x||_p, x)`` with x uniform on the Euclidean unit sphere.

    With ``smooth=True`` directions having a coordinate below 1e-12 in
    magnitude are redrawn, so every sample avoids the coordinate
    hyperplanes.
    """
    if count < 1:
        raise PConeError("count must be >= 1")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((count, spec.n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    if smooth:
        bad = np.any(np.abs(x) < 1e-12, axis=1)
        while bad.any():
            fresh = rng.standard_normal((int(bad.sum()), spec.n))
            x[bad] = fresh / np.linalg.norm(fresh, axis=1, keepdims=True)
            bad = np.any(np.abs(x) < 1e-12, axis=1)
    return np.column_stack([norm(x, spec.exponent), x])


# --- Euclidean projection -------------------------------------------------


def _project_l1(t0, b):
    """Project rows (t0, b) with b >= 0 onto K_1, assuming neither z in K_1
    nor -z in K_inf.  Returns (t, a)."""
    srt = -np.sort(-b, axis=1)
    k = np.arange(1, b.shape[1] + 1)
    lam_k = (np.cumsum(srt, axis=1) - t0[:, None]) / (k + 1)
    active = srt > lam_k
    # the active set is a prefix; its length picks the multiplier
    kstar = active.sum(axis=1)
    lam = np.take_along_axis(lam_k, np.maximum(kstar - 1, 0)[:, None], axis=1)[:, 0]
    lam = np.where(kstar == 0, -t0, lam)
    a = np.maximum(b - lam[:, None], 0.0)
    return t0 + lam, a


def _solve_coords(c, b, pv, tol=1e-15, maxiter=100):
    """Solve ``a + c a^(p-1) = b`` for a in [0, b], elementwise."""
    lo = np.zeros_like(b)
    hi = b.copy()
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.minimum(b, (b / c) ** (1.0 / (pv - 1.0)))
    a = np.where(np.isfinite(a), a, b)
    for _ in range(maxiter):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            ap = a ** (pv - 1.0)
            h = a + c * ap - b
            dh = 1.0 + c * (pv - 1.0) * a ** (pv - 2.0)
        lo = np.where(h < 0, a, lo)
        hi = np.where(h > 0, a, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = h / dh
        cand = a - step
        ok = np.isfinite(cand) & (cand > lo) & (cand < hi)
        new = np.where(ok, cand, 0.5 * (lo + hi))
        done = np.abs(new - a) <= tol * np.maximum(b, 1e-300)
        a = np.where(b > 0, new, 0.0)
        if np.all(done | (b == 0)):
            break
    return a


def _g_and_slope(u, t0, b, pv):
    """Residual of the cone KKT condition in terms of log-multiplier u,
    together with its derivative in u."""
    c = np.exp(u)
    a = _solve_coords(c[:, None], b, pv)
    r = norm(a, pv)
    rs = np.where(r > 0, r, 1.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ap1 = a ** (pv - 1.0)
        da = -ap1 / (1.0 + c[:, None] * (pv - 1.0) * a ** (pv - 2.0))
    da = np.where(a > 0, da, 0.0)
    # a non-finite slope only disables the Newton step (bisection takes over)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        dr = (ap1 * da).sum(axis=1) / rs ** (pv - 1.0)
        g = t0 + c * rs ** (pv - 1.0) - r
        dg_dc = rs ** (pv - 1.0) + c * (pv - 1.0) * rs ** (pv - 2.0) * dr - dr
    return g, c * dg_dc, a


def _project_smooth(t0, b, pv, tol, maxiter):
    """Safeguarded Newton on the log of the multiplier for finite p > 1."""
    b_all = b
    m = t0.shape[0]
    lo = np.full(m, -40.0)
    hi = np.full(m, 40.0)
    glo, _, _ = _g_and_slope(lo, t0, b, pv)
    ghi, _, _ = _g_and_slope(hi, t0, b, pv)
    for _ in range(4):
        bad_lo, bad_hi = glo > 0, ghi < 0
        if not (bad_lo.any() or bad_hi.any()):
            break
        lo = np.where(bad_lo, lo - 40.0, lo)
        hi = np.where(bad_hi, hi + 40.0, hi)
        glo, _, _ = _g_and_slope(lo, t0, b, pv)
        ghi, _, _ = _g_and_slope(hi, t0, b, pv)
    # no sign change: the point sits on K or on -K* up to rounding
    inside = glo >= 0
    polar = ~inside & (ghi <= 0)
    live = ~(inside | polar)
    t0, b, lo, hi = t0[live], b[live], lo[live], hi[live]
    a_out = np.zeros((m, b.shape[1]))
    a_out[inside] = b_all[inside]
    u = 0.5 * (lo + hi)
    for it in range(1, maxiter + 1):
        g, dg, a = _g_and_slope(u, t0, b, pv)
        if np.all(np.abs(g) <= tol):
            a_out[live] = a
            return a_out, it
        lo = np.where(g < 0, u, lo)
        hi = np.where(g > 0, u, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = u - g / dg
        ok = np.isfinite(cand) & (cand > lo) & (cand < hi)
        u_new = np.where(ok, cand, 0.5 * (lo + hi))
        u = np.where(np.abs(g) <= tol, u, u_new)
    g, _, a = _g_and_slope(u, t0, b, pv)
    if np.all(np.abs(g) <= tol):
        a_out[live] = a
        return a_out, maxiter
    raise ConvergenceError(
        f"cone projection did not converge in {maxiter} iterations",
        {"iterations": maxiter, "max_residual": float(np.max(np.abs(g))), "p": pv},
    )


def project_many(spec: ConeSpec, Z, tol: float = 1e-12, maxiter: int = 200):
    """Euclidean projections of a stack of points onto K_p.

    Returns ``(P, Q)`` with ``P`` the projections onto K_p and
    ``Q = Z - P``, the projections onto -K_q.
    """
    Z = _points(spec, np.atleast_2d(Z))
    e = spec.exponent
    if tol <= 0:
        raise PConeError("tolerance must be positive")
    if e.is_infinite:
        P1, _ = project_many(ConeSpec(Exponent(1.0), spec.dim), -Z, tol, maxiter)
        return Z + P1, -P1
    scale = np.linalg.norm(Z, axis=1)
    safe = np.where(scale > 0, scale, 1.0)
    Zn = Z / safe[:, None]
    t0, x0 = Zn[:, 0], Zn[:, 1:]
    b, sgn = np.abs(x0), np.sign(x0)
    q = conjugate(e)
    # decided on the raw point so exact boundary cases stay exact
    inside = Z[:, 0] >= norm(Z[:, 1:], e)
    polar = ~inside & (-Z[:, 0] >= norm(Z[:, 1:], q))
    work = ~(inside | polar)
    P = np.zeros_like(Zn)
    P[inside] = Zn[inside]
    if work.any():
        tw, bw = t0[work], b[work]
        if e.value == 1.0:
            _, a = _project_l1(tw, bw)
        else:
            a, _ = _project_smooth(tw, bw, e.value, tol, maxiter)
        P[work, 0] = norm(a, e)
        P[work, 1:] = sgn[work] * a
    P *= scale[:, None]
    return P, Z - P


def project(spec: ConeSpec, z, tol: float = 1e-12, maxiter: int = 200):
    """Moreau pair ``(pk, z - pk)`` for a single point."""
    P, Q = project_many(spec, np.asarray(z, dtype=float)[None, :], tol, maxiter)
    return P[0], Q[0]
