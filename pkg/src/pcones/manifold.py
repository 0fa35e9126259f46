"""Pointwise differential geometry of the cone boundary.

Away from the apex, the boundary of K_p^{n+1} is the graph
M_p = {(||x||_p, x) : x != 0}.  The graph chart gives tangent bases,
unit normals, and the map induced on R^n by a linear map carrying one
boundary onto another.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autgroup import LinearMap, StructuredAutomorphism, apply
from .errors import DimensionMismatchError, NotOnTargetGraphError, UnsupportedExponentError, ZeroVectorError
from .pnorm import Exponent, as_exponent, gradient, norm

__all__ = [
    "GraphChart",
    "TangentBasis",
    "tangent_basis",
    "lambda_vector",
    "gauss_normal",
    "graph_normal",
    "boundary_map",
    "locus_membership",
]


@dataclass(frozen=True)
class GraphChart:
    """Graph chart of the p-cone boundary over R^n minus the origin.

    Any exponent is accepted so the chart can serve as the target of
    :func:`boundary_map`; derivative-based operations need finite p > 1.
    """

    exponent: Exponent
    n: int

    def __post_init__(self):
        object.__setattr__(self, "exponent", as_exponent(self.exponent))

    def lift(self, x) -> np.ndarray:
        """Inverse chart x -> (||x||_p, x)."""
        x = self._vec(x)
        return np.r_[norm(x, self.exponent), x]

    def _vec(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatchError(f"chart over R^{self.n} got a vector of shape {x.shape}")
        if not np.any(x):
            raise ZeroVectorError("the apex is not on the smooth boundary")
        return x

    def _grad(self, x):
        if not self.exponent.is_smooth_range:
            raise UnsupportedExponentError(f"p = {self.exponent} has no C^1 graph chart")
        return gradient(x, self.exponent)


@dataclass(frozen=True)
class TangentBasis:
    base_point: np.ndarray
    vectors: np.ndarray  # row i is (d f / d x_i, e_i)


def tangent_basis(chart: GraphChart, x) -> TangentBasis:
    x = chart._vec(x)
    g = chart._grad(x)
    vecs = np.hstack([g[:, None], np.eye(chart.n)])
    return TangentBasis(chart.lift(x), vecs)


def lambda_vector(vectors) -> np.ndarray:
    """The vector L with <L, y> = det(x^1, ..., x^(n-1), y) for all y.

    Built by cofactor expansion along the last column; it vanishes
    exactly when the inputs are linearly dependent.
    """
    X = np.asarray(vectors, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1] - 1:
        raise DimensionMismatchError(f"need n-1 vectors of length n, got shape {X.shape}")
    n = X.shape[1]
    cols = X.T
    out = np.empty(n)
    for k in range(n):
        minor = np.delete(cols, k, axis=0)
        out[k] = (-1.0) ** (k + n - 1) * (np.linalg.det(minor) if n > 1 else 1.0)
    return out


def gauss_normal(chart: GraphChart, x) -> np.ndarray:
    """Unit normal at (||x||_p, x), oriented with positive t-component."""
    basis = tangent_basis(chart, x)
    lam = lambda_vector(basis.vectors)
    nvec = lam / np.linalg.norm(lam)
    # the t-component never vanishes: no tangent vector is vertical
    return nvec if nvec[0] > 0 else -nvec


def graph_normal(chart: GraphChart, x) -> np.ndarray:
    """Closed-form graph normal (1, -grad f) / ||(1, -grad f)||."""
    x = chart._vec(x)
    v = np.r_[1.0, -chart._grad(x)]
    return v / np.linalg.norm(v)


def boundary_map(A, frm: GraphChart, to: GraphChart, x, tol: float = 1e-8) -> np.ndarray:
    """Tail of ``A (||x||_p, x)``, checked to lie on the target graph.

    Raises:
        NotOnTargetGraphError: the image's t-coordinate differs from the
            q-norm of its tail by more than ``tol * (1 + |image|)``.
    """
    z = frm.lift(x)
    if isinstance(A, StructuredAutomorphism):
        img = apply(A, z)
    else:
        m = A.matrix if isinstance(A, LinearMap) else np.asarray(A, dtype=float)
        if m.shape != (frm.n + 1, to.n + 1):
            raise DimensionMismatchError(f"map of shape {m.shape} between charts over R^{frm.n} and R^{to.n}")
        img = m @ z
    gap = abs(img[0] - norm(img[1:], to.exponent))
    if gap > tol * (1.0 + np.linalg.norm(img)):
        raise NotOnTargetGraphError(f"image t={img[0]:.6g} is off the target graph by {gap:.3g}")
    return img[1:]


def locus_membership(x, tol: float = 1e-12) -> frozenset:
    """Indices i with |x_i| <= tol: the strata of the non-C^2 locus
    containing x."""
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ZeroVectorError("the locus excludes the origin")
    return frozenset(np.flatnonzero(np.abs(x) <= tol).tolist())
