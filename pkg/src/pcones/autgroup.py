"""Automorphisms of p-cones.

For p != 2 every automorphism of K_p^{n+1} has the block form
``alpha * diag(1, P)`` with ``alpha > 0`` and ``P`` a signed permutation,
so membership is decided structurally.  For p = 2 the Lorentz-type test
``A^T J A = mu J`` is used instead.  A sampling oracle provides an
independent, one-sided check of both.

Index conventions are 0-based.  A generalized permutation acts by
``(P x)[i] = signs[i] * x[perm[i]]``, i.e. ``P[i, perm[i]] = signs[i]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .cone import ConeSpec, Membership, contains, membership_gap, sample_boundary
from .errors import (
    DimensionMismatchError,
    NotInteriorError,
    PConeError,
    SingularMapError,
    UnsupportedExponentError,
)

__all__ = [
    "GeneralizedPermutation",
    "StructuredAutomorphism",
    "LinearMap",
    "LorentzResult",
    "OracleResult",
    "Verdict",
    "apply",
    "is_structural_automorphism",
    "loewy_schneider",
    "sampling_oracle_automorphism",
    "random_automorphism",
    "homogeneity_probe",
]


@dataclass(frozen=True, eq=False)
class GeneralizedPermutation:
    perm: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=int)
        signs = np.asarray(self.signs, dtype=float)
        if perm.ndim != 1 or perm.shape != signs.shape:
            raise PConeError("perm and signs must be 1-D of equal length")
        if sorted(perm.tolist()) != list(range(perm.size)):
            raise PConeError(f"perm {perm.tolist()} is not a bijection of 0..{perm.size - 1}")
        if not np.all(np.abs(signs) == 1.0):
            raise PConeError("signs must be +1 or -1")
        perm.setflags(write=False)
        signs.setflags(write=False)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def identity(cls, n):
        return cls(np.arange(n), np.ones(n))

    @property
    def n(self):
        return self.perm.size

    def matrix(self):
        m = np.zeros((self.n, self.n))
        m[np.arange(self.n), self.perm] = self.signs
        return m

    def act(self, x):
        x = np.asarray(x, dtype=float)
        return self.signs * x[..., self.perm]

    def compose(self, other):
        """``self @ other``: apply ``other`` first."""
        return GeneralizedPermutation(other.perm[self.perm], self.signs * other.signs[self.perm])

    def inverse(self):
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.n)
        return GeneralizedPermutation(inv, self.signs[inv])

    def __eq__(self, other):
        return (
            isinstance(other, GeneralizedPermutation)
            and np.array_equal(self.perm, other.perm)
            and np.array_equal(self.signs, other.signs)
        )

    def __repr__(self):
        return f"GeneralizedPermutation(perm={self.perm.tolist()}, signs={self.signs.astype(int).tolist()})"


@dataclass(frozen=True, eq=False)
class StructuredAutomorphism:
    """The map ``alpha * diag(1, P)``."""

    alpha: float
    gp: GeneralizedPermutation

    def __post_init__(self):
        if not self.alpha > 0:
            raise PConeError(f"alpha must be positive, got {self.alpha!r}")
        object.__setattr__(self, "alpha", float(self.alpha))

    @classmethod
    def identity(cls, n):
        return cls(1.0, GeneralizedPermutation.identity(n))

    @property
    def dim(self):
        return self.gp.n + 1

    def matrix(self):
        m = np.zeros((self.dim, self.dim))
        m[0, 0] = 1.0
        m[1:, 1:] = self.gp.matrix()
        return self.alpha * m

    def as_linear_map(self):
        return LinearMap(self.matrix())

    def compose(self, other):
        return StructuredAutomorphism(self.alpha * other.alpha, self.gp.compose(other.gp))

    def inverse(self):
        return StructuredAutomorphism(1.0 / self.alpha, self.gp.inverse())

    def stratum_map(self):
        """Index map tau with ``x[j] == 0  <=>  (P x)[tau[j]] == 0``."""
        return self.gp.inverse().perm

    def to_json(self):
        return {"alpha": self.alpha, "perm": self.gp.perm.tolist(), "signs": self.gp.signs.astype(int).tolist()}

    @classmethod
    def from_json(cls, obj):
        return cls(float(obj["alpha"]), GeneralizedPermutation(obj["perm"], obj["signs"]))

    def __eq__(self, other):
        return isinstance(other, StructuredAutomorphism) and self.alpha == other.alpha and self.gp == other.gp

    def __repr__(self):
        return f"StructuredAutomorphism(alpha={self.alpha!r}, gp={self.gp!r})"


class LinearMap:
    """An invertible square matrix with a validated cached inverse."""

    def __init__(self, matrix):
        a = np.array(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatchError(f"linear map must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise PConeError("linear map has non-finite entries")
        cond = np.linalg.cond(a)
        if not np.isfinite(cond) or cond > 1e14:
            raise SingularMapError(f"matrix is singular or numerically singular (cond={cond:.3g})")
        inv = np.linalg.inv(a)
        resid = np.abs(a @ inv - np.eye(a.shape[0])).max()
        if resid >= 1e-10 * cond:
            raise SingularMapError(f"inverse failed validation (residual {resid:.3g}, cond {cond:.3g})")
        a.setflags(write=False)
        inv.setflags(write=False)
        self.matrix = a
        self.inverse = inv
        self.cond = float(cond)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def apply(self, z):
        return np.asarray(z, dtype=float) @ self.matrix.T

    def apply_inverse(self, z):
        return np.asarray(z, dtype=float) @ self.inverse.T

    def to_json(self):
        return self.matrix.tolist()

    @classmethod
    def from_json(cls, rows):
        return cls(np.array(rows, dtype=float))

    def __repr__(self):
        return f"LinearMap({self.matrix.tolist()!r})"


def _as_map(a):
    if isinstance(a, (LinearMap, StructuredAutomorphism)):
        return a
    return LinearMap(a)


def apply(a: Union[StructuredAutomorphism, LinearMap], z) -> np.ndarray:
    """Image of one point or a stack of points.

    Structured automorphisms act by index shuffling and sign flips only.
    """
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != a.dim:
        raise DimensionMismatchError(f"map acts on R^{a.dim}, point has length {z.shape[-1]}")
    if isinstance(a, StructuredAutomorphism):
        out = np.empty_like(z)
        out[..., 0] = a.alpha * z[..., 0]
        out[..., 1:] = a.alpha * a.gp.act(z[..., 1:])
        return out
    return a.apply(z)


def is_structural_automorphism(A, spec: ConeSpec, tol: float = 1e-12) -> Optional[StructuredAutomorphism]:
    """Decompose ``A = alpha * diag(1, P)`` or return None.

    For p != 2 and n >= 2 this is exactly membership in Aut(K_p).
    Entries are compared against the ideal pattern with tolerance
    ``tol * alpha``.
    """
    if spec.p == 2.0:
        raise UnsupportedExponentError("Aut(K_2) is not of block form; use loewy_schneider")
    m = A.matrix if isinstance(A, LinearMap) else np.asarray(A, dtype=float)
    if m.shape != (spec.dim, spec.dim):
        raise DimensionMismatchError(f"expected a {spec.dim}x{spec.dim} matrix, got {m.shape}")
    alpha = m[0, 0]
    if not alpha > 0:
        return None
    band = tol * alpha
    if np.abs(m[0, 1:]).max() > band or np.abs(m[1:, 0]).max() > band:
        return None
    block = m[1:, 1:] / alpha
    perm = np.argmax(np.abs(block), axis=1)
    n = spec.n
    if len(set(perm.tolist())) != n:
        return None
    signs = np.sign(block[np.arange(n), perm])
    ideal = np.zeros((n, n))
    ideal[np.arange(n), perm] = signs
    if np.abs(m[1:, 1:] - alpha * ideal).max() > band:
        return None
    return StructuredAutomorphism(alpha, GeneralizedPermutation(perm, signs))


@dataclass(frozen=True)
class LorentzResult:
    """``A^T J A = mu J``; ``preserves`` tells A K_2 = K_2 from A K_2 = -K_2."""

    mu: float
    preserves: bool


def loewy_schneider(A, tol: float = 1e-10) -> Optional[LorentzResult]:
    m = A.matrix if isinstance(A, LinearMap) else np.asarray(A, dtype=float)
    d = m.shape[0]
    J = np.diag(np.r_[1.0, -np.ones(d - 1)])
    G = m.T @ J @ m
    mu = G[0, 0]
    if not mu > 0:
        return None
    if np.abs(G - mu * J).max() > tol * mu:
        return None
    # A maps the main axis either into K_2 or into -K_2
    return LorentzResult(float(mu), bool(m[0, 0] > 0))


class Verdict(enum.Enum):
    PLAUSIBLE = "Plausible"
    REFUTED = "Refuted"


@dataclass(frozen=True)
class OracleResult:
    verdict: Verdict
    witness: Optional[np.ndarray] = None
    direction: Optional[str] = None

    @property
    def refuted(self):
        return self.verdict is Verdict.REFUTED


def sampling_oracle_automorphism(A, spec: ConeSpec, samples: int = 1000, seed: int = 0, tol: float = 1e-9) -> OracleResult:
    """One-sided test of ``A K = K`` on random boundary points.

    A point z is refuted when ``A z`` (or ``A^-1 z``) has
    ``t - ||x||_p < -tol * (1 + ||image||_2)``.  Plausible never means
    proven.
    """
    if samples < 1:
        raise PConeError("samples must be >= 1")
    a = _as_map(A)
    if a.dim != spec.dim:
        raise DimensionMismatchError(f"map acts on R^{a.dim}, cone lives in R^{spec.dim}")
    Z = sample_boundary(spec, samples, seed)
    if isinstance(a, StructuredAutomorphism):
        fwd, bwd = apply(a, Z), apply(a.inverse(), Z)
    else:
        fwd, bwd = a.apply(Z), a.apply_inverse(Z)
    for label, img in (("forward", fwd), ("inverse", bwd)):
        gap = membership_gap(spec, img) / (1.0 + np.linalg.norm(img, axis=1))
        bad = np.flatnonzero(gap < -tol)
        if bad.size:
            return OracleResult(Verdict.REFUTED, Z[bad[0]].copy(), label)
    return OracleResult(Verdict.PLAUSIBLE)


def random_automorphism(spec: ConeSpec, seed: int) -> StructuredAutomorphism:
    """Uniform signed permutation with log-uniform alpha in [0.1, 10]."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(spec.n)
    signs = rng.choice(np.array([-1.0, 1.0]), size=spec.n)
    alpha = float(10.0 ** rng.uniform(-1.0, 1.0))
    return StructuredAutomorphism(alpha, GeneralizedPermutation(perm, signs))


def homogeneity_probe(spec: ConeSpec, target, tol: float = 0.0) -> Optional[StructuredAutomorphism]:
    """Automorphism sending the main axis point (1, 0, ..., 0) to ``target``.

    Every automorphism scales the main axis, so the answer exists iff
    ``target`` lies on it; returns None (unreachable) otherwise.
    """
    if spec.p == 2.0:
        raise UnsupportedExponentError("K_2 is homogeneous; the structural probe applies to p != 2")
    target = np.asarray(target, dtype=float)
    if target.shape != (spec.dim,):
        raise DimensionMismatchError(f"target must have length {spec.dim}")
    if contains(spec, target, tol=max(tol, 0.0)) is not Membership.INTERIOR:
        raise NotInteriorError(f"target {target.tolist()} is not in the interior of {spec}")
    if np.abs(target[1:]).max() > tol * target[0]:
        return None
    return StructuredAutomorphism(float(target[0]), GeneralizedPermutation.identity(spec.n))
