"""Exponent arithmetic and the p-norm with its first two derivatives.

All functions treat ``x`` as a 1-D vector unless noted; :func:`norm`
also reduces along the last axis of a stacked array so that cone code can
evaluate thousands of points in one call.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import (
    NotTwiceDifferentiableError,
    PreconditionError,
    UnsupportedExponentError,
    ZeroVectorError,
)

__all__ = [
    "Exponent",
    "Smoothness",
    "as_exponent",
    "conjugate",
    "norm",
    "gradient",
    "hessian",
    "classify_c2",
    "c2_divergence_probe",
    "loglog_slope",
]


@dataclass(frozen=True)
class Exponent:
    """A norm exponent p in [1, inf].

    Infinity is stored as ``math.inf``, which IEEE arithmetic represents
    exactly; no large finite stand-in is ever used.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v < 1.0:
            raise UnsupportedExponentError(f"exponent must lie in [1, inf], got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, text: Union[str, float, int, "Exponent"]) -> "Exponent":
        if isinstance(text, Exponent):
            return text
        if isinstance(text, str):
            token = text.strip().lower()
            if token in ("inf", "infinity", "+inf"):
                return cls(math.inf)
            try:
                return cls(float(token))
            except ValueError:
                raise UnsupportedExponentError(f"cannot parse exponent {text!r}") from None
        return cls(float(text))

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def is_finite(self) -> bool:
        return not self.is_infinite

    @property
    def is_polyhedral(self) -> bool:
        return self.value == 1.0 or self.is_infinite

    @property
    def is_smooth_range(self) -> bool:
        """True for finite p > 1, where the norm is differentiable off 0."""
        return self.is_finite and self.value > 1.0

    def conjugate(self) -> "Exponent":
        return conjugate(self)

    def to_json(self):
        return "inf" if self.is_infinite else self.value

    def __str__(self):
        if self.is_infinite:
            return "inf"
        return f"{self.value:g}"


def as_exponent(p) -> Exponent:
    return Exponent.parse(p)


def conjugate(e) -> Exponent:
    """Return q with 1/p + 1/q = 1."""
    e = as_exponent(e)
    if e.is_infinite:
        return Exponent(1.0)
    if e.value == 1.0:
        return Exponent(math.inf)
    if e.value == 2.0:
        return Exponent(2.0)
    return Exponent(e.value / (e.value - 1.0))


class Smoothness(enum.Enum):
    TWICE_SMOOTH = "TwiceSmooth"
    NOT_TWICE_SMOOTH = "NotTwiceSmooth"


def norm(x, p) -> Union[float, np.ndarray]:
    """p-norm along the last axis, guarded against overflow.

    The largest magnitude is factored out before powering, so p around 50
    on entries of order 1e10 stays finite.
    """
    e = as_exponent(p)
    a = np.abs(np.asarray(x, dtype=float))
    m = a.max(axis=-1) if a.shape[-1] else np.zeros(a.shape[:-1])
    if e.is_infinite:
        return m if np.ndim(m) else float(m)
    safe = np.where(m > 0, m, 1.0)
    scaled = a / np.expand_dims(safe, -1)
    if e.value == 1.0:
        s = scaled.sum(axis=-1)
    elif e.value == 2.0:
        s = np.sqrt((scaled * scaled).sum(axis=-1))
    else:
        s = (scaled ** e.value).sum(axis=-1) ** (1.0 / e.value)
    out = np.where(m > 0, m * s, 0.0)
    return out if np.ndim(out) else float(out)


def _check_smooth_args(x, e):
    x = np.asarray(x, dtype=float)
    if e.is_infinite or e.value == 1.0:
        raise UnsupportedExponentError(
            f"derivatives need finite p > 1; subgradients for p={e} are not provided"
        )
    if not np.any(x):
        raise ZeroVectorError("the p-norm is not differentiable at the origin")
    return x


def gradient(x, p) -> np.ndarray:
    """Gradient of the p-norm at ``x != 0`` for finite p > 1.

    Written as ``sign(x_i) * (|x_i| / ||x||_p) ** (p - 1)``, which equals
    ``||x||^(1-p) |x_i|^(p-1) sign(x_i)`` without forming large powers.
    """
    e = as_exponent(p)
    x = _check_smooth_args(x, e)
    r = norm(x, e)
    return np.sign(x) * (np.abs(x) / r) ** (e.value - 1.0)


def hessian(x, p) -> np.ndarray:
    """Hessian of the p-norm.

    Uses the factorisation ``(p-1)/||x|| * (diag(w) - g g^T)`` with
    ``g`` the gradient and ``w_i = (|x_i|/||x||)^(p-2)``, which expands to
    the usual entrywise second-derivative formulas.

    Raises:
        NotTwiceDifferentiableError: p in (1, 2) and some coordinate is 0.
    """
    e = as_exponent(p)
    x = _check_smooth_args(x, e)
    pv = e.value
    if pv < 2.0 and np.any(x == 0.0):
        raise NotTwiceDifferentiableError(
            f"||.||_{e} is not C^2 at points with a zero coordinate when p < 2"
        )
    r = norm(x, e)
    rel = np.abs(x) / r
    g = np.sign(x) * rel ** (pv - 1.0)
    if pv == 2.0:
        w = np.ones_like(x)
    else:
        with np.errstate(divide="ignore"):
            w = np.where(rel > 0, rel ** (pv - 2.0), 0.0)
    h = (pv - 1.0) / r * (np.diag(w) - np.outer(g, g))
    return 0.5 * (h + h.T)


def classify_c2(x, p) -> Smoothness:
    e = as_exponent(p)
    x = _check_smooth_args(x, e)
    if e.value < 2.0 and np.any(x == 0.0):
        return Smoothness.NOT_TWICE_SMOOTH
    return Smoothness.TWICE_SMOOTH


def c2_divergence_probe(x, p, i: int, j: int, steps: Sequence[float]):
    """Difference quotients of the i-th partial derivative along e_j.

    Returns a list of ``(h, q(h))`` with
    ``q(h) = (d_i||x + h e_j|| - d_i||x||) / h``.  At a point with
    ``x_i = 0`` and p in (1, 2) the quotients blow up like ``h**(p-2)``;
    for p >= 2 they stay bounded.
    """
    e = as_exponent(p)
    x = _check_smooth_args(x, e)
    if x[i] != 0.0:
        raise PreconditionError(f"probe needs x[{i}] == 0, got {x[i]!r}")
    hs = [float(h) for h in steps]
    if any(h <= 0 for h in hs) or any(b >= a for a, b in zip(hs, hs[1:])):
        raise PreconditionError("steps must be positive and strictly decreasing")
    base = gradient(x, e)[i]
    out = []
    for h in hs:
        xh = x.copy()
        xh[j] += h
        out.append((h, (gradient(xh, e)[i] - base) / h))
    return out


def loglog_slope(points) -> float:
    """Least-squares slope of log|q| against log h.

    Needs at least four points.  Returns nan when some quotient is exactly
    zero, since the logarithm is undefined there (such quotients are
    trivially bounded).
    """
    pts = list(points)
    if len(pts) < 4:
        raise PreconditionError("slope fit needs at least 4 steps")
    h = np.array([a for a, _ in pts], dtype=float)
    q = np.abs(np.array([b for _, b in pts], dtype=float))
    if np.any(q == 0.0):
        return math.nan
    slope, _ = np.polyfit(np.log(h), np.log(q), 1)
    return float(slope)
