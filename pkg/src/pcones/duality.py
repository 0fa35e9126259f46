"""Numerical search for isomorphisms between p-cones.

A cone K is self-dual under some inner product exactly when a symmetric
positive definite A with A K = K* exists, so both the self-duality and
the general isomorphism question reduce to minimising a sampled
violation of ``A K_from = K_to`` over a family of matrices.  The search
produces evidence only; it cannot prove that no map exists.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numba
import numpy as np

from .autgroup import LinearMap, random_automorphism
from .cone import ConeSpec, extreme_rays, sample_boundary
from .errors import DimensionMismatchError
from .pnorm import Exponent, norm

__all__ = [
    "ACCEPT_THRESHOLD",
    "MAX_CONDITION",
    "SearchVerdict",
    "IsoSearchReport",
    "PDFactor",
    "SampleNet",
    "violation",
    "selfdual_search",
    "iso_search",
    "four_candidates",
    "four_candidates_check",
    "CertifyKind",
    "Certificate",
    "certify_iso",
    "k1_to_kinf_map",
]

ACCEPT_THRESHOLD = 1e-9
REJECT_FACTOR = 100.0
_PENALTY = 1e3
# Searches only consider maps with ||A||_F ||A^-1||_F <= MAX_CONDITION.  The
# per-point defect is relative to the image norm, so a nearly singular map
# that collapses one cone onto a single boundary ray of the other scores
# close to zero.  Every exact isomorphism between p-cones of the sizes
# searched here has this product at most a small multiple of the dimension.
MAX_CONDITION = 1e3


def k1_to_kinf_map() -> np.ndarray:
    """The matrix sending K_1^3 onto K_inf^3: a 45 degree rotation of the
    x-block scaled by sqrt(2)."""
    return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, -1.0], [0.0, 1.0, 1.0]])


def _defects(images, e: Exponent):
    gap = norm(images[:, 1:], e) - images[:, 0]
    return np.maximum(0.0, gap) / (1.0 + np.linalg.norm(images, axis=1))


def _net_seeds(seed):
    ss = np.random.SeedSequence(seed)
    a, b = ss.spawn(2)
    return int(a.generate_state(1)[0]), int(b.generate_state(1)[0])


def violation(A, frm: ConeSpec, to: ConeSpec, samples: int = 1000, seed: int = 0, aggregate: str = "max") -> float:
    """Sampled violation of ``A K_from = K_to``.

    Boundary samples of ``frm`` are pushed forward by A and checked
    against ``to``; boundary samples of ``to`` are pulled back by A^-1
    and checked against ``frm``.  A point's defect is
    ``max(0, ||u|| - t) / (1 + ||(t, u)||_2)``.
    """
    a = A if isinstance(A, LinearMap) else LinearMap(A)
    if not (a.dim == frm.dim == to.dim):
        raise DimensionMismatchError(f"map of size {a.dim} between {frm} and {to}")
    sf, st = _net_seeds(seed)
    fwd = a.apply(sample_boundary(frm, samples, sf))
    bwd = a.apply_inverse(sample_boundary(to, samples, st))
    d = np.concatenate([_defects(fwd, to.exponent), _defects(bwd, frm.exponent)])
    return float(d.max() if aggregate == "max" else d.mean())


# --- compiled objective ---------------------------------------------------


@numba.njit(cache=True)
def _defect_stats(Z, A, mode, p, need_total):
    # mode: 0 finite p, 1 p == 1, 2 p == inf
    m, d = Z.shape
    worst = 0.0
    total = 0.0
    img = np.empty(d)
    for k in range(m):
        for i in range(d):
            s = 0.0
            for j in range(d):
                s += A[i, j] * Z[k, j]
            img[i] = s
        l1 = 0.0
        linf = 0.0
        sq = img[0] * img[0]
        for i in range(1, d):
            v = abs(img[i])
            sq += v * v
            l1 += v
            if v > linf:
                linf = v
        if l1 <= img[0]:
            continue
        scale = 1.0 + math.sqrt(sq)
        if mode == 2:
            acc = linf
        elif mode == 1:
            acc = l1
        else:
            # sum |u_i|^p <= ||u||_inf^(p-1) ||u||_1 bounds the defect cheaply
            if not need_total:
                if (l1 - img[0]) / scale <= worst:
                    continue
                if (linf * (l1 / linf) ** (1.0 / p) - img[0]) / scale <= worst:
                    continue
            acc = 0.0
            for i in range(1, d):
                acc += (abs(img[i]) / linf) ** p
            acc = linf * acc ** (1.0 / p)
        gap = acc - img[0]
        if gap > 0.0:
            dv = gap / scale
            total += dv
            if dv > worst:
                worst = dv
    return worst, total


def _mode(e: Exponent):
    if e.is_infinite:
        return 2, 1.0
    if e.value == 1.0:
        return 1, 1.0
    return 0, e.value


@dataclass
class SampleNet:
    """Boundary samples frozen before a search starts."""

    frm: ConeSpec
    to: ConeSpec
    samples: int
    seed: int
    aggregate: str = "max"

    def __post_init__(self):
        sf, st = _net_seeds(self.seed)
        self.Zf = np.ascontiguousarray(sample_boundary(self.frm, self.samples, sf))
        self.Zt = np.ascontiguousarray(sample_boundary(self.to, self.samples, st))
        self._mf = _mode(self.frm.exponent)
        self._mt = _mode(self.to.exponent)

    def __call__(self, A, Ainv=None) -> float:
        if Ainv is None:
            try:
                Ainv = np.linalg.inv(A)
            except np.linalg.LinAlgError:
                return _PENALTY
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(Ainv))):
            return _PENALTY
        need_total = self.aggregate != "max"
        w1, s1 = _defect_stats(self.Zf, np.ascontiguousarray(A), *self._mt, need_total)
        w2, s2 = _defect_stats(self.Zt, np.ascontiguousarray(Ainv), *self._mf, need_total)
        if self.aggregate == "max":
            return max(w1, w2)
        return (s1 + s2) / (2 * self.samples)


# --- parameterisations ----------------------------------------------------


@numba.njit(cache=True)
def _pd_maps(theta, d):
    L = np.zeros((d, d))
    k = 0
    logdet = 0.0
    for i in range(d):
        for j in range(i + 1):
            if i == j:
                v = min(max(theta[k], -50.0), 50.0)
                logdet += v
                L[i, j] = math.exp(v)
            else:
                L[i, j] = theta[k]
            k += 1
    L *= math.exp(-logdet / d)
    # forward substitution for the inverse factor
    Li = np.zeros((d, d))
    for c in range(d):
        for i in range(c, d):
            s = 1.0 if i == c else 0.0
            for j in range(c, i):
                s -= L[i, j] * Li[j, c]
            Li[i, c] = s / L[i, i]
    return L @ L.T, Li.T @ Li, True


@numba.njit(cache=True)
def _general_maps(theta, d):
    M = theta.reshape((d, d)).copy()
    det = np.linalg.det(M)
    scale = math.sqrt((M * M).sum() / d)
    if not np.isfinite(det) or abs(det) <= 1e-8 * scale**d:
        return M, M, False
    A = M / abs(det) ** (1.0 / d)
    return A, np.linalg.inv(A), True


@numba.njit(cache=True)
def _objective(theta, pd, d, Zf, Zt, mf, pf, mt, pt, need_total):
    if pd:
        A, Ai, ok = _pd_maps(theta, d)
    else:
        A, Ai, ok = _general_maps(theta, d)
    if not ok or not (np.all(np.isfinite(A)) and np.all(np.isfinite(Ai))):
        return _PENALTY
    if math.sqrt((A * A).sum() * (Ai * Ai).sum()) > MAX_CONDITION:
        return _PENALTY
    w1, s1 = _defect_stats(Zf, A, mt, pt, need_total)
    w2, s2 = _defect_stats(Zt, Ai, mf, pf, need_total)
    if need_total:
        return (s1 + s2) / (Zf.shape[0] + Zt.shape[0])
    return max(w1, w2)


class PDFactor:
    """Lower-triangular factor with log-stored diagonal; ``L L^T`` is SPD.

    Parameters are the lower triangle in row-major order.  The map is
    normalised to unit determinant: the per-point defect
    ``gap / (1 + |image|)`` is not scale-invariant, and without this a
    huge multiple of a map pushing K_p deep inside K_q drives every
    pulled-back defect to zero.
    """

    pd = True

    def __init__(self, dim):
        self.dim = dim
        self.rows, self.cols = np.tril_indices(dim)
        self.diag = self.rows == self.cols
        self.size = self.rows.size

    def matrix(self, theta):
        return _pd_maps(np.asarray(theta, dtype=float), self.dim)[0]

    def params(self, L):
        L = np.asarray(L, dtype=float)
        vals = L[self.rows, self.cols]
        with np.errstate(divide="ignore"):
            return np.where(self.diag, np.log(np.abs(vals)), vals)


class GeneralFactor:
    """Unconstrained square matrix normalised to |det| = 1.

    Cone isomorphism is scale-invariant, so the overall scale is fixed
    out; near-singular matrices are rejected by a determinant guard.
    """

    pd = False

    def __init__(self, dim):
        self.dim = dim
        self.size = dim * dim

    def params(self, M):
        return np.asarray(M, dtype=float).ravel().copy()

    def matrix(self, theta):
        M = np.asarray(theta, dtype=float).reshape(self.dim, self.dim)
        return M / abs(np.linalg.det(M)) ** (1.0 / self.dim)


# --- search engine --------------------------------------------------------


class SearchVerdict(enum.Enum):
    FOUND_ISO = "FoundIso"
    NO_ISO_FOUND = "NoIsoFound"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class IsoSearchReport:
    kind: str
    frm: ConeSpec
    to: ConeSpec
    best_map: np.ndarray
    best_violation: float
    restarts: int
    samples_per_eval: int
    seed: int
    budget: int
    evaluations: int
    restart_violations: List[float]
    best_restart: int
    threshold: float
    aggregate: str
    verdict: SearchVerdict
    sample_seeds: tuple = field(default=())

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "from": self.frm.to_json(),
            "to": self.to.to_json(),
            "best_map": self.best_map.tolist(),
            "best_violation": self.best_violation,
            "verdict": self.verdict.value,
            "restarts": self.restarts,
            "samples_per_eval": self.samples_per_eval,
            "seed": self.seed,
            "sample_seeds": list(self.sample_seeds),
            "budget": self.budget,
            "evaluations": self.evaluations,
            "best_restart": self.best_restart,
            "restart_violations": self.restart_violations,
            "threshold": self.threshold,
            "reject_above": self.threshold * REJECT_FACTOR,
            "aggregate": self.aggregate,
            "max_condition": MAX_CONDITION,
        }


@numba.njit(cache=True)
def _nelder_mead(x0, step, maxfev, target, fatol, xatol, pd, d, Zf, Zt, mf, pf, mt, pt, need_total):
    """Adaptive Nelder-Mead on the compiled objective.

    Returns ``(x_best, f_best, evaluations)``.
    """
    n = x0.size
    rho, chi = 1.0, 1.0 + 2.0 / n
    psi, sigma = 0.75 - 1.0 / (2.0 * n), 1.0 - 1.0 / n
    sim = np.empty((n + 1, n))
    fs = np.empty(n + 1)
    sim[0] = x0
    for i in range(n):
        sim[i + 1] = x0
        sim[i + 1, i] += step
    for i in range(n + 1):
        fs[i] = _objective(sim[i], pd, d, Zf, Zt, mf, pf, mt, pt, need_total)
    fev = n + 1
    while fev < maxfev:
        order = np.argsort(fs)
        sim = sim[order]
        fs = fs[order]
        if fs[0] <= target:
            break
        spread_f = np.max(np.abs(fs[1:] - fs[0]))
        spread_x = np.max(np.abs(sim[1:] - sim[0]))
        if spread_f <= fatol and spread_x <= xatol:
            break
        xbar = sim[:-1].sum(axis=0) / n
        xr = (1 + rho) * xbar - rho * sim[-1]
        fr = _objective(xr, pd, d, Zf, Zt, mf, pf, mt, pt, need_total)
        fev += 1
        shrink = False
        if fr < fs[0]:
            xe = (1 + rho * chi) * xbar - rho * chi * sim[-1]
            fe = _objective(xe, pd, d, Zf, Zt, mf, pf, mt, pt, need_total)
            fev += 1
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
        elif fr < fs[-1]:
            xc = (1 + psi * rho) * xbar - psi * rho * sim[-1]
            fc = _objective(xc, pd, d, Zf, Zt, mf, pf, mt, pt, need_total)
            fev += 1
            if fc <= fr:
                sim[-1], fs[-1] = xc, fc
            else:
                shrink = True
        else:
            xcc = (1 - psi) * xbar + psi * sim[-1]
            fcc = _objective(xcc, pd, d, Zf, Zt, mf, pf, mt, pt, need_total)
            fev += 1
            if fcc < fs[-1]:
                sim[-1], fs[-1] = xcc, fcc
            else:
                shrink = True
        if shrink:
            for i in range(1, n + 1):
                sim[i] = sim[0] + sigma * (sim[i] - sim[0])
                fs[i] = _objective(sim[i], pd, d, Zf, Zt, mf, pf, mt, pt, need_total)
            fev += n
    k = np.argmin(fs)
    return sim[k].copy(), fs[k], fev


def _local_search(fixed, x0, budget, step, target):
    """Nelder-Mead restarted from the incumbent with shrinking steps.

    ``budget`` caps objective evaluations; stops early once the value
    drops to ``target``.
    """
    x = np.asarray(x0, dtype=float).copy()
    f = _objective(x, *fixed)
    evals = 1
    while evals < budget and step > 1e-13 and f > target:
        xn, fn, used = _nelder_mead(x, step, budget - evals, target, 0.0, 1e-14, *fixed)
        evals += used
        improved = fn < f * (1.0 - 1e-3)
        if fn < f:
            x, f = xn, fn
        # keep the step while restarts still make progress
        if not improved:
            step *= 0.2
    return x, float(f), evals


def _verdict(best, threshold):
    if best <= threshold:
        return SearchVerdict.FOUND_ISO
    if best > REJECT_FACTOR * threshold:
        return SearchVerdict.NO_ISO_FOUND
    return SearchVerdict.INCONCLUSIVE


def _run(kind, frm, to, param, starts, restarts, samples, seed, budget, threshold, aggregate):
    net = SampleNet(frm, to, samples, seed, aggregate)
    base = (param.pd, param.dim, net.Zf, net.Zt, *net._mf, *net._mt)
    target = threshold * 1e-3

    best = (math.inf, None, -1)
    per_restart, evals = [], 0
    for k in range(restarts):
        # each restart depends only on (seed, k): fewer restarts give a prefix
        rng = np.random.default_rng([seed, k])
        x0 = starts(k, rng)
        if aggregate == "max":
            # the mean of the defects is far smoother than their max;
            # descending on it first keeps the simplex off the max's ridges
            x, _, used = _local_search(base + (True,), x0, budget // 2, 0.5, target)
            x, f, more = _local_search(base + (False,), x, budget - used, 0.1, target)
            used += more
        else:
            x, f, used = _local_search(base + (True,), x0, budget, 0.5, target)
        evals += used
        per_restart.append(float(f))
        if f < best[0]:
            best = (float(f), x, k)
    A = param.matrix(best[1])
    return IsoSearchReport(
        kind=kind,
        frm=frm,
        to=to,
        best_map=A,
        best_violation=best[0],
        restarts=restarts,
        samples_per_eval=samples,
        seed=seed,
        budget=budget,
        evaluations=evals,
        restart_violations=per_restart,
        best_restart=best[2],
        threshold=threshold,
        aggregate=aggregate,
        verdict=_verdict(best[0], threshold),
        sample_seeds=_net_seeds(seed),
    )


def selfdual_search(
    spec: ConeSpec,
    restarts: int = 50,
    samples: int = 1000,
    seed: int = 42,
    budget: int = 20000,
    threshold: float = ACCEPT_THRESHOLD,
    aggregate: str = "max",
) -> IsoSearchReport:
    """Look for a symmetric positive definite A with A K_p = K_q.

    ``budget`` caps metric evaluations per restart.  Restart 0 starts at
    the identity itself.  Later even restarts perturb the identity, odd
    restarts perturb the Gram matrix of a random structured automorphism;
    perturbation sizes vary with the restart.
    """
    param = PDFactor(spec.dim)

    def starts(k, rng):
        sigma = 0.0 if k == 0 else 0.1 + 0.4 * rng.random()
        if k % 2 == 0:
            G = np.eye(spec.dim)
        else:
            G = random_automorphism(spec, int(rng.integers(2**31))).matrix()
        G = G + sigma * rng.standard_normal(G.shape)
        S = G @ G.T + 1e-3 * np.eye(spec.dim)
        L = np.linalg.cholesky(S)
        return param.params(L)

    return _run("selfdual", spec, spec.dual(), param, starts, restarts, samples, seed, budget, threshold, aggregate)


def iso_search(
    frm: ConeSpec,
    to: ConeSpec,
    restarts: int = 50,
    samples: int = 1000,
    seed: int = 42,
    budget: int = 20000,
    threshold: float = ACCEPT_THRESHOLD,
    aggregate: str = "max",
) -> IsoSearchReport:
    """Look for any invertible A with A K_from = K_to.

    Restart 0 starts at the identity; later restarts perturb the identity
    (even) or a random structured automorphism of the target (odd).
    """
    if frm.dim != to.dim:
        raise DimensionMismatchError(f"{frm} and {to} have different ambient dimensions")
    param = GeneralFactor(frm.dim)

    def starts(k, rng):
        sigma = 0.0 if k == 0 else 0.1 + 0.4 * rng.random()
        if k % 2 == 0:
            G = np.eye(frm.dim)
        else:
            G = random_automorphism(to, int(rng.integers(2**31))).matrix()
            G = G / G[0, 0]
        return param.params(G + sigma * rng.standard_normal(G.shape))

    return _run("iso", frm, to, param, starts, restarts, samples, seed, budget, threshold, aggregate)


# --- exact checks ---------------------------------------------------------


def four_candidates() -> List[np.ndarray]:
    """The four symmetric maps B C with C in Aut(K_1^3), alpha = 1."""
    return [
        np.array([[1.0, 0, 0], [0, -1, -1], [0, -1, 1]]),
        np.array([[1.0, 0, 0], [0, 1, 1], [0, 1, -1]]),
        np.array([[1.0, 0, 0], [0, -1, 1], [0, 1, 1]]),
        np.array([[1.0, 0, 0], [0, 1, -1], [0, -1, -1]]),
    ]


def four_candidates_check():
    """Each candidate with its smallest eigenvalue (all negative)."""
    return [(m, float(np.linalg.eigvalsh(m)[0])) for m in four_candidates()]


def symmetric_candidates_from_aut():
    """Enumerate symmetric products ``B C`` over C in Aut(K_1^3), alpha = 1.

    Independent derivation of the four candidates: walk all eight signed
    permutations of two coordinates and keep the symmetric products.
    """
    B = k1_to_kinf_map()
    found = []
    for perm in itertools.permutations(range(2)):
        for signs in itertools.product((1.0, -1.0), repeat=2):
            C = np.zeros((3, 3))
            C[0, 0] = 1.0
            for i, (j, s) in enumerate(zip(perm, signs)):
                C[1 + i, 1 + j] = s
            M = B @ C
            if np.array_equal(M, M.T):
                found.append(M)
    return found


class CertifyKind(enum.Enum):
    EXACT_POLYHEDRAL = "ExactPolyhedral"
    NUMERICAL_ONLY = "NumericalOnly"


@dataclass(frozen=True)
class Certificate:
    kind: CertifyKind
    violation: Optional[float] = None

    def to_json(self):
        return {"kind": self.kind.value, "violation": self.violation}


def _normalized_rays(R):
    return R / np.linalg.norm(R, axis=1, keepdims=True)


def certify_iso(A, frm: ConeSpec, to: ConeSpec, samples: int = 1000, seed: int = 0, tol: float = 1e-12) -> Certificate:
    """Exact check for polyhedral pairs, sampled violation otherwise.

    For p, q in {1, inf} a linear isomorphism maps extreme rays onto
    extreme rays, so A is an isomorphism iff it induces a bijection
    between the two ray sets (directions compared after normalising).
    """
    a = A if isinstance(A, LinearMap) else LinearMap(A)
    if not (a.dim == frm.dim == to.dim):
        raise DimensionMismatchError(f"map of size {a.dim} between {frm} and {to}")
    if frm.exponent.is_polyhedral and to.exponent.is_polyhedral:
        src = extreme_rays(frm)
        dst = extreme_rays(to)
        if len(src) == len(dst):
            img = _normalized_rays(a.apply(src))
            dist = np.linalg.norm(img[:, None, :] - dst[None, :, :], axis=2)
            match = dist <= tol * 10
            if np.all(match.sum(axis=1) == 1) and np.all(match.sum(axis=0) == 1):
                return Certificate(CertifyKind.EXACT_POLYHEDRAL, 0.0)
    return Certificate(CertifyKind.NUMERICAL_ONLY, violation(a, frm, to, samples, seed))
