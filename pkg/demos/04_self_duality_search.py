# Is K_p self-dual under some inner product?
#
# That happens exactly when a symmetric positive definite A maps K_p onto
# its Euclidean dual K_q.  For p = 2 the identity works.  For K_1^3 the
# maps onto K_inf^3 are known in closed form, and none of the symmetric
# ones is positive definite.  For other p a numerical search gives
# evidence (never proof) that no such A exists.
import math

import numpy as np

from pcones import ConeSpec, Exponent, four_candidates_check, iso_search, selfdual_search, violation

np.set_printoptions(precision=4, suppress=True)
INF = math.inf

for m, lam in four_candidates_check():
    print(m.tolist(), "min eigenvalue", round(lam, 6))

# Small searches so the script runs in about a minute.
cfg = dict(restarts=3, budget=5000, seed=42)
for p, dim in ((2.0, 3), (2.0, 4), (1.0, 3), (1.5, 3), (3.0, 3)):
    r = selfdual_search(ConeSpec(Exponent(p), dim), **cfg)
    print(f"self-dual K_{p:g}^{dim}: {r.verdict.value:12s} best violation {r.best_violation:.2e}")

for p, q, dim in ((1.0, INF, 3), (1.0, INF, 4), (1.5, 3.0, 3)):
    r = iso_search(ConeSpec(Exponent(p), dim), ConeSpec(Exponent(q), dim), **cfg)
    print(f"K_{p:g}^{dim} -> K_{q:g}^{dim}: {r.verdict.value:12s} best violation {r.best_violation:.2e}")
    if r.verdict.value == "FoundIso":
        print(np.round(r.best_map / r.best_map[0, 0], 6))

# Why the searches cap the condition number: the violation is measured
# relative to the size of each image point, so maps that squash the cone
# onto a face score better and better as they approach singularity.
v = np.array([1.0, -1.0, 0.0]) / math.sqrt(2)
u = np.array([1.0, 1.0, 0.0]) / math.sqrt(2)
e = np.array([0.0, 0.0, 1.0])
M = 2 * np.outer(u, u) + np.outer(e, e) + 0.3 * (np.outer(u, e) + np.outer(e, u))
for eps in (1e-2, 1e-4, 1e-6, 1e-8):
    A = M + eps * np.outer(v, v)
    A /= np.linalg.det(A) ** (1 / 3)
    print(f"eps {eps:.0e}: cond {np.linalg.cond(A):.1e}, violation {violation(A, ConeSpec(1.0, 3), ConeSpec(INF, 3)):.2e}")
