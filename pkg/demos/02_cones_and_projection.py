# p-cones, their duals, their extreme rays, and the Moreau decomposition.
import math

import numpy as np

from pcones import ConeSpec, Exponent, contains, dual, extreme_rays, project, project_many
from pcones.cone import membership_gap
from pcones.duality import certify_iso, k1_to_kinf_map

np.set_printoptions(precision=5, suppress=True)
INF = math.inf

# A cone is named by its exponent and its ambient dimension n + 1.
K13 = ConeSpec(Exponent(1.0), 3)
print(K13, "has dual", dual(K13))
print("(1, 0.5, 0.5) in K_1^3:", contains(K13, [1, 0.5, 0.5]).value)
print("(0.9, 1, 0) in K_inf^3:", contains(dual(K13), [0.9, 1, 0]).value)

# K_1 and K_inf are polyhedral: 2n and 2^n extreme rays.
for n in (2, 3, 4):
    print(f"n = {n}: K_1 has {len(extreme_rays(ConeSpec(1.0, n + 1)))} rays, "
          f"K_inf has {len(extreme_rays(ConeSpec(INF, n + 1)))}")

# With n = 2 the two counts agree, and a rotation by 45 degrees (scaled by
# sqrt 2) carries K_1^3 onto K_inf^3.  The check below is exact: it matches
# extreme rays to extreme rays.
B = k1_to_kinf_map()
print("B =\n", B)
print("certificate:", certify_iso(B, K13, dual(K13)).to_json())
print("B maps the K_1 rays to\n", extreme_rays(K13) @ B.T * math.sqrt(2))

# Projection.  Any z splits as z = P_K(z) + P_{-K*}(z) with the two parts
# orthogonal (Moreau).  For p = 2 there is a closed form to compare with.
z = np.array([0.0, 2.0, 0.0])
pk, rest = project(ConeSpec(2.0, 3), z)
print("z =", z, "-> P_K(z) =", pk, " remainder =", rest)

rng = np.random.default_rng(0)
for p in (1.0, 1.5, 2.0, 3.0, INF):
    spec = ConeSpec(Exponent(p), 4)
    Z = rng.standard_normal((2000, 4)) * 3
    P, Q = project_many(spec, Z)
    print(
        f"p = {p:>4}: max |<P, Q>| = {np.abs((P * Q).sum(axis=1)).max():.2e}, "
        f"min gap in K = {membership_gap(spec, P).min():+.1e}, "
        f"min gap in K* = {membership_gap(dual(spec), -Q).min():+.1e}"
    )
