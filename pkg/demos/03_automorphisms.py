# Symmetries of a p-cone with p != 2.
#
# For p != 2 every automorphism of K_p is a positive multiple of
# diag(1, P) with P a signed permutation.  Consequences checked here:
# the group is closed and small, a sampling oracle never refutes its
# members, no automorphism moves the main axis, and each one permutes the
# coordinate hyperplanes where the norm fails to be twice differentiable.
import numpy as np

from pcones import (
    ConeSpec,
    Exponent,
    GraphChart,
    StructuredAutomorphism,
    boundary_map,
    homogeneity_probe,
    is_structural_automorphism,
    locus_membership,
    random_automorphism,
    sampling_oracle_automorphism,
)

np.set_printoptions(precision=4, suppress=True)
spec = ConeSpec(Exponent(1.5), 4)

a = random_automorphism(spec, seed=3)
b = random_automorphism(spec, seed=4)
print("a =", a.to_json())
print(a.matrix())
ab = a.compose(b)
print("a o b is structural:", is_structural_automorphism(ab.matrix(), spec) == ab)
print("a o a^-1 = I:", np.allclose(a.compose(a.inverse()).matrix(), np.eye(4)))

# The oracle pushes boundary points through the map and its inverse.
print("oracle on a:", sampling_oracle_automorphism(a, spec, 2000, seed=0).verdict.value)
shear = np.eye(4)
shear[1, 2] = 0.2
res = sampling_oracle_automorphism(shear, spec, 2000, seed=0)
print("oracle on a shear:", res.verdict.value, "witness", res.witness, res.direction)

# Not homogeneous: interior points off the main axis are out of reach.
print("reach (2, 0, 0, 0):", homogeneity_probe(spec, [2.0, 0, 0, 0]))
print("reach (2, 1, 0, 0):", homogeneity_probe(spec, [2.0, 1.0, 0, 0]))

# Strata X_i = {x_i = 0} of the non-C^2 locus are permuted by tau.
chart = GraphChart(Exponent(1.5), 3)
x = np.array([0.7, 0.0, -1.2])
y = boundary_map(a, chart, chart, x)
print("x =", x, "lies in strata", sorted(locus_membership(x)))
print("B(x) =", y, "lies in strata", sorted(locus_membership(y)), "; tau =", a.stratum_map())

# p = 2 is the exception: boosts mix t with x and are automorphisms too.
boost = np.eye(3)
boost[0, 0] = boost[1, 1] = np.cosh(0.5)
boost[0, 1] = boost[1, 0] = np.sinh(0.5)
print("Lorentz boost on K_2^3:", sampling_oracle_automorphism(boost, ConeSpec(2.0, 3), 2000, 0).verdict.value)
print("same boost on K_3^3:  ", sampling_oracle_automorphism(boost, ConeSpec(3.0, 3), 2000, 0).verdict.value)
print("identity as structure:", StructuredAutomorphism.identity(3).to_json())
