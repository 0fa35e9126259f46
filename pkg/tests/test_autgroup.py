import math

import numpy as np
import pytest

from pcones.autgroup import (
    GeneralizedPermutation,
    LinearMap,
    StructuredAutomorphism,
    Verdict,
    apply,
    homogeneity_probe,
    is_structural_automorphism,
    loewy_schneider,
    random_automorphism,
    sampling_oracle_automorphism,
)
from pcones.cone import ConeSpec, Membership, contains, sample_boundary
from pcones.duality import k1_to_kinf_map
from pcones.errors import (
    DimensionMismatchError,
    NotInteriorError,
    PConeError,
    SingularMapError,
    UnsupportedExponentError,
)
from pcones.pnorm import Exponent

INF = math.inf


def K(p, dim):
    return ConeSpec(Exponent(p), dim)


def SA(alpha, perm, signs):
    return StructuredAutomorphism(alpha, GeneralizedPermutation(perm, signs))


# --- action ---------------------------------------------------------------


def test_apply_examples():
    z = np.array([1.0, 2.0, 3.0])
    np.testing.assert_array_equal(apply(StructuredAutomorphism.identity(2), z), z)
    a = SA(2.0, [1, 0], [1, -1])
    np.testing.assert_array_equal(apply(a, [1.0, 5.0, 7.0]), [2.0, 14.0, -10.0])
    np.testing.assert_array_equal(apply(a.as_linear_map(), [1.0, 5.0, 7.0]), [2.0, 14.0, -10.0])
    with pytest.raises(DimensionMismatchError):
        apply(a, [1.0, 2.0])


@pytest.mark.parametrize("p", [1.0, 1.5, 3.0, INF])
def test_automorphisms_preserve_boundary(p):
    spec = K(p, 4)
    Z = sample_boundary(spec, 100, seed=1)
    for s in range(20):
        a = random_automorphism(spec, s)
        for z in apply(a, Z):
            assert contains(spec, z) is Membership.BOUNDARY


def test_structured_matches_dense():
    spec = K(1.5, 5)
    Z = np.random.default_rng(0).standard_normal((50, 5))
    for s in range(50):
        a = random_automorphism(spec, s)
        np.testing.assert_allclose(apply(a, Z), Z @ a.matrix().T, rtol=1e-15)


def test_generalized_permutation_validation():
    with pytest.raises(PConeError):
        GeneralizedPermutation([0, 0], [1, 1])
    with pytest.raises(PConeError):
        GeneralizedPermutation([0, 1], [1, 2])
    with pytest.raises(PConeError):
        StructuredAutomorphism(0.0, GeneralizedPermutation.identity(2))
    m = GeneralizedPermutation([2, 0, 1], [1, -1, 1]).matrix()
    assert np.all((m != 0).sum(axis=0) == 1) and np.all((m != 0).sum(axis=1) == 1)


# --- group structure ------------------------------------------------------


def test_group_closure_exact():
    for s in range(1000):
        rng = np.random.default_rng(s)
        n = int(rng.integers(2, 6))
        spec = K(3, n + 1)
        a = random_automorphism(spec, 2 * s)
        b = random_automorphism(spec, 2 * s + 1)
        c = a.compose(b)
        assert c.alpha == a.alpha * b.alpha
        np.testing.assert_array_equal(c.gp.matrix(), a.gp.matrix() @ b.gp.matrix())
        assert is_structural_automorphism(c.matrix(), spec, tol=1e-12) is not None


def test_inverse_closure():
    for s in range(200):
        spec = K(1.5, 2 + s % 4)
        a = random_automorphism(spec, s)
        inv = a.inverse()
        np.testing.assert_allclose(inv.matrix() @ a.matrix(), np.eye(spec.dim), atol=1e-14)
        got = is_structural_automorphism(inv.matrix(), spec, tol=1e-12)
        assert got is not None and got.gp == a.gp.inverse()


def test_random_automorphism_contract():
    spec = K(3, 4)
    assert random_automorphism(spec, 5) == random_automorphism(spec, 5)
    for s in range(100):
        a = random_automorphism(spec, s)
        assert sorted(a.gp.perm.tolist()) == [0, 1, 2]
        assert 0.1 <= a.alpha <= 10.0
        assert is_structural_automorphism(a.matrix(), spec, tol=0.0) == a


def test_json_roundtrip():
    a = SA(2.5, [2, 0, 1], [-1, 1, 1])
    assert StructuredAutomorphism.from_json(a.to_json()) == a
    assert a.to_json() == {"alpha": 2.5, "perm": [2, 0, 1], "signs": [-1, 1, 1]}
    m = LinearMap(k1_to_kinf_map())
    np.testing.assert_array_equal(LinearMap.from_json(m.to_json()).matrix, m.matrix)


def test_linear_map_rejects_singular():
    with pytest.raises(SingularMapError):
        LinearMap([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(DimensionMismatchError):
        LinearMap([[1.0, 2.0, 3.0]])


# --- structural decision --------------------------------------------------


def test_structural_examples():
    A = np.diag([3.0, 0.0, 0.0])
    A[1:, 1:] = [[0, -3], [3, 0]]
    got = is_structural_automorphism(A, K(1.5, 3))
    assert got == SA(3.0, [1, 0], [-1, 1])
    assert is_structural_automorphism(k1_to_kinf_map(), K(1, 3)) is None
    assert is_structural_automorphism(np.diag([3.0, 1.0, 1.0]), K(1.5, 3)) is None
    assert is_structural_automorphism(np.eye(4), K(3, 4)) == StructuredAutomorphism.identity(3)
    with pytest.raises(UnsupportedExponentError):
        is_structural_automorphism(np.eye(3), K(2, 3))


def test_structural_tolerance_scales_with_alpha():
    a = SA(1e6, [1, 2, 0], [1, -1, -1])
    noisy = a.matrix() + 1e-9 * np.random.default_rng(0).standard_normal((4, 4))
    assert is_structural_automorphism(noisy, K(3, 4), tol=1e-12) == SA(noisy[0, 0], [1, 2, 0], [1, -1, -1])
    assert is_structural_automorphism(noisy, K(3, 4), tol=1e-18) is None


# --- Lorentz test for p = 2 -----------------------------------------------


def boost(phi, dim=3):
    B = np.eye(dim)
    B[0, 0] = B[1, 1] = math.cosh(phi)
    B[0, 1] = B[1, 0] = math.sinh(phi)
    return B


def test_loewy_schneider_examples():
    J = np.diag([1.0, -1.0, -1.0, -1.0])
    res = loewy_schneider(J)
    assert res.mu == 1.0 and res.preserves
    assert loewy_schneider(3 * np.eye(4)).mu == pytest.approx(9.0)
    assert not loewy_schneider(-np.eye(4)).preserves
    rng = np.random.default_rng(2)
    A = rng.standard_normal((4, 4))
    A[0] = [1.0, 0.1, 0.0, 0.0]
    assert loewy_schneider(A) is None


def test_lorentz_maps_preserve_k2_boundary():
    spec = K(2, 3)
    Z = sample_boundary(spec, 1000, seed=4)
    rng = np.random.default_rng(8)
    for _ in range(20):
        ang = rng.uniform(0, 2 * math.pi)
        c, s = math.cos(ang), math.sin(ang)
        R = np.eye(3)
        R[1:, 1:] = [[c, -s], [s, c]]
        A = rng.uniform(0.5, 2) * boost(rng.uniform(-2, 2)) @ R
        res = loewy_schneider(A)
        assert res is not None and res.preserves
        img = Z @ A.T
        gap = img[:, 0] - np.linalg.norm(img[:, 1:], axis=1)
        assert np.abs(gap).max() <= 1e-8 * (1 + np.abs(img).max())


# --- sampling oracle ------------------------------------------------------


def test_oracle_examples():
    a = SA(2.0, [1, 0], [1, -1])
    for seed in range(5):
        assert sampling_oracle_automorphism(a, K(1.5, 3), 500, seed).verdict is Verdict.PLAUSIBLE
    res = sampling_oracle_automorphism(np.diag([1.0, 1.0, 2.0]), K(1.5, 3), 1000, 0)
    assert res.refuted
    res = sampling_oracle_automorphism(k1_to_kinf_map(), K(1, 3), 1000, 0)
    assert res.refuted


def test_oracle_refutes_by_direct_construction():
    # (1, (0, 1)) is on the K_1.5 boundary and maps outside under diag(1, 1, 2)
    z = np.array([1.0, 0.0, 1.0])
    assert contains(K(1.5, 3), np.diag([1.0, 1.0, 2.0]) @ z) is Membership.OUTSIDE
    # B (1, (1, 0)) = (1, (1, 1)), outside K_1 since ||(1, 1)||_1 = 2
    assert contains(K(1, 3), k1_to_kinf_map() @ [1.0, 1.0, 0.0]) is Membership.OUTSIDE


def test_oracle_soundness_grid():
    for p in (1.0, 1.5, 3.0, INF):
        for n in (2, 3, 4):
            spec = K(p, n + 1)
            for s in range(10):
                a = random_automorphism(spec, 1000 * n + s)
                assert not sampling_oracle_automorphism(a, spec, 1000, s).refuted


def test_dense_gaussian_maps_are_refuted():
    for trial in range(50):
        rng = np.random.default_rng(trial)
        n = int(rng.integers(2, 5))
        spec = K([1.0, 1.5, 3.0, INF][trial % 4], n + 1)
        A = rng.standard_normal((n + 1, n + 1))
        assert is_structural_automorphism(A, spec) is None
        assert sampling_oracle_automorphism(A, spec, 1000, trial).refuted


# --- homogeneity probe ----------------------------------------------------


def test_homogeneity_probe_examples():
    got = homogeneity_probe(K(3, 3), [2.0, 0.0, 0.0])
    assert got == SA(2.0, [0, 1], [1, 1])
    assert homogeneity_probe(K(3, 3), [2.0, 1.0, 0.0]) is None
    assert homogeneity_probe(K(1.5, 3), [2.0, 0.1, 0.1]) is None
    with pytest.raises(NotInteriorError):
        homogeneity_probe(K(3, 3), [1.0, 1.0, 0.0])
    with pytest.raises(UnsupportedExponentError):
        homogeneity_probe(K(2, 3), [2.0, 0.0, 0.0])


def test_homogeneity_probe_witness_is_correct():
    spec = K(INF, 4)
    a = homogeneity_probe(spec, [5.0, 0.0, 0.0, 0.0])
    np.testing.assert_array_equal(apply(a, [1.0, 0.0, 0.0, 0.0]), [5.0, 0.0, 0.0, 0.0])
    # every structured automorphism keeps the main axis an eigenvector
    for s in range(100):
        img = apply(random_automorphism(spec, s), [1.0, 0.0, 0.0, 0.0])
        assert np.all(img[1:] == 0.0)
