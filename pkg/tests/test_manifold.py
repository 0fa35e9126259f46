import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pcones.autgroup import random_automorphism
from pcones.cone import ConeSpec
from pcones.duality import k1_to_kinf_map
from pcones.errors import (
    DimensionMismatchError,
    NotOnTargetGraphError,
    UnsupportedExponentError,
    ZeroVectorError,
)
from pcones.manifold import (
    GraphChart,
    boundary_map,
    gauss_normal,
    graph_normal,
    lambda_vector,
    locus_membership,
    tangent_basis,
)
from pcones.pnorm import Exponent, norm

INF = math.inf


def chart(p, n):
    return GraphChart(Exponent(p), n)


def test_lambda_vector_examples():
    np.testing.assert_allclose(lambda_vector([[1, 0, 0], [0, 1, 0]]), [0, 0, 1])
    np.testing.assert_allclose(lambda_vector([[1, 2, 3], [2, 4, 6]]), 0.0, atol=1e-14)
    np.testing.assert_allclose(lambda_vector([[1.0, 0.0]]), [0.0, 1.0])
    with pytest.raises(DimensionMismatchError):
        lambda_vector([[1.0, 0.0, 0.0]])


def test_lambda_vector_is_determinant_functional():
    rng = np.random.default_rng(0)
    for n in (2, 3, 4, 5, 6):
        X = rng.standard_normal((n - 1, n))
        lam = lambda_vector(X)
        for y in rng.standard_normal((5, n)):
            assert lam @ y == pytest.approx(np.linalg.det(np.vstack([X, y])), abs=1e-10)
        np.testing.assert_allclose(X @ lam, 0.0, atol=1e-10)


def test_lambda_vector_alternating():
    rng = np.random.default_rng(1)
    for n in (3, 4, 5):
        X = rng.standard_normal((n - 1, n))
        swapped = X.copy()
        swapped[[0, 1]] = swapped[[1, 0]]
        np.testing.assert_allclose(lambda_vector(swapped), -lambda_vector(X), atol=1e-12)
        scaled = X.copy()
        scaled[0] *= 2.5
        np.testing.assert_allclose(lambda_vector(scaled), 2.5 * lambda_vector(X), atol=1e-12)


def test_gauss_normal_examples():
    np.testing.assert_allclose(gauss_normal(chart(2, 2), [1.0, 0.0]), [1, -1, 0] / np.sqrt(2), atol=1e-15)
    x = np.array([1.0, 1.0])
    g = 2 ** (-2 / 3)
    expected = np.array([1.0, -g, -g]) / math.sqrt(1 + 2 * g * g)
    np.testing.assert_allclose(gauss_normal(chart(3, 2), x), expected, atol=1e-12)
    with pytest.raises(ZeroVectorError):
        gauss_normal(chart(3, 2), [0.0, 0.0])
    with pytest.raises(UnsupportedExponentError):
        gauss_normal(chart(1, 2), [1.0, 2.0])


def test_tangent_basis_spans_tangent_space():
    c = chart(1.5, 3)
    x = np.array([0.4, -1.0, 2.0])
    tb = tangent_basis(c, x)
    np.testing.assert_array_equal(tb.base_point, c.lift(x))
    # a short chord along each basis direction stays on the graph to second order
    for i, v in enumerate(tb.vectors):
        h = 1e-5
        moved = c.lift(x + h * np.eye(3)[i])
        assert np.linalg.norm(moved - (tb.base_point + h * v)) < 1e-8


def test_normal_orthogonal_and_matches_closed_form():
    rng = np.random.default_rng(3)
    for _ in range(500):
        n = int(rng.integers(2, 6))
        p = float(rng.uniform(1.1, 6.0))
        x = rng.standard_normal(n)
        c = chart(p, n)
        nv = gauss_normal(c, x)
        assert np.linalg.norm(nv) == pytest.approx(1.0, abs=1e-12)
        assert nv[0] > 0
        np.testing.assert_allclose(tangent_basis(c, x).vectors @ nv, 0.0, atol=1e-9)
        np.testing.assert_allclose(nv, graph_normal(c, x), atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(arrays(float, 3, elements=st.floats(-100, 100)), st.floats(1.05, 10.0), st.floats(0.01, 100.0))
def test_normal_is_scale_invariant(x, p, t):
    if np.abs(x).max() < 1e-6:
        return
    c = chart(p, 3)
    np.testing.assert_allclose(gauss_normal(c, t * x), gauss_normal(c, x), atol=1e-9)


def test_boundary_map_examples():
    B = k1_to_kinf_map()
    x = np.array([0.3, -0.7])
    y = boundary_map(B, chart(1, 2), chart(INF, 2), x)
    np.testing.assert_allclose(y, [0.3 + 0.7, 0.3 - 0.7], atol=1e-15)
    with pytest.raises(NotOnTargetGraphError):
        boundary_map(np.diag([1.0, 2.0, 1.0]), chart(1.5, 2), chart(1.5, 2), [1.0, 1.0])
    with pytest.raises(DimensionMismatchError):
        boundary_map(np.eye(4), chart(1.5, 2), chart(1.5, 2), [1.0, 1.0])


def test_boundary_map_inverse_roundtrip():
    B = k1_to_kinf_map()
    Binv = np.linalg.inv(B)
    rng = np.random.default_rng(5)
    for x in rng.standard_normal((200, 2)):
        y = boundary_map(B, chart(1, 2), chart(INF, 2), x)
        back = boundary_map(Binv, chart(INF, 2), chart(1, 2), y)
        np.testing.assert_allclose(back, x, atol=1e-12)


def test_boundary_map_of_automorphism_permutes_strata():
    rng = np.random.default_rng(6)
    for s in range(200):
        n = int(rng.integers(2, 6))
        p = [1.5, 3.0][s % 2]
        spec = ConeSpec(Exponent(p), n + 1)
        a = random_automorphism(spec, s)
        x = rng.standard_normal(n)
        zeros = rng.choice(n, size=int(rng.integers(1, n)), replace=False)
        x[zeros] = 0.0
        y = boundary_map(a, chart(p, n), chart(p, n), x)
        tau = a.stratum_map()
        assert locus_membership(y) == frozenset(int(tau[i]) for i in locus_membership(x))
        assert norm(y, p) == pytest.approx(a.alpha * norm(x, p), rel=1e-13)


def test_locus_membership():
    assert locus_membership([1.0, 0.0, 2.0]) == frozenset({1})
    assert locus_membership([1e-13, 1.0]) == frozenset({0})
    assert locus_membership([1.0, 1.0]) == frozenset()
    with pytest.raises(ZeroVectorError):
        locus_membership([0.0, 0.0])
