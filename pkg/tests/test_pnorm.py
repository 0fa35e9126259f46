import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pcones.errors import (
    NotTwiceDifferentiableError,
    PreconditionError,
    UnsupportedExponentError,
    ZeroVectorError,
)
from pcones.finitediff import fd_gradient, fd_jacobian
from pcones.pnorm import (
    Exponent,
    Smoothness,
    c2_divergence_probe,
    classify_c2,
    conjugate,
    gradient,
    hessian,
    loglog_slope,
    norm,
)

INF = Exponent(math.inf)


# --- exponent -------------------------------------------------------------


@pytest.mark.parametrize(
    "p, q",
    [(2.0, 2.0), (1.0, math.inf), (math.inf, 1.0), (1.5, 3.0), (3.0, 1.5)],
)
def test_conjugate_values(p, q):
    assert conjugate(p) == Exponent(q)


def test_conjugate_involution_exact_cases():
    for p in (1.0, 2.0, math.inf):
        assert conjugate(conjugate(p)) == Exponent(p)


@given(st.floats(min_value=1.0001, max_value=60.0))
def test_conjugate_involution(p):
    back = conjugate(conjugate(p)).value
    assert back == pytest.approx(p, rel=1e-13)
    q = conjugate(p).value
    assert 1 / p + 1 / q == pytest.approx(1.0, abs=1e-14)


def test_exponent_parse_and_reject():
    assert Exponent.parse("inf").is_infinite
    assert Exponent.parse("1.5").value == 1.5
    with pytest.raises(UnsupportedExponentError):
        Exponent(0.5)
    with pytest.raises(UnsupportedExponentError):
        Exponent.parse("abc")


# --- norm -----------------------------------------------------------------


def test_norm_examples():
    assert norm([3, 4], 2) == 5.0
    assert norm([1, 1, 1], 3) == pytest.approx(3 ** (1 / 3), abs=1e-15)
    assert norm([1, 1, 1], 3) == pytest.approx(1.442250, abs=1e-6)
    assert norm([1, -7, 2], INF) == 7.0
    assert norm([0, 0], 1.5) == 0.0


def test_norm_overflow_guard():
    x = np.array([1e300, 1e300])
    assert norm(x, 50) == pytest.approx(1e300 * 2 ** (1 / 50), rel=1e-14)
    assert np.isfinite(norm([1e10, 3e10], 50))


def test_norm_batched_matches_rows():
    X = np.random.default_rng(0).standard_normal((7, 4))
    out = norm(X, 1.7)
    for row, v in zip(X, out):
        assert v == pytest.approx(norm(row, 1.7), rel=1e-15)


@settings(max_examples=200)
@given(
    arrays(float, 4, elements=st.floats(-1e3, 1e3)),
    st.floats(1.0, 20.0) | st.just(math.inf),
    st.floats(1e-3, 1e3),
)
def test_norm_homogeneous(x, p, t):
    assert norm(t * x, p) == pytest.approx(t * norm(x, p), rel=1e-12, abs=1e-300)


# --- gradient -------------------------------------------------------------


def test_gradient_examples():
    # values frozen from central differences of the norm at step 1e-6
    x = np.array([1.0, 1.0])
    fd = fd_gradient(lambda y: norm(y, 3), x)
    np.testing.assert_allclose(fd, [0.629961, 0.629961], atol=1e-6)
    np.testing.assert_allclose(gradient(x, 3), fd, atol=1e-9)
    np.testing.assert_allclose(gradient([1.0, 0.0], 1.5), [1.0, 0.0])
    np.testing.assert_allclose(gradient([0.0, -2.0], 3), [0.0, -1.0], atol=1e-15)
    np.testing.assert_allclose(fd_gradient(lambda y: norm(y, 3), np.array([0.0, -2.0])), [0.0, -1.0], atol=1e-9)


def test_gradient_errors():
    with pytest.raises(ZeroVectorError):
        gradient([0.0, 0.0], 3)
    for p in (1, math.inf):
        with pytest.raises(UnsupportedExponentError):
            gradient([1.0, 2.0], p)


def _random_points(seed, count, n_max=5, lo=0.1):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(2, n_max + 1))
        x = rng.uniform(lo, 3.0, n) * rng.choice([-1.0, 1.0], n)
        p = float(rng.uniform(1.1, 5.0))
        yield x, p


def test_gradient_matches_finite_differences():
    for x, p in _random_points(1, 200):
        fd = fd_gradient(lambda y: norm(y, p), x)
        np.testing.assert_allclose(gradient(x, p), fd, rtol=1e-7, atol=1e-9)


def test_gradient_fd_error_is_second_order():
    x, p = np.array([0.7, -1.3, 0.4]), 2.7
    g = gradient(x, p)
    errs = [np.abs(fd_gradient(lambda y: norm(y, p), x, h) - g).max() for h in (1e-2, 5e-3)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


@settings(max_examples=300)
@given(arrays(float, 3, elements=st.floats(-1e3, 1e3)), st.floats(1.05, 30.0))
def test_euler_identity_and_dual_norm(x, p):
    if np.abs(x).max() < 1e-100:
        return
    g = gradient(x, p)
    assert g @ x == pytest.approx(norm(x, p), rel=1e-10)
    assert norm(g, conjugate(p)) == pytest.approx(1.0, rel=1e-10)


# --- hessian --------------------------------------------------------------


def test_hessian_examples():
    x = np.array([1.0, 1.0])
    H = hessian(x, 3)
    fd = fd_jacobian(lambda y: gradient(y, 3), x, 1e-5)
    assert fd[0, 1] == pytest.approx(-2 * 2 ** (-5 / 3), abs=1e-8)
    assert H[0, 1] == pytest.approx(-0.629961, abs=1e-6)
    assert H[0, 1] == pytest.approx(fd[0, 1], abs=1e-9)
    assert hessian([1.0, 0.0], 3)[0, 1] == 0.0


@pytest.mark.parametrize("x", [[1.0, 2.0], [0.3, -1.0, 4.0], [0.0, 2.0, -1.0]])
def test_hessian_p2_annihilates_x(x):
    np.testing.assert_allclose(hessian(x, 2) @ np.asarray(x), 0.0, atol=1e-15)


def test_hessian_errors():
    with pytest.raises(NotTwiceDifferentiableError):
        hessian([1.0, 0.0], 1.5)
    with pytest.raises(ZeroVectorError):
        hessian([0.0, 0.0], 3)
    with pytest.raises(UnsupportedExponentError):
        hessian([1.0, 1.0], math.inf)


def test_hessian_symmetric_psd_nullspace():
    for x, p in _random_points(2, 200):
        H = hessian(x, p)
        np.testing.assert_array_equal(H, H.T)
        np.testing.assert_allclose(H @ x, 0.0, atol=1e-9)
        assert np.linalg.eigvalsh(H)[0] >= -1e-12


def test_hessian_matches_finite_differences():
    for x, p in _random_points(3, 200):
        fd = fd_jacobian(lambda y: gradient(y, p), x, 1e-5)
        H = hessian(x, p)
        assert np.linalg.norm(H - fd) <= 1e-6 * np.linalg.norm(H)


# --- C^2 classification and divergence probe -----------------------------


def test_classify_c2_examples():
    assert classify_c2([1.0, 0.0, 2.0], 1.5) is Smoothness.NOT_TWICE_SMOOTH
    assert classify_c2([1.0, 1.0], 1.5) is Smoothness.TWICE_SMOOTH
    assert classify_c2([1.0, 0.0], 3) is Smoothness.TWICE_SMOOTH
    with pytest.raises(ZeroVectorError):
        classify_c2([0.0, 0.0], 1.5)


STEPS = [10.0 ** -k for k in range(2, 7)]


@pytest.mark.parametrize("p, expected", [(1.5, -0.5), (1.9, -0.1)])
def test_probe_slope(p, expected):
    pts = c2_divergence_probe([1.0, 0.0], p, 1, 1, STEPS)
    assert loglog_slope(pts) == pytest.approx(expected, abs=0.05)


def test_probe_bounded_for_euclidean():
    pts = c2_divergence_probe([1.0, 0.0], 2, 1, 1, STEPS)
    assert max(abs(q) for _, q in pts) < 2.0
    assert loglog_slope(pts) == pytest.approx(0.0, abs=0.05)


def test_probe_preconditions():
    with pytest.raises(PreconditionError):
        c2_divergence_probe([1.0, 0.5], 1.5, 1, 1, STEPS)
    with pytest.raises(PreconditionError):
        c2_divergence_probe([1.0, 0.0], 1.5, 1, 1, STEPS[::-1])
    with pytest.raises(UnsupportedExponentError):
        c2_divergence_probe([1.0, 0.0], 1.0, 1, 1, STEPS)
    with pytest.raises(PreconditionError):
        loglog_slope([(1e-2, 1.0), (1e-3, 2.0)])


def test_probe_cross_direction_vanishes():
    pts = c2_divergence_probe([1.0, 0.0], 1.5, 1, 0, STEPS)
    assert all(q == 0.0 for _, q in pts)
    assert math.isnan(loglog_slope(pts))


def test_classify_agrees_with_probe():
    # 100 seeds: a random point with one coordinate zeroed
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 5))
        x = rng.uniform(0.2, 2.0, n) * rng.choice([-1.0, 1.0], n)
        i = int(rng.integers(n))
        x[i] = 0.0
        p = float(rng.choice([rng.uniform(1.1, 1.9), rng.uniform(2.0, 5.0)]))
        pts = c2_divergence_probe(x, p, i, i, STEPS)
        if classify_c2(x, p) is Smoothness.NOT_TWICE_SMOOTH:
            assert loglog_slope(pts) < -0.02
        else:
            assert max(abs(q) for _, q in pts) < 10.0
