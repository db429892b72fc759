import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from streamcca.errors import InputError
from streamcca.oracle import (
    dilate, dilate_matrix, gradient_error, gradient_norm_bound, inexact_gradient,
    reference_gradient,
)
from streamcca.spectral import sym_eig
from streamcca.whitening import StreamingWhitener


def test_identity_whiteners_give_outer_product():
    x, y = np.array([1.0, 2.0]), np.array([3.0, -1.0, 0.5])
    g = inexact_gradient(np.eye(2), np.eye(3), x, y)
    assert np.allclose(g.matrix, np.outer(x, y))
    assert np.allclose(inexact_gradient([[2.0]], [[3.0]], [1.0], [1.0]).matrix, [[6.0]])


def test_shape_mismatch():
    with pytest.raises(InputError):
        inexact_gradient(np.eye(2), np.eye(2), np.ones(3), np.ones(2))


def test_frobenius_norm_factorizes():
    rng = np.random.default_rng(0)
    Wx, Wy = rng.standard_normal((4, 4)), rng.standard_normal((3, 3))
    x, y = rng.standard_normal(4), rng.standard_normal(3)
    g = inexact_gradient(Wx, Wy, x, y)
    expect = np.linalg.norm(Wx @ x) * np.linalg.norm(Wy @ y)
    assert g.frobenius_norm() == pytest.approx(expect, abs=1e-10)
    assert np.linalg.norm(g.matrix) == pytest.approx(expect, abs=1e-10)


def test_capped_whitener_is_accepted():
    X = np.random.default_rng(1).standard_normal((30, 5))
    cw = StreamingWhitener.from_aux(X).capped_whitening_matrix(2)
    x = X[0]
    g = inexact_gradient(cw, np.eye(5), x, x)
    assert np.allclose(g.matrix, np.outer(cw.todense() @ x, x))


def test_reference_gradient_and_error():
    x, y = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    d = reference_gradient(np.eye(2), np.eye(2), x, y)
    assert np.allclose(d.matrix, [[0, 1], [0, 0]])
    assert gradient_error(d, d) == 0.0
    e1 = np.array([1.0, 0.0])
    assert gradient_error(inexact_gradient(np.eye(2), np.eye(2), e1, e1),
                          inexact_gradient(np.zeros((2, 2)), np.eye(2), e1, e1)) == pytest.approx(1.0)


def test_gradient_error_matches_dense_svd():
    rng = np.random.default_rng(2)
    W = [rng.standard_normal((4, 4)) for _ in range(4)]
    x, y = rng.standard_normal(4), rng.standard_normal(4)
    g, d = inexact_gradient(W[0], W[1], x, y), inexact_gradient(W[2], W[3], x, y)
    dense = np.linalg.svd(g.matrix - d.matrix, compute_uv=False)[0]
    assert gradient_error(g, d) == pytest.approx(dense, abs=1e-10)


def test_dilation_small_cases():
    g = inexact_gradient([[1.0]], [[1.0]], [2.0], [1.0])
    C = dilate(g)
    assert np.allclose(C.matrix, [[0, 2], [2, 0]])
    assert np.allclose(sym_eig(C.matrix).eigenvalues, [2, -2])
    assert np.allclose(dilate_matrix(np.zeros((2, 3))), 0.0)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2 ** 20), dx=st.integers(1, 6), dy=st.integers(1, 6))
def test_dilation_spectrum_property(seed, dx, dy):
    rng = np.random.default_rng(seed)
    g = inexact_gradient(np.eye(dx), np.eye(dy), rng.standard_normal(dx), rng.standard_normal(dy))
    C = dilate(g)
    sigma = g.frobenius_norm()
    expect = np.zeros(dx + dy)
    expect[0], expect[-1] = sigma, -sigma
    assert np.allclose(sym_eig(C.matrix).eigenvalues, expect, atol=1e-8)
    half = (np.outer(C.plus, C.plus) - np.outer(C.minus, C.minus)) / 2
    assert np.allclose(half, C.matrix)


def test_gradient_norm_bound():
    assert gradient_norm_bound(1.0, 0.25, 0.25) == pytest.approx(8.0)
