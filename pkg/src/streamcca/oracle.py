"""Inexact first-order gradient estimates and their self-adjoint dilation.

A gradient is always rank one, ``left @ right.T``, and is carried in that
factored form; :attr:`GradientEstimate.matrix` materializes it on demand.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .spectral import svd_thin


@dataclass(frozen=True)
class GradientEstimate:
    left: np.ndarray
    right: np.ndarray

    @property
    def matrix(self):
        return np.outer(self.left, self.right)

    @property
    def shape(self):
        return (self.left.size, self.right.size)

    def frobenius_norm(self):
        return float(np.linalg.norm(self.left) * np.linalg.norm(self.right))


@dataclass(frozen=True)
class DilatedGradient:
    """``[[0, g], [g^T, 0]]`` for a rank-one ``g = a b^T``.

    Also equal to ``(p p^T - q q^T) / 2`` with ``p = (a; b)``, ``q = (a; -b)``;
    both vectors are kept in :attr:`plus` and :attr:`minus`.
    """

    matrix: np.ndarray
    plus: np.ndarray = field(repr=False)
    minus: np.ndarray = field(repr=False)
    d_x: int = 0


def _apply(W, v):
    # works for dense arrays and CappedWhitener alike
    return np.asarray(W @ v, dtype=np.float64)


def inexact_gradient(Wx, Wy, x, y) -> GradientEstimate:
    """Gradient estimate ``Wx x y^T Wy`` from one sample and the current whiteners."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if not hasattr(Wx, "shape"):
        Wx = np.asarray(Wx, dtype=np.float64)
    if not hasattr(Wy, "shape"):
        Wy = np.asarray(Wy, dtype=np.float64)
    dx, dy = Wx.shape[0], Wy.shape[0]
    if x.size != dx or y.size != dy:
        raise InputError(
            f"sample shapes ({x.size}, {y.size}) do not match whiteners ({dx}, {dy})"
        )
    return GradientEstimate(_apply(Wx, x), _apply(Wy, y))


def reference_gradient(Wx_pop, Wy_pop, x, y) -> GradientEstimate:
    """Same construction with the population whiteners; diagnostics only."""
    return inexact_gradient(Wx_pop, Wy_pop, x, y)


def gradient_error(g: GradientEstimate, d: GradientEstimate) -> float:
    """Spectral norm of ``g - d``."""
    if g.shape != d.shape:
        raise InputError(f"shape mismatch {g.shape} vs {d.shape}")
    diff = g.matrix - d.matrix
    return float(svd_thin(diff).singular_values[0]) if diff.size else 0.0


def dilate(g: GradientEstimate) -> DilatedGradient:
    a, b = g.left, g.right
    plus = np.concatenate((a, b))
    minus = np.concatenate((a, -b))
    dx = a.size
    C = np.zeros((plus.size, plus.size))
    C[:dx, dx:] = np.outer(a, b)
    C[dx:, :dx] = C[:dx, dx:].T
    return DilatedGradient(C, plus, minus, dx)


def dilate_matrix(G):
    """Dilation of an arbitrary rectangular matrix."""
    G = np.asarray(G, dtype=np.float64)
    dx, dy = G.shape
    C = np.zeros((dx + dy, dx + dy))
    C[:dx, dx:] = G
    C[dx:, :dx] = G.T
    return C


def gradient_norm_bound(B, r_x, r_y):
    """Frobenius bound ``2B / sqrt(r_x r_y)`` on the estimate once both
    empirical covariances stay above half their population floor."""
    return 2.0 * B / np.sqrt(r_x * r_y)
