"""Synthetic two-view Gaussian data with known canonical correlations."""

import numpy as np

from ..errors import InputError
from ..evaluation import GroundTruth
from ..spectral import sqrt_psd

# fixed stream ids so that every consumer of a seed gets an independent generator
_STREAMS = {"generate": 0, "mixing": 1, "rounding": 2}


def named_rng(seed, stream):
    """Independent generator for ``(seed, stream)``; ``stream`` names a use site."""
    return np.random.default_rng([int(seed), _STREAMS[stream]])


def random_orthonormal(rng, d, k):
    Q, R = np.linalg.qr(rng.standard_normal((d, k)))
    return Q * np.sign(np.diag(R))


def _mixing(rng, d, cond):
    if cond == 1:
        return np.eye(d)
    Q = random_orthonormal(rng, d, d)
    scales = np.logspace(-np.log10(cond), 0.0, d)
    return (Q * scales) @ Q.T


def gen_synthetic(d_x, d_y, rho, n, cond_x=1.0, cond_y=1.0, seed=0):
    """Draw ``n`` paired samples whose whitened cross-covariance has singular values ``rho``.

    The latent pair ``(z_x, z_y)`` is Gaussian with identity auto-covariances
    and cross-covariance ``Phi diag(rho) Psi^T`` for random orthonormal
    ``Phi``, ``Psi``. The views are then mixed by fixed SPD matrices ``L_x``,
    ``L_y`` whose eigenvalues are log-spaced in ``[1/cond, 1]``; mixing does
    not change the canonical correlations.

    Returns
    -------
    X : ndarray, shape (n, d_x)
    Y : ndarray, shape (n, d_y)
    truth : GroundTruth
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=np.float64))
    k_true = rho.size
    if k_true < 1 or k_true > min(d_x, d_y):
        raise InputError(f"need 1 <= len(rho) <= min(d_x, d_y) = {min(d_x, d_y)}")
    if np.any(rho < 0) or np.any(rho >= 1):
        raise InputError("canonical correlations must lie in [0, 1)")
    if cond_x < 1 or cond_y < 1:
        raise InputError("condition numbers must be at least 1")
    if n < 1:
        raise InputError("n must be positive")

    mix_rng = named_rng(seed, "mixing")
    Phi = random_orthonormal(mix_rng, d_x, k_true)
    Psi = random_orthonormal(mix_rng, d_y, k_true)
    Lx = _mixing(mix_rng, d_x, cond_x)
    Ly = _mixing(mix_rng, d_y, cond_y)

    cross = (Phi * rho) @ Psi.T
    d = d_x + d_y
    Sigma = np.eye(d)
    Sigma[:d_x, d_x:] = cross
    Sigma[d_x:, :d_x] = cross.T
    root = sqrt_psd(Sigma)

    Z = named_rng(seed, "generate").standard_normal((n, d)) @ root
    X = Z[:, :d_x] @ Lx
    Y = Z[:, d_x:] @ Ly
    truth = GroundTruth(C_x=Lx @ Lx, C_y=Ly @ Ly, C_xy=Lx @ cross @ Ly, rho=np.sort(rho)[::-1])
    return X, Y, truth
