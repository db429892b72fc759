"""Randomized rounding of fractional iterates and CCA factor extraction.

Both rounders pick a random subset of singular (or eigen) directions whose
inclusion probabilities equal the fractional spectrum. Systematic sampling
gives exactly those marginals, so every linear objective is preserved in
expectation, and it never selects more than ``ceil(sum(w))`` indices.
"""

import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import InputError
from .spectral import svd_thin, sym_eig

CLIP_TOL = 1e-9


@dataclass(frozen=True)
class CcaSolution:
    """Rank-``k`` CCA factors.

    ``U`` and ``V`` have orthonormal columns (whitened coordinates);
    ``U_tilde = Wx @ U`` and ``V_tilde = Wy @ V`` are the directions in the
    original coordinates, filled in by :func:`extract_factors`.
    """

    U: np.ndarray
    V: np.ndarray
    U_tilde: Optional[np.ndarray] = None
    V_tilde: Optional[np.ndarray] = None
    heuristic: bool = False

    @property
    def selected_count(self):
        return self.U.shape[1]

    @property
    def lifted(self):
        return self.U @ self.V.T


def sample_k_subset(w, k, rng):
    """Systematic sampling of indices with inclusion probabilities ``w``.

    Draw ``u`` uniform on ``(0, 1]`` and select index ``i`` whenever some
    ``u + m`` (``m = 0, 1, ...``) lands in ``(P_{i-1}, P_i]``, where ``P`` is
    the prefix sum of ``w``.

    Parameters
    ----------
    w : array_like
        Weights in ``[0, 1]`` (violations up to ``1e-9`` are clipped) with
        ``sum(w) <= k``.
    k : int
    rng : numpy.random.Generator

    Returns
    -------
    ndarray of int
        Selected indices, ascending.
    """
    w = np.asarray(w, dtype=np.float64).ravel()
    if np.any(w < -CLIP_TOL) or np.any(w > 1 + CLIP_TOL):
        raise InputError("weights must lie in [0, 1]")
    w = np.clip(w, 0.0, 1.0)
    total = w.sum()
    if total > k + 1e-8:
        raise InputError(f"weights sum to {total}, more than k = {k}")
    if total <= 0:
        return np.zeros(0, dtype=int)
    P = np.cumsum(w)
    u = 1.0 - rng.random()
    points = u + np.arange(int(np.ceil(total)) + 1)
    points = points[points <= P[-1]]
    idx = np.searchsorted(P, points, side="left")
    return np.unique(np.minimum(idx, w.size - 1))


def _check_spectrum(sigma):
    if sigma.size and sigma[0] > 1 + CLIP_TOL:
        raise InputError(f"spectral norm {sigma[0]} exceeds 1")
    sigma = np.clip(sigma, 0.0, 1.0)
    return sigma


def round_msg(M_bar, k, rng):
    """Round a fractional MSG average to a rank-``<= k`` partial isometry.

    Returns
    -------
    M_tilde : ndarray
        ``sum_{i in S} u_i v_i^T``; its expectation over ``rng`` is ``M_bar``.
    solution : CcaSolution
        The selected singular vectors (no whitened factors yet).
    """
    svd = svd_thin(M_bar)
    sigma = _check_spectrum(svd.singular_values)
    S = sample_k_subset(sigma, k, rng)
    U, V = svd.left[:, S], svd.right[:, S]
    return U @ V.T, CcaSolution(U, V)


def round_meg(N_bar, k, rng):
    """Round a density-scaled MEG average to a rank-``<= k`` orthogonal projection.

    The expectation of the output is ``k * N_bar``.
    """
    eig = sym_eig(N_bar)
    w = _check_spectrum(k * eig.eigenvalues)
    S = sample_k_subset(w, k, rng)
    V = eig.eigenvectors[:, S]
    return V @ V.T


def top_k_factors(M, k):
    """Deterministic factors from the top ``k`` singular vectors of ``M``."""
    svd = svd_thin(M)
    return CcaSolution(svd.left[:, :k], svd.right[:, :k])


def extract_factors(solution: CcaSolution, Wx, Wy) -> CcaSolution:
    """Map whitened factors back to the original coordinates.

    No re-orthonormalization is applied, so ``U_tilde^T C_x U_tilde`` measures
    how far the final whitener is from the population one.
    """
    U, V = solution.U, solution.V
    if Wx.shape[0] != U.shape[0] or Wy.shape[0] != V.shape[0]:
        raise InputError(
            f"whitener sizes ({Wx.shape[0]}, {Wy.shape[0]}) do not match "
            f"factor sizes ({U.shape[0]}, {V.shape[0]})"
        )
    return replace(solution, U_tilde=np.asarray(Wx @ U), V_tilde=np.asarray(Wy @ V))


def meg_factor_heuristic(P, d_x, tol=1e-8):
    """Split the range of a projection on the dilated space into view factors.

    Each basis vector ``(a; b)`` of ``range(P)`` gives ``u = sqrt(2) a`` and
    ``v = sqrt(2) b``; the two blocks are then orthonormalized separately.
    This is exact when ``P`` projects onto top eigenvectors of a dilation
    and carries no guarantee otherwise, so the result is marked heuristic.
    Columns whose ``a`` or ``b`` block is below ``tol`` in norm are dropped
    with a warning.
    """
    P = np.asarray(P, dtype=np.float64)
    eig = sym_eig(P)
    basis = eig.eigenvectors[:, eig.eigenvalues > 0.5]
    A = np.sqrt(2.0) * basis[:d_x]
    B = np.sqrt(2.0) * basis[d_x:]
    keep = (np.linalg.norm(A, axis=0) >= tol) & (np.linalg.norm(B, axis=0) >= tol)
    if not np.all(keep):
        warnings.warn(
            f"dropping {int((~keep).sum())} degenerate direction(s) with a near-zero block",
            RuntimeWarning,
            stacklevel=2,
        )
    A, B = A[:, keep], B[:, keep]
    return CcaSolution(_orthonormalize(A), _orthonormalize(B), heuristic=True)


def _orthonormalize(A):
    if A.shape[1] == 0:
        return A
    Q, R = np.linalg.qr(A)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs
