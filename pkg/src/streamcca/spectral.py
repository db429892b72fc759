"""Dense spectral kernels and the two spectrum-level projections.

Every solver in the package reduces its projection step to one of

* :func:`project_capped_box_sum` -- Euclidean projection of a spectrum onto
  ``{v : 0 <= v_i <= 1, sum(v) <= k}`` (used on singular values), or
* :func:`entropy_cap` -- relative-entropy projection of a spectrum onto
  ``{v : 0 <= v_i <= cap, sum(v) = trace_target}`` (used on eigenvalues).

All functions are pure and operate on float64 arrays.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, InfeasibleError, InputError, SingularityError

SYM_TOL = 1e-8
LOG_FLOOR = 1e-12


@dataclass(frozen=True)
class SymEig:
    """Eigen-decomposition with eigenvalues sorted in descending order."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T


@dataclass(frozen=True)
class ThinSvd:
    """Thin SVD ``A = left @ diag(singular_values) @ right.T``."""

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray

    def reconstruct(self):
        return (self.left * self.singular_values) @ self.right.T


def _as_finite(A, name="A"):
    A = np.asarray(A, dtype=np.float64)
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} has non-finite entries")
    return A


def _as_symmetric(A, name="A"):
    A = _as_finite(A, name)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"{name} must be square, got shape {A.shape}")
    scale = 1.0 + np.max(np.abs(A), initial=0.0)
    if np.max(np.abs(A - A.T), initial=0.0) > SYM_TOL * scale:
        raise InputError(f"{name} is not symmetric")
    return 0.5 * (A + A.T)


def _descending(values):
    # stable sort on the negated values keeps ties in original index order
    return np.argsort(-values, kind="stable")


def sym_eig(A) -> SymEig:
    """Eigen-decomposition of a symmetric matrix, eigenvalues descending.

    The input is symmetrized as ``(A + A.T) / 2`` after checking that it is
    symmetric to within ``1e-8`` (relative to its largest entry).
    """
    A = _as_symmetric(A)
    w, V = np.linalg.eigh(A)
    order = _descending(w)
    return SymEig(w[order], V[:, order])


def svd_thin(A) -> ThinSvd:
    """Thin SVD with ``m = min(d1, d2)`` singular triplets, descending."""
    A = _as_finite(A)
    if A.ndim != 2:
        raise InputError(f"expected a matrix, got shape {A.shape}")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    order = _descending(s)
    return ThinSvd(U[:, order], s[order], Vt[order].T)


def spectral_norm(A):
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def inv_sqrt_psd(A, floor=0.0):
    """Inverse square root of ``A + floor * I``.

    Parameters
    ----------
    A : array_like, shape (d, d)
        Symmetric positive (semi-)definite matrix.
    floor : float
        Non-negative ridge added to the diagonal before factorizing.

    Returns
    -------
    W : ndarray, shape (d, d)
        Symmetric positive definite with ``W (A + floor I) W = I``.

    Raises
    ------
    SingularityError
        If the smallest eigenvalue of ``A + floor * I`` is not positive.
    """
    if floor < 0:
        raise InputError(f"floor must be non-negative, got {floor}")
    eig = sym_eig(A)
    lam = eig.eigenvalues + floor
    if lam[-1] <= 0:
        raise SingularityError(
            f"matrix is not positive definite: smallest eigenvalue {lam[-1]:.3e}"
        )
    V = eig.eigenvectors
    return (V / np.sqrt(lam)) @ V.T


def sqrt_psd(A):
    """Principal square root of a PSD matrix (negative rounding noise clipped)."""
    eig = sym_eig(A)
    V = eig.eigenvectors
    return (V * np.sqrt(np.clip(eig.eigenvalues, 0.0, None))) @ V.T


def sym_exp(A):
    """Matrix exponential of a symmetric matrix via its eigen-decomposition."""
    eig = sym_eig(A)
    V = eig.eigenvectors
    return (V * np.exp(eig.eigenvalues)) @ V.T


def sym_log(A, eig_floor=LOG_FLOOR):
    """Matrix logarithm of an SPD matrix; eigenvalues below ``eig_floor`` are raised to it."""
    if eig_floor <= 0:
        raise InputError("eig_floor must be positive")
    eig = sym_eig(A)
    V = eig.eigenvectors
    return (V * np.log(np.maximum(eig.eigenvalues, eig_floor))) @ V.T


def _box_sum(s, mu):
    return np.clip(s - mu, 0.0, 1.0).sum(axis=-1)


def project_capped_box_sum(s, k):
    """Euclidean projection onto ``{v : 0 <= v_i <= 1, sum(v) <= k}``.

    If clipping to the unit box already satisfies the sum constraint that is
    the answer. Otherwise the answer is ``clip(s - mu, 0, 1)`` where ``mu > 0``
    solves ``sum(clip(s - mu, 0, 1)) = k``. That function of ``mu`` is
    piecewise linear with kinks at ``s_i - 1`` and ``s_i``, so ``mu`` is
    found exactly by locating the bracketing pair of kinks and interpolating.

    Parameters
    ----------
    s : array_like, shape (m,)
    k : float
        Sum budget, ``k > 0``.

    Returns
    -------
    v : ndarray, shape (m,)
    """
    if not k > 0:
        raise InputError(f"k must be positive, got {k}")
    s = _as_finite(s, "s").ravel()
    v = np.clip(s, 0.0, 1.0)
    if v.sum() <= k:
        return v

    kinks = np.concatenate((s - 1.0, s))
    kinks = np.unique(kinks[kinks > 0.0])
    points = np.concatenate(([0.0], kinks))
    f = _box_sum(s[None, :], points[:, None])
    # f is nonincreasing; f[0] > k and f[-1] == 0 < k
    j = int(np.argmax(f <= k))
    lo, hi = points[j - 1], points[j]
    f_lo, f_hi = f[j - 1], f[j]
    if f_hi == k:
        mu = hi
    else:
        mu = lo + (f_lo - k) * (hi - lo) / (f_lo - f_hi)
    return np.clip(s - mu, 0.0, 1.0)


def entropy_cap(lam, cap, trace_target):
    """Relative-entropy projection of a descending spectrum onto a capped simplex.

    The target set is ``{v : 0 <= v_i <= cap, sum(v) = trace_target}``. The
    solution sets the ``c`` largest entries to ``cap`` and rescales the rest
    by a common factor, with ``c`` the smallest count for which no rescaled
    entry exceeds ``cap``.

    Raises
    ------
    InfeasibleError
        If ``len(lam) * cap < trace_target``.
    DegenerateError
        If positive mass must be spread over entries that are all zero.
    """
    lam = _as_finite(lam, "lam").ravel()
    m = lam.size
    if not 0 < cap <= 1:
        raise InputError(f"cap must lie in (0, 1], got {cap}")
    if not trace_target > 0:
        raise InputError(f"trace_target must be positive, got {trace_target}")
    if m * cap < trace_target - 1e-9:
        raise InfeasibleError(
            f"{m} entries capped at {cap} cannot reach trace {trace_target}"
        )
    if np.any(lam < 0):
        raise InputError("spectrum must be non-negative")
    if np.any(np.diff(lam) > 0):
        raise InputError("spectrum must be sorted in descending order")

    # suffix sums: tail[c] = sum(lam[c:])
    tail = np.concatenate((np.cumsum(lam[::-1])[::-1], [0.0]))
    hit_zero_tail = False
    for c in range(m + 1):
        remaining = trace_target - c * cap
        if remaining < -1e-12:
            break
        if tail[c] > 0:
            scale = max(remaining, 0.0) / tail[c]
            if c == m or lam[c] * scale <= cap:
                out = np.empty(m)
                out[:c] = cap
                out[c:] = lam[c:] * scale
                return out
        elif abs(remaining) <= 1e-12:
            out = np.zeros(m)
            out[:c] = cap
            return out
        else:
            hit_zero_tail = True
    if hit_zero_tail:
        raise DegenerateError("remaining entries are all zero but carry positive mass")
    raise InfeasibleError("no cap count satisfies the constraints")
