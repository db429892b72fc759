"""Objectives, constraint violations, theoretical constants and the SAA baseline."""

import math
from dataclasses import dataclass

import numpy as np

from . import meg, msg
from .errors import InputError
from .rounding import CcaSolution
from .spectral import inv_sqrt_psd, spectral_norm, svd_thin
from .whitening import min_aux_size


@dataclass(frozen=True)
class GroundTruth:
    """Population second moments of a synthetic two-view distribution."""

    C_x: np.ndarray
    C_y: np.ndarray
    C_xy: np.ndarray
    rho: np.ndarray

    @property
    def d_x(self):
        return self.C_x.shape[0]

    @property
    def d_y(self):
        return self.C_y.shape[0]

    @property
    def r_x(self):
        return float(np.linalg.eigvalsh(self.C_x)[0])

    @property
    def r_y(self):
        return float(np.linalg.eigvalsh(self.C_y)[0])

    def whiteners(self):
        return inv_sqrt_psd(self.C_x), inv_sqrt_psd(self.C_y)


@dataclass(frozen=True)
class TheoryConstants:
    B: float
    r_x: float
    r_y: float
    r: float
    d_x: int
    d_y: int
    d: int          # max(d_x, d_y), enters kappa
    d_meg: int      # d_x + d_y, dimension of the dilated problem
    k: int
    T: int
    delta: float
    G: float
    kappa: float
    tau_min: int
    eta_msg: float
    eta_meg: float
    bound_msg: float
    bound_meg: float


def population_T(gt: GroundTruth):
    """Cross-covariance of the whitened views, ``C_x^{-1/2} C_xy C_y^{-1/2}``."""
    Wx, Wy = gt.whiteners()
    return Wx @ gt.C_xy @ Wy


def lifted_objective(M, T):
    """``<M, T> = Tr(M^T T)``."""
    M, T = np.asarray(M), np.asarray(T)
    if M.shape != T.shape:
        raise InputError(f"shape mismatch {M.shape} vs {T.shape}")
    return float(np.sum(M * T))


def optimum_value(T, k):
    """Sum of the ``k`` largest singular values of ``T``."""
    s = svd_thin(T).singular_values
    if k > s.size:
        raise InputError(f"k = {k} exceeds min(d_x, d_y) = {s.size}")
    return float(s[:k].sum())


def trace_objective(sol: CcaSolution, C_xy):
    """``Tr(U_tilde^T C_xy V_tilde)``."""
    if sol.U_tilde is None or sol.V_tilde is None:
        raise InputError("solution has no whitened factors; call extract_factors first")
    return float(np.trace(sol.U_tilde.T @ C_xy @ sol.V_tilde))


def orthogonality_gap(F, C):
    """``||F^T C F - I||_2``; zero for an empty factor."""
    F = np.asarray(F, dtype=np.float64)
    if F.shape[0] != np.shape(C)[0]:
        raise InputError(f"shape mismatch {F.shape} vs {np.shape(C)}")
    return spectral_norm(F.T @ C @ F - np.eye(F.shape[1]))


def empirical_moments(X, Y):
    """Uncentered second moments ``(C_x, C_y, C_xy)`` of row-stacked samples."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    n = X.shape[0]
    if n < 1 or Y.shape[0] != n:
        raise InputError("need the same positive number of samples in both views")
    return X.T @ X / n, Y.T @ Y / n, X.T @ Y / n


def saa_solve(X, Y, k, reg_lambda=0.0):
    """Sample average approximation: whiten the batch cross-covariance and take its top-``k`` SVD.

    Parameters
    ----------
    X : array_like, shape (n, d_x)
    Y : array_like, shape (n, d_y)
    k : int
    reg_lambda : float
        Ridge added to both auto-covariances.

    Returns
    -------
    solution : CcaSolution
        With ``U_tilde``, ``V_tilde`` computed from the empirical whiteners.
    value : float
        Sum of the top-``k`` singular values of the whitened cross-covariance.
    """
    Cx, Cy, Cxy = empirical_moments(X, Y)
    if not 1 <= k <= min(Cx.shape[0], Cy.shape[0]):
        raise InputError(f"k must lie in [1, {min(Cx.shape[0], Cy.shape[0])}], got {k}")
    Wx = inv_sqrt_psd(Cx, reg_lambda)
    Wy = inv_sqrt_psd(Cy, reg_lambda)
    svd = svd_thin(Wx @ Cxy @ Wy)
    U, V = svd.left[:, :k], svd.right[:, :k]
    sol = CcaSolution(U, V, Wx @ U, Wy @ V)
    return sol, float(svd.singular_values[:k].sum())


def theory_constants(B, r_x, r_y, d_x, d_y, k, T, delta=None):
    """Constants, step sizes and bounds of the convergence guarantees.

    ``delta`` defaults to ``1/sqrt(T)``; ``T = 1`` then falls back to 0.5 so
    that the auxiliary-size formula stays defined.
    """
    for name, val in (("B", B), ("r_x", r_x), ("r_y", r_y), ("d_x", d_x),
                      ("d_y", d_y), ("k", k), ("T", T)):
        if not val > 0:
            raise InputError(f"{name} must be positive, got {val}")
    if delta is None:
        delta = 1.0 / math.sqrt(T) if T > 1 else 0.5
    r = min(r_x, r_y)
    d = max(d_x, d_y)
    d_meg = d_x + d_y
    G = 2.0 * B / math.sqrt(r_x * r_y)
    kappa = 8.0 * B * B * math.sqrt(2.0 * math.log(d)) / (r * r)
    sqrt_T = math.sqrt(T)
    bound_msg = (2.0 * math.sqrt(k) * G + 2.0 * k * kappa + k * B / r) / sqrt_T
    bound_meg = 2.0 * k * math.sqrt(G * G * math.log(d_meg) / T) + 2.0 * k * kappa / sqrt_T
    return TheoryConstants(
        B=float(B), r_x=float(r_x), r_y=float(r_y), r=float(r),
        d_x=int(d_x), d_y=int(d_y), d=int(d), d_meg=int(d_meg), k=int(k), T=int(T),
        delta=float(delta), G=G, kappa=kappa,
        tau_min=min_aux_size(B, r_x, r_y, d_x, d_y, delta),
        eta_msg=msg.theory_step_size(G, k, T),
        eta_meg=meg.theory_step_size(G, d_meg, T),
        bound_msg=bound_msg,
        bound_meg=bound_meg,
    )


def _bernstein_term(B, T, d):
    return math.sqrt(2.0 * B * B / T) * math.log(d) + 2.0 * B / (3.0 * T) * math.log(d)


def generalization_bounds(tc: TheoryConstants):
    """Bounds on the trace objective gap and on both orthogonality defects
    of the extracted factors after ``T`` MSG iterations.

    Returns a dict with keys ``trace``, ``orth_x`` and ``orth_y``.
    """
    B, T, k = tc.B, tc.T, tc.k
    trace = ((2.0 * math.sqrt(k) * tc.G + 2.0 * k * tc.kappa) / math.sqrt(T)
             + k * B / (tc.r * T)
             + 2.0 * k * B / tc.r ** 2 * _bernstein_term(B, T, tc.d))
    orth_x = B / tc.r_x ** 2 * _bernstein_term(B, T, tc.d_x) + (B + 1.0) / T
    orth_y = B / tc.r_y ** 2 * _bernstein_term(B, T, tc.d_y) + (B + 1.0) / T
    return {"trace": trace, "orth_x": orth_x, "orth_y": orth_y}
