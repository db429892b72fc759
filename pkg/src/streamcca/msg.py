"""Inexact matrix stochastic gradient (MSG) for CCA.

Iterates live in the convex set ``{M : ||M||_2 <= 1, ||M||_* <= k}``. Each
step adds a scaled rank-one gradient and projects back in Frobenius norm,
which reduces to projecting the singular values onto a capped box with a sum
budget. The capped variant additionally keeps only the ``K`` largest
singular values after the projection.
"""

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import InputError
from .loop import as_schedule, drive
from .spectral import project_capped_box_sum, svd_thin


@dataclass(frozen=True)
class MsgState:
    M: np.ndarray
    iter: int
    avg_sum: np.ndarray
    k: int
    cap_rank: Optional[int] = None

    @classmethod
    def initial(cls, d_x, d_y, k, cap_rank=None):
        if k < 1 or k > min(d_x, d_y):
            raise InputError(f"k must lie in [1, {min(d_x, d_y)}], got {k}")
        if cap_rank is not None and cap_rank < k:
            raise InputError(f"cap_rank ({cap_rank}) must be at least k ({k})")
        return cls(np.zeros((d_x, d_y)), 0, np.zeros((d_x, d_y)), k, cap_rank)

    @property
    def average(self):
        """Mean of the post-step iterates; zero before the first step."""
        if self.iter == 0:
            return np.zeros_like(self.M)
        return self.avg_sum / self.iter


def project_F(M, k):
    """Frobenius projection onto ``{||M||_2 <= 1, ||M||_* <= k}``."""
    svd = svd_thin(M)
    sigma = project_capped_box_sum(svd.singular_values, k)
    return (svd.left * sigma) @ svd.right.T


def cap_rank_truncate(M, K):
    """Zero all but the ``K`` largest singular values of ``M``."""
    if K < 1:
        raise InputError(f"K must be at least 1, got {K}")
    svd = svd_thin(M)
    if K >= svd.singular_values.size:
        return np.array(M, dtype=np.float64)
    return (svd.left[:, :K] * svd.singular_values[:K]) @ svd.right[:, :K].T


def _project_and_cap(M, k, K):
    svd = svd_thin(M)
    sigma = project_capped_box_sum(svd.singular_values, k)
    if K is not None:
        sigma[K:] = 0.0
    return (svd.left * sigma) @ svd.right.T


def msg_step(state: MsgState, grad, eta: float) -> MsgState:
    """``M <- P_F(M + eta * grad)``, optionally rank-capped, then accumulate."""
    if not eta > 0:
        raise InputError(f"step size must be positive, got {eta}")
    G = grad.matrix if hasattr(grad, "matrix") else np.asarray(grad, dtype=np.float64)
    M = _project_and_cap(state.M + eta * G, state.k, state.cap_rank)
    return replace(state, M=M, iter=state.iter + 1, avg_sum=state.avg_sum + M)


def theory_step_size(G, k, T):
    """Constant step ``2 sqrt(k) / (G sqrt(T))``."""
    return 2.0 * math.sqrt(k) / (G * math.sqrt(T))


def run_msg(stream, whitener_x, whitener_y, *, k, T, eta, cap_rank=None,
            eval_every=None, hook=None):
    """Run MSG-CCA for ``T`` samples and return the averaged iterate.

    Parameters
    ----------
    stream : iterable of (x, y)
        Training pairs; the auxiliary samples must already be folded into
        the whiteners.
    whitener_x, whitener_y : StreamingWhitener
        Updated in place as samples arrive.
    k : int
        Target number of canonical directions.
    T : int
        Number of iterations.
    eta : float or callable
        Constant step size, or a schedule ``t -> eta_t`` with ``t`` from 1.
    cap_rank : int, optional
        Keep at most this many singular values in every iterate.
    eval_every, hook
        ``hook(snapshot)`` is called every ``eval_every`` iterations and
        after the last one.

    Returns
    -------
    M_bar : ndarray, shape (d_x, d_y)
    state : MsgState
    """
    schedule = as_schedule(eta)
    state = MsgState.initial(whitener_x.dim, whitener_y.dim, k, cap_rank)

    def step(s, grad, t):
        return msg_step(s, grad, schedule(t))

    def snapshot(s):
        return s.average.copy(), s.M.copy()

    state = drive(stream, whitener_x, whitener_y, T, step, state, snapshot, eval_every, hook)
    return state.average, state
