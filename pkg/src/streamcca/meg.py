"""Inexact matrix exponentiated gradient (MEG) for CCA.

The iterate is a density matrix ``N`` on the dilated space of dimension
``d = d_x + d_y``: symmetric, trace one, ``0 <= N <= I / k``. Multiplying by
``k`` maps it back to the trace-``k``, spectral-norm-one set of the
unscaled problem, which is the scale on which objectives are reported.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError, NumericalError
from .loop import as_schedule, drive
from .oracle import DilatedGradient, dilate
from .spectral import LOG_FLOOR, entropy_cap, sym_eig


@dataclass(frozen=True)
class MegState:
    N: np.ndarray
    iter: int
    avg_sum: np.ndarray
    k: int

    @classmethod
    def initial(cls, d, k):
        if not 1 <= k <= d:
            raise InputError(f"k must lie in [1, {d}], got {k}")
        return cls(np.eye(d) / d, 0, np.zeros((d, d)), k)

    @property
    def average(self):
        """Mean of ``N_0 .. N_{t-1}``; the starting point before any step."""
        if self.iter == 0:
            return self.N.copy()
        return self.avg_sum / self.iter


def _exponent_eig(N, C, eta):
    eig = sym_eig(N)
    V = eig.eigenvectors
    logN = (V * np.log(np.maximum(eig.eigenvalues, LOG_FLOOR))) @ V.T
    return sym_eig(logN + eta * C)


def _normalized_exp(mu, trace=1.0):
    # shifting the exponent by a multiple of I cancels in the normalization
    p = np.exp(mu - mu[0])
    p *= trace / p.sum()
    if not np.all(np.isfinite(p)):
        raise NumericalError("matrix exponential produced non-finite values")
    return p


def meg_update(N, C, eta):
    """``exp(log N + eta C) / Tr(exp(log N + eta C))``.

    ``C`` may be a :class:`DilatedGradient` or a plain symmetric matrix.
    """
    if not eta > 0:
        raise InputError(f"step size must be positive, got {eta}")
    C = C.matrix if isinstance(C, DilatedGradient) else np.asarray(C, dtype=np.float64)
    eig = _exponent_eig(N, C, eta)
    p = _normalized_exp(eig.eigenvalues)
    Q = eig.eigenvectors
    return (Q * p) @ Q.T


def bregman_project(N_hat, k):
    """Relative-entropy projection onto ``{Tr N = 1, 0 <= N <= I/k}``."""
    eig = sym_eig(N_hat)
    lam = np.clip(eig.eigenvalues, 0.0, None)
    lam = entropy_cap(lam, 1.0 / k, 1.0)
    V = eig.eigenvectors
    return (V * lam) @ V.T


def meg_step(state: MegState, grad, eta: float) -> MegState:
    """One MEG iteration from a rank-one gradient (or its dilation)."""
    if not eta > 0:
        raise InputError(f"step size must be positive, got {eta}")
    C = grad if isinstance(grad, DilatedGradient) else dilate(grad)
    eig = _exponent_eig(state.N, C.matrix, eta)
    p = _normalized_exp(eig.eigenvalues)
    # exponent eigenvalues come sorted descending, so p is too
    lam = entropy_cap(p, 1.0 / state.k, 1.0)
    Q = eig.eigenvectors
    N = (Q * lam) @ Q.T
    return replace(state, N=N, iter=state.iter + 1, avg_sum=state.avg_sum + state.N)


def theory_step_size(G, d, T):
    """``(1/G) log(1 + sqrt(log(d) / (G T)))`` with ``d = d_x + d_y``."""
    return math.log1p(math.sqrt(math.log(d) / (G * T))) / G


def meg_objective_scale(N, C_pop, k):
    """``k <N, C_pop>``: objective of a density-scaled iterate on the unscaled problem."""
    return float(k * np.sum(np.asarray(N) * np.asarray(C_pop)))


def run_meg(stream, whitener_x, whitener_y, *, k, T, eta, eval_every=None, hook=None):
    """Run MEG-CCA for ``T`` samples and return the averaged density matrix.

    Arguments mirror :func:`streamcca.msg.run_msg`. The returned average is
    over ``N_0 .. N_{T-1}``.
    """
    schedule = as_schedule(eta)
    state = MegState.initial(whitener_x.dim + whitener_y.dim, k)

    def step(s, grad, t):
        return meg_step(s, grad, schedule(t))

    def snapshot(s):
        return s.average.copy(), s.N.copy()

    state = drive(stream, whitener_x, whitener_y, T, step, state, snapshot, eval_every, hook)
    return state.average, state
