"""Streaming covariance estimates and their whitening transforms."""

import copy
import math

import numpy as np

from .errors import InputError, SingularityError
from .spectral import inv_sqrt_psd, sym_eig


class CappedWhitener:
    """Whitener whose covariance keeps its top ``K`` eigenpairs exactly and
    replaces the remaining ``dim - K`` eigenvalues by one constant.

    Represents ``W = V_K diag(lam_K ** -0.5) V_K^T + tail ** -0.5 (I - V_K V_K^T)``
    without forming it; ``W @ x`` costs ``O(dim * K)``.
    """

    def __init__(self, top_vectors, top_eigs, tail_constant):
        self.top_vectors = np.asarray(top_vectors, dtype=np.float64)
        self.top_eigs = np.asarray(top_eigs, dtype=np.float64)
        self.tail_constant = float(tail_constant)

    @property
    def dim(self):
        return self.top_vectors.shape[0]

    @property
    def shape(self):
        return (self.dim, self.dim)

    @property
    def rank(self):
        return self.top_vectors.shape[1]

    def apply(self, v):
        v = np.asarray(v, dtype=np.float64)
        Vk = self.top_vectors
        coef = Vk.T @ v
        inv_root = 1.0 / np.sqrt(self.top_eigs)
        out = Vk @ (coef * (inv_root[:, None] if v.ndim == 2 else inv_root))
        if self.rank < self.dim:
            out = out + (v - Vk @ coef) / math.sqrt(self.tail_constant)
        return out

    __matmul__ = apply

    def todense(self):
        return self.apply(np.eye(self.dim))


class StreamingWhitener:
    """Running second-moment estimate of one view plus its whitening transform.

    The estimate is the plain average of every outer product seen so far,
    auxiliary samples included, so ``count`` starts at the auxiliary size.
    ``reg_lambda`` is only added when factorizing; it never enters ``cov``.

    Parameters
    ----------
    dim : int
    reg_lambda : float
        Ridge added to ``cov`` before taking the inverse square root.
    cap_rank : int, optional
        When set, :meth:`whitener` returns a :class:`CappedWhitener` of this rank.
    refresh_every : int
        Recompute the whitener only once this many updates have accumulated
        since the last factorization. ``1`` recomputes after every update.
    """

    def __init__(self, dim, reg_lambda=0.0, cap_rank=None, refresh_every=1):
        if dim < 1:
            raise InputError(f"dim must be positive, got {dim}")
        if reg_lambda < 0:
            raise InputError(f"reg_lambda must be non-negative, got {reg_lambda}")
        if cap_rank is not None and not 1 <= cap_rank <= dim:
            raise InputError(f"cap_rank must lie in [1, {dim}], got {cap_rank}")
        if refresh_every < 1:
            raise InputError("refresh_every must be a positive integer")
        self.dim = int(dim)
        self.reg_lambda = float(reg_lambda)
        self.cap_rank = cap_rank
        self.refresh_every = int(refresh_every)
        self.count = 0
        self.cov = np.zeros((dim, dim))
        self._cached = None
        self._age = 0

    @classmethod
    def from_aux(cls, aux_samples, reg_lambda=0.0, cap_rank=None, refresh_every=1):
        """Initialize from the auxiliary samples: ``cov = (1/tau) sum x x^T``."""
        X = np.asarray(aux_samples, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or X.shape[0] == 0:
            raise InputError("need at least one auxiliary sample")
        if not np.all(np.isfinite(X)):
            raise InputError("auxiliary samples have non-finite entries")
        self = cls(X.shape[1], reg_lambda, cap_rank, refresh_every)
        self.count = X.shape[0]
        self.cov = X.T @ X / X.shape[0]
        return self

    @property
    def stale(self):
        return self._cached is None or self._age >= self.refresh_every

    def update(self, x):
        """Fold one sample into the running average. Returns ``self``."""
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.shape != (self.dim,):
            raise InputError(f"expected a vector of length {self.dim}, got {x.shape}")
        n = self.count
        self.cov = (n / (n + 1)) * self.cov + np.outer(x, x) / (n + 1)
        self.count = n + 1
        self._age += 1
        return self

    def whitening_matrix(self):
        """Dense ``(cov + reg_lambda I)^{-1/2}``."""
        try:
            return inv_sqrt_psd(self.cov, self.reg_lambda)
        except SingularityError as exc:
            raise SingularityError(
                f"{exc}; use a positive reg_lambda or a larger auxiliary sample"
            ) from None

    def capped_whitening_matrix(self, K):
        """Rank-``K`` capped whitener.

        Keeps the top ``K`` eigenpairs of ``cov + reg_lambda I`` and replaces
        the others by ``max(reg_lambda, mean of the discarded eigenvalues)``.
        """
        if not 1 <= K <= self.dim:
            raise InputError(f"K must lie in [1, {self.dim}], got {K}")
        eig = sym_eig(self.cov + self.reg_lambda * np.eye(self.dim))
        top = eig.eigenvalues[:K]
        if top[-1] <= 0:
            raise SingularityError(
                f"covariance has non-positive eigenvalue {top[-1]:.3e} among the "
                "top K; use a positive reg_lambda or a larger auxiliary sample"
            )
        if K < self.dim:
            tail = max(self.reg_lambda, eig.eigenvalues[K:].sum() / (self.dim - K))
            if tail <= 0:
                raise SingularityError(
                    "discarded eigenvalues average to zero; use a positive reg_lambda"
                )
        else:
            tail = 1.0
        return CappedWhitener(eig.eigenvectors[:, :K], top, tail)

    def whitener(self):
        """Current whitener, recomputed only when stale per ``refresh_every``."""
        if self.stale:
            if self.cap_rank is None:
                self._cached = self.whitening_matrix()
            else:
                self._cached = self.capped_whitening_matrix(self.cap_rank)
            self._age = 0
        return self._cached

    def snapshot(self):
        return copy.deepcopy(self)


def min_aux_size(B, r_x, r_y, d_x, d_y, delta):
    """Auxiliary sample size that keeps both empirical covariances above half
    their population minimum eigenvalue, uniformly over the stream, with
    probability ``1 - delta``.

    ``ceil(max(log(2d / log(1/(1-delta))) / c - 1, log(2d) / c))`` over both
    views, with ``c = 3 r^2 / (6 B^2 + B r)``.
    """
    for name, val in (("B", B), ("r_x", r_x), ("r_y", r_y), ("d_x", d_x), ("d_y", d_y)):
        if not val > 0:
            raise InputError(f"{name} must be positive, got {val}")
    if not 0 < delta < 1:
        raise InputError(f"delta must lie in (0, 1), got {delta}")
    log_inv = math.log(1.0 / (1.0 - delta))
    terms = []
    for r, d in ((r_x, d_x), (r_y, d_y)):
        c = 3.0 * r * r / (6.0 * B * B + B * r)
        terms.append(math.log(2.0 * d / log_inv) / c - 1.0)
        terms.append(math.log(2.0 * d) / c)
    return int(math.ceil(max(terms)))
