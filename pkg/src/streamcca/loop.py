"""Streaming driver shared by the MSG and MEG solvers."""

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .errors import InputError, StreamExhaustedError
from .oracle import GradientEstimate, inexact_gradient


@dataclass(frozen=True)
class Snapshot:
    """Read-only view of a solver handed to evaluation hooks.

    ``average`` is the running average the solver would return if stopped
    now; ``iterate`` is the latest iterate. ``Wx`` and ``Wy`` are the
    whiteners used for the most recent gradient, and ``x``, ``y``, ``grad``
    are that sample and gradient.
    """

    iter: int
    average: np.ndarray
    iterate: np.ndarray
    Wx: Any
    Wy: Any
    x: np.ndarray
    y: np.ndarray
    grad: GradientEstimate


def constant_step(eta):
    if not eta > 0:
        raise InputError(f"step size must be positive, got {eta}")
    return lambda t: eta


def sqrt_decay_step(c=0.1):
    """``eta_t = c / sqrt(t)``, with ``t`` counted from 1."""
    if not c > 0:
        raise InputError(f"step constant must be positive, got {c}")
    return lambda t: c / math.sqrt(t)


def as_schedule(eta) -> Callable[[int], float]:
    return eta if callable(eta) else constant_step(float(eta))


def drive(stream, whitener_x, whitener_y, T, step, state, snapshot, eval_every=None, hook=None):
    """Run ``T`` iterations of ``state = step(state, grad, t)`` over ``stream``.

    Each iteration folds the new sample into both whiteners, forms the
    inexact gradient with the refreshed whiteners and hands it to ``step``.
    ``snapshot(state)`` must return ``(average, iterate)`` copies.
    """
    if T < 1:
        raise InputError(f"T must be positive, got {T}")
    if eval_every is not None and eval_every < 1:
        raise InputError("eval_every must be a positive integer")
    it = iter(stream)
    for t in range(1, T + 1):
        try:
            x, y = next(it)
        except StopIteration:
            raise StreamExhaustedError(t - 1, T) from None
        whitener_x.update(x)
        whitener_y.update(y)
        Wx, Wy = whitener_x.whitener(), whitener_y.whitener()
        grad = inexact_gradient(Wx, Wy, x, y)
        state = step(state, grad, t)
        if hook is not None and eval_every is not None and (t % eval_every == 0 or t == T):
            average, iterate = snapshot(state)
            hook(Snapshot(t, average, iterate, Wx, Wy,
                          np.array(x, dtype=np.float64), np.array(y, dtype=np.float64), grad))
    return state

