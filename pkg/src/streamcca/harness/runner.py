"""Run orchestration: auxiliary split, the streaming loop and periodic evaluation.

A dataset of ``n`` rows is split as

* rows ``[0, tau)``: auxiliary samples that initialize the whiteners,
* rows ``[tau, tau + T)``: the training stream,
* the last ``max(500, ceil(0.05 n))`` rows: a holdout used only for metrics.

The SAA baseline trains on every row before the holdout.
"""

import itertools
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .. import meg, msg
from ..errors import InputError
from ..evaluation import (
    GroundTruth, empirical_moments, lifted_objective, optimum_value, orthogonality_gap,
    population_T, saa_solve, theory_constants, trace_objective,
)
from ..loop import sqrt_decay_step
from ..oracle import dilate_matrix, gradient_error, reference_gradient
from ..rounding import CcaSolution, extract_factors, meg_factor_heuristic, round_meg, round_msg, top_k_factors
from ..spectral import sym_eig
from ..whitening import StreamingWhitener, min_aux_size
from .io import METRICS_FIELDS, iter_samples, read_header, save_solution, write_metrics_csv
from .synthetic import named_rng

ALGOS = ("msg", "capped-msg", "meg", "saa")
ETA_MODES = ("theory", "sqrt")
HOLDOUT_MIN = 500
HOLDOUT_FRACTION = 0.05


@dataclass(frozen=True)
class RunConfig:
    """Settings of one run.

    ``tau = None`` asks for the auxiliary size that the theory prescribes,
    which needs both a declared ``B`` and ground truth. ``B``, when set, is
    also enforced: samples with ``max(|x|^2, |y|^2) > B`` are rejected.
    Without it ``B`` is estimated as the largest squared norm in the
    auxiliary set. ``cap_rank`` defaults to ``2k`` for ``capped-msg``.
    """

    algo: str
    k: int
    T: int = 1
    tau: Optional[int] = None
    cap_rank: Optional[int] = None
    eta_mode: str = "theory"
    eta_c: float = 0.1
    reg_lambda: float = 0.0
    seed: int = 0
    eval_every: int = 100
    rounding_draws: int = 10
    whitener_cadence: int = 1
    B: Optional[float] = None
    record_time: bool = True

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise InputError(f"algo must be one of {ALGOS}, got {self.algo!r}")
        if self.eta_mode not in ETA_MODES:
            raise InputError(f"eta_mode must be one of {ETA_MODES}, got {self.eta_mode!r}")
        for name in ("k", "T", "eval_every", "rounding_draws", "whitener_cadence"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be a positive integer, got {getattr(self, name)}")
        if self.tau is not None and self.tau < 1:
            raise InputError(f"tau must be at least 1, got {self.tau}")
        if self.cap_rank is not None and self.cap_rank < self.k:
            raise InputError(f"cap_rank ({self.cap_rank}) must be at least k ({self.k})")
        if self.reg_lambda < 0:
            raise InputError("reg_lambda must be non-negative")
        if not self.eta_c > 0:
            raise InputError("eta_c must be positive")
        if self.B is not None and not self.B > 0:
            raise InputError("B must be positive")

    @property
    def effective_cap_rank(self):
        if self.algo != "capped-msg":
            return None
        return self.cap_rank if self.cap_rank is not None else 2 * self.k


@dataclass
class RunResult:
    rows: list
    solution: CcaSolution
    summary: dict = field(default_factory=dict)


class _Dataset:
    """Uniform access to a dataset given as a file path or as ``(X, Y)`` arrays."""

    def __init__(self, data):
        if isinstance(data, tuple):
            X = np.atleast_2d(np.asarray(data[0], dtype=np.float64))
            Y = np.atleast_2d(np.asarray(data[1], dtype=np.float64))
            if X.shape[0] != Y.shape[0]:
                raise InputError("views have different numbers of samples")
            if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
                raise InputError("samples have non-finite entries")
            self._arrays = (X, Y)
            self.n, self.d_x, self.d_y = X.shape[0], X.shape[1], Y.shape[1]
        else:
            self._arrays = None
            self._path = data
            header = read_header(data)
            self.n, self.d_x, self.d_y = header.n, header.d_x, header.d_y

    def rows(self, start=0, stop=None):
        stop = self.n if stop is None else stop
        if self._arrays is not None:
            X, Y = self._arrays
            return zip(X[start:stop], Y[start:stop])
        return itertools.islice(iter_samples(self._path), start, stop)

    def block(self, start, stop):
        X = np.empty((stop - start, self.d_x))
        Y = np.empty((stop - start, self.d_y))
        for i, (x, y) in enumerate(self.rows(start, stop)):
            X[i], Y[i] = x, y
        return X, Y


def holdout_size(n):
    return max(HOLDOUT_MIN, math.ceil(HOLDOUT_FRACTION * n))


def _bounded(rows, B, offset):
    for i, (x, y) in enumerate(rows):
        if max(x @ x, y @ y) > B:
            raise InputError(f"sample {offset + i} has squared norm above B = {B}")
        yield x, y


def _resolve_tau(config, truth, d_x, d_y):
    if config.tau is not None:
        return config.tau
    if config.B is None or truth is None:
        raise InputError("tau is required unless both B and ground truth are given")
    delta = 1.0 / math.sqrt(config.T) if config.T > 1 else 0.5
    return min_aux_size(config.B, truth.r_x, truth.r_y, d_x, d_y, delta)


class _Evaluator:
    """Computes one metrics row from a solver snapshot."""

    def __init__(self, config, truth, holdout, d_x, start):
        self.config = config
        self.truth = truth
        self.d_x = d_x
        self.rng = named_rng(config.seed, "rounding")
        self.start = start
        self.Cx_h, self.Cy_h, self.Cxy_h = holdout
        self.rows = []
        self.last_solution = None
        if truth is not None:
            self.T_pop = population_T(truth)
            self.opt = optimum_value(self.T_pop, config.k)
            self.W_pop = truth.whiteners()
            self.C_x, self.C_y = truth.C_x, truth.C_y
        else:
            self.T_pop = None
            self.C_x, self.C_y = self.Cx_h, self.Cy_h

    def _elapsed(self):
        return (time.perf_counter() - self.start) * 1e3 if self.config.record_time else None

    def record(self, it, sol, pop_avg, rounded, grad_err):
        sol_obj = float(np.trace(sol.U_tilde.T @ self.Cxy_h @ sol.V_tilde))
        row = {
            "iter": it,
            "wall_ms": self._elapsed(),
            "pop_obj_avg": pop_avg,
            "pop_obj_rounded_mean": rounded,
            "emp_obj_holdout": sol_obj,
            "subopt": None if pop_avg is None else self.opt - pop_avg,
            "orth_x": orthogonality_gap(sol.U_tilde, self.C_x),
            "orth_y": orthogonality_gap(sol.V_tilde, self.C_y),
            "grad_err": grad_err,
        }
        self.rows.append(row)
        self.last_solution = sol

    def _grad_err(self, snap):
        if self.truth is None:
            return None
        return gradient_error(snap.grad, reference_gradient(*self.W_pop, snap.x, snap.y))

    def msg_hook(self, snap):
        k, M_bar = self.config.k, snap.average
        sol = extract_factors(top_k_factors(M_bar, k), snap.Wx, snap.Wy)
        pop_avg = rounded = None
        if self.T_pop is not None:
            pop_avg = lifted_objective(M_bar, self.T_pop)
            draws = [lifted_objective(round_msg(M_bar, k, self.rng)[0], self.T_pop)
                     for _ in range(self.config.rounding_draws)]
            rounded = float(np.mean(draws))
        self.record(snap.iter, sol, pop_avg, rounded, self._grad_err(snap))

    def meg_hook(self, snap):
        k, N_bar = self.config.k, snap.average
        top = sym_eig(N_bar).eigenvectors[:, :k]
        sol = extract_factors(meg_factor_heuristic(top @ top.T, self.d_x), snap.Wx, snap.Wy)
        pop_avg = rounded = None
        if self.T_pop is not None:
            C = dilate_matrix(self.T_pop)
            pop_avg = meg.meg_objective_scale(N_bar, C, k)
            draws = [float(np.sum(round_meg(N_bar, k, self.rng) * C))
                     for _ in range(self.config.rounding_draws)]
            rounded = float(np.mean(draws))
        self.record(snap.iter, sol, pop_avg, rounded, self._grad_err(snap))


def _constants(config, truth, aux, B, d_x, d_y):
    if truth is not None:
        r_x, r_y = truth.r_x, truth.r_y
    else:
        Cx, Cy, _ = empirical_moments(*aux)
        r_x = float(np.linalg.eigvalsh(Cx)[0]) + config.reg_lambda
        r_y = float(np.linalg.eigvalsh(Cy)[0]) + config.reg_lambda
    if not (r_x > 0 and r_y > 0 and B > 0):
        return None
    return theory_constants(B, r_x, r_y, d_x, d_y, config.k, config.T)


def run(config: RunConfig, data, truth: Optional[GroundTruth] = None, out_prefix=None) -> RunResult:
    """Execute ``config`` on ``data`` (a dataset path or ``(X, Y)``).

    Writes ``<out_prefix>_metrics.csv``, ``<out_prefix>_solution.txt`` and
    ``<out_prefix>_summary.json`` when ``out_prefix`` is given.
    """
    ds = _Dataset(data)
    if truth is not None and (truth.d_x, truth.d_y) != (ds.d_x, ds.d_y):
        raise InputError(
            f"truth dimensions ({truth.d_x}, {truth.d_y}) do not match data ({ds.d_x}, {ds.d_y})"
        )
    if config.k > min(ds.d_x, ds.d_y):
        raise InputError(f"k must be at most min(d_x, d_y) = {min(ds.d_x, ds.d_y)}")
    n_hold = holdout_size(ds.n)
    n_avail = ds.n - n_hold
    if n_avail < 1:
        raise InputError(f"dataset has {ds.n} rows, not more than the {n_hold} holdout rows")
    holdout = empirical_moments(*ds.block(n_avail, ds.n))
    start = time.perf_counter()

    if config.algo == "saa":
        result = _run_saa(config, ds, truth, holdout, n_avail, start)
    else:
        tau = _resolve_tau(config, truth, ds.d_x, ds.d_y)
        if n_avail < tau + config.T:
            raise InputError(
                f"dataset has {ds.n} rows but needs tau + T = {tau + config.T} "
                f"training rows plus {n_hold} holdout rows"
            )
        result = _run_streaming(config, ds, truth, holdout, tau, start)
    result.summary["holdout_rows"] = n_hold
    if out_prefix is not None:
        write_outputs(result, out_prefix)
    return result


def _run_saa(config, ds, truth, holdout, n_train, start):
    X, Y = ds.block(0, n_train)
    if config.B is not None:
        list(_bounded(zip(X, Y), config.B, 0))
    sol, value = saa_solve(X, Y, config.k, config.reg_lambda)
    ev = _Evaluator(config, truth, holdout, ds.d_x, start)
    pop = trace_objective(sol, truth.C_xy) if truth is not None else None
    ev.record(n_train, sol, pop, None, None)
    summary = {"config": asdict(config), "train_rows": n_train, "saa_value": value,
               "final": ev.rows[-1]}
    if truth is not None:
        summary["optimum"] = ev.opt
    return RunResult(ev.rows, sol, summary)


def _run_streaming(config, ds, truth, holdout, tau, start):
    aux = ds.block(0, tau)
    if config.B is not None:
        list(_bounded(zip(*aux), config.B, 0))
        B = config.B
    else:
        B = float(max(np.max(np.sum(aux[0] ** 2, axis=1)), np.max(np.sum(aux[1] ** 2, axis=1))))
    tc = _constants(config, truth, aux, B, ds.d_x, ds.d_y)

    K = config.effective_cap_rank
    wx = StreamingWhitener.from_aux(aux[0], config.reg_lambda,
                                    None if K is None else min(K, ds.d_x), config.whitener_cadence)
    wy = StreamingWhitener.from_aux(aux[1], config.reg_lambda,
                                    None if K is None else min(K, ds.d_y), config.whitener_cadence)

    is_meg = config.algo == "meg"
    if config.eta_mode == "theory":
        if tc is None:
            raise InputError("theory step size needs positive r_x, r_y; set reg_lambda or give truth")
        eta = tc.eta_meg if is_meg else tc.eta_msg
    else:
        eta = sqrt_decay_step(config.eta_c)

    stream = ds.rows(tau, tau + config.T)
    if config.B is not None:
        stream = _bounded(stream, config.B, tau)
    ev = _Evaluator(config, truth, holdout, ds.d_x, start)
    if is_meg:
        _, state = meg.run_meg(stream, wx, wy, k=config.k, T=config.T, eta=eta,
                               eval_every=config.eval_every, hook=ev.meg_hook)
    else:
        M_cap = None if K is None else min(K, ds.d_x, ds.d_y)
        _, state = msg.run_msg(stream, wx, wy, k=config.k, T=config.T, eta=eta, cap_rank=M_cap,
                               eval_every=config.eval_every, hook=ev.msg_hook)

    final = ev.rows[-1]
    summary = {"config": asdict(config), "tau": tau, "B": B, "final": final,
               "average": state.average.tolist()}
    if tc is not None:
        summary["theory"] = asdict(tc)
        summary["bound"] = tc.bound_meg if is_meg else tc.bound_msg
    if truth is not None:
        summary["optimum"] = ev.opt
        summary["final_subopt"] = final["subopt"]
    return RunResult(ev.rows, ev.last_solution, summary)


def write_outputs(result: RunResult, prefix):
    write_metrics_csv(f"{prefix}_metrics.csv", result.rows)
    save_solution(f"{prefix}_solution.txt", result.solution)
    with open(f"{prefix}_summary.json", "w", encoding="ascii") as fh:
        json.dump(result.summary, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


__all__ = ["RunConfig", "RunResult", "run", "write_outputs", "holdout_size", "METRICS_FIELDS"]
