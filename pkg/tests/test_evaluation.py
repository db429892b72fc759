import math

import numpy as np
import pytest

from oracles import kappa_mp, lifted_max_cvxpy, min_aux_size_mp
from streamcca.errors import InputError, SingularityError
from streamcca.evaluation import (
    GroundTruth, generalization_bounds, lifted_objective, optimum_value, orthogonality_gap,
    population_T, saa_solve, theory_constants, trace_objective,
)
from streamcca.harness.synthetic import gen_synthetic
from streamcca.rounding import CcaSolution


def test_population_T_cases():
    gt = GroundTruth(np.eye(2), np.eye(2), np.array([[0.3, 0.1], [0.0, 0.2]]), np.array([0.3]))
    assert np.allclose(population_T(gt), gt.C_xy)
    gt = GroundTruth(np.array([[4.0]]), np.array([[9.0]]), np.array([[6.0]]), np.array([1.0]))
    assert np.allclose(population_T(gt), [[1.0]])
    _, _, gt = gen_synthetic(6, 5, [0.9, 0.4], 10, 3.0, 2.0, seed=1)
    s = np.linalg.svd(population_T(gt), compute_uv=False)
    assert np.allclose(s[:2], [0.9, 0.4], atol=1e-8) and np.allclose(s[2:], 0.0, atol=1e-8)


def test_population_T_singular():
    gt = GroundTruth(np.diag([1.0, 0.0]), np.eye(2), np.zeros((2, 2)), np.array([0.1]))
    with pytest.raises(SingularityError):
        population_T(gt)


def test_lifted_objective():
    rng = np.random.default_rng(0)
    T = rng.standard_normal((4, 3))
    assert lifted_objective(np.zeros((4, 3)), T) == 0.0
    U, s, Vt = np.linalg.svd(T, full_matrices=False)
    assert lifted_objective(U[:, :2] @ Vt[:2], T) == pytest.approx(s[:2].sum())
    M = rng.standard_normal((4, 3))
    assert lifted_objective(M, T) == pytest.approx(np.trace(M.T @ T), abs=1e-12)
    with pytest.raises(InputError):
        lifted_objective(np.zeros((3, 3)), T)


def test_optimum_value():
    assert optimum_value(np.zeros((3, 3)), 2) == 0.0
    assert optimum_value(np.diag([0.9, 0.7, 0.5]), 2) == pytest.approx(1.6)
    with pytest.raises(InputError):
        optimum_value(np.eye(2), 3)


@pytest.mark.parametrize("seed", range(4))
def test_optimum_value_matches_conic_solver(seed):
    T = np.random.default_rng(seed).standard_normal((4, 3))
    for k in (1, 2):
        assert optimum_value(T, k) == pytest.approx(lifted_max_cvxpy(T, k), abs=1e-6)


def test_trace_objective():
    rng = np.random.default_rng(1)
    T = rng.standard_normal((3, 3))
    U, s, Vt = np.linalg.svd(T)
    sol = CcaSolution(U[:, :2], Vt[:2].T, U[:, :2], Vt[:2].T)
    assert trace_objective(sol, T) == pytest.approx(s[:2].sum())
    assert trace_objective(sol, np.zeros((3, 3))) == 0.0
    A, B = rng.standard_normal((3, 2)), rng.standard_normal((3, 2))
    sol = CcaSolution(A, B, A, B)
    assert trace_objective(sol, T) == pytest.approx(np.sum(A * (T @ B)))
    with pytest.raises(InputError):
        trace_objective(CcaSolution(A, B), T)


def test_orthogonality_gap():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((4, 4))
    C = A @ A.T + np.eye(4)
    lam, Q = np.linalg.eigh(C)
    F = ((Q / np.sqrt(lam)) @ Q.T)[:, :2]
    F = F @ np.linalg.inv(np.linalg.cholesky(F.T @ C @ F)).T
    assert orthogonality_gap(F, C) <= 1e-9
    assert orthogonality_gap(np.zeros((4, 2)), C) == pytest.approx(1.0)
    G = rng.standard_normal((4, 2))
    dense = np.linalg.norm(G.T @ C @ G - np.eye(2), 2)
    assert orthogonality_gap(G, C) == pytest.approx(dense)


def test_saa_scalar_and_regularization():
    sol, value = saa_solve([[1.0]], [[1.0]], 1)
    assert value == pytest.approx(1.0)
    X, Y, _ = gen_synthetic(5, 5, [0.8, 0.5], 2000, seed=3)
    values = [saa_solve(X, Y, 2, lam)[1] for lam in (0.0, 0.1, 1.0, 10.0)]
    assert all(a > b for a, b in zip(values, values[1:]))
    with pytest.raises(SingularityError):
        saa_solve(np.zeros((3, 2)), np.ones((3, 2)), 1)


def test_theory_constants_values():
    tc = theory_constants(1.0, 0.25, 0.25, 10, 10, 1, 100)
    assert tc.G == pytest.approx(8.0)
    tc = theory_constants(1.0, 0.5, 0.5, 10, 10, 1, 100, delta=0.1)
    assert tc.kappa == pytest.approx(float(kappa_mp(1, 0.5, 10)), rel=1e-14)
    assert tc.kappa == pytest.approx(68.67, abs=0.01)
    assert tc.tau_min == min_aux_size_mp(1, 0.5, 0.5, 10, 10, 0.1)
    tc = theory_constants(1.0, 1.0, 1.0, 10, 10, 1, 100)
    assert tc.eta_msg == pytest.approx(2 / (tc.G * 10))
    assert tc.delta == pytest.approx(0.1)
    assert tc.bound_msg == pytest.approx(
        (2 * tc.G + 2 * tc.kappa + tc.B / tc.r) / 10)
    assert tc.bound_meg == pytest.approx(
        2 * math.sqrt(tc.G ** 2 * math.log(20) / 100) + 2 * tc.kappa / 10)
    with pytest.raises(InputError):
        theory_constants(1.0, 0.0, 1.0, 10, 10, 1, 100)


def test_bounds_shrink_with_T():
    a = theory_constants(2.0, 0.5, 0.4, 8, 6, 2, 1000)
    b = theory_constants(2.0, 0.5, 0.4, 8, 6, 2, 100_000)
    assert b.bound_msg < a.bound_msg and b.bound_meg < a.bound_meg
    ga, gb = generalization_bounds(a), generalization_bounds(b)
    assert all(gb[key] < ga[key] for key in ("trace", "orth_x", "orth_y"))
