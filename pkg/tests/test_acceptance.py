"""Acceptance gate. One test per criterion; the conftest prints a PASS/FAIL
line for each at the end of the session.

Thresholds marked "pilot" were frozen from a reference run on the same
instance with the same seeds: the observed value times two.
"""

import time

import numpy as np
import pytest

from oracles import binomial_band, box_sum_bisection, entropy_cap_exhaustive
from streamcca.evaluation import saa_solve
from streamcca.harness import RunConfig, gen_synthetic, run
from streamcca.msg import project_F
from streamcca.oracle import dilate, inexact_gradient, gradient_error, reference_gradient
from streamcca.rounding import round_msg, sample_k_subset
from streamcca.spectral import entropy_cap, project_capped_box_sum, svd_thin, sym_eig
from streamcca.whitening import StreamingWhitener

criterion = pytest.mark.criterion

# end-to-end instance
D, K, COND, T_RUN, TAU = 10, 2, 2.0, 20_000, 1_000
RHO = (0.9, 0.7, 0.5, 0.3, 0.1)
N_ROWS = 22_200            # tau + T plus a 1,110-row holdout
DATA_SEED = RUN_SEED = 0

# pilot subopt: MSG 0.37774, MEG 1.57989
MSG_PILOT_LIMIT = 0.7555
MEG_PILOT_LIMIT = 3.1598


def _feasible_matrix(rng, dx, dy, k):
    U, _ = np.linalg.qr(rng.standard_normal((dx, dx)))
    V, _ = np.linalg.qr(rng.standard_normal((dy, dy)))
    m = min(dx, dy)
    s = rng.uniform(0, 1, m)
    s *= min(1.0, k / s.sum())
    return (U[:, :m] * s) @ V[:, :m].T


@criterion(1, "capped box-sum projection matches bisection oracle")
def test_c01_projection_oracle():
    rng = np.random.default_rng(101)
    cases = []
    for _ in range(500):
        m = int(rng.integers(1, 13))
        cases.append((rng.uniform(-1.0, 2.5, m), float(rng.uniform(0, m)) or 0.5))
    start = time.perf_counter()
    outs = [project_capped_box_sum(s, k) for s, k in cases]
    elapsed = time.perf_counter() - start
    worst = max(np.max(np.abs(v - box_sum_bisection(s, k))) for v, (s, k) in zip(outs, cases))
    print(f"max deviation {worst:.2e}, {elapsed:.3f}s")
    assert worst <= 1e-8
    assert elapsed < 1.0


@criterion(2, "projection onto the feasible set is optimal and idempotent")
def test_c02_projection_optimal_idempotent():
    rng = np.random.default_rng(102)
    worst_gap, worst_idem = -np.inf, 0.0
    for _ in range(100):
        dx, dy = (int(v) for v in rng.integers(1, 7, 2))
        k = int(rng.integers(1, min(dx, dy) + 1))
        X = 2.0 * rng.standard_normal((dx, dy))
        P = project_F(X, k)
        dist = np.linalg.norm(X - P)
        for _ in range(100):
            Y = _feasible_matrix(rng, dx, dy, k)
            worst_gap = max(worst_gap, dist - np.linalg.norm(X - Y))
        worst_idem = max(worst_idem, np.max(np.abs(project_F(P, k) - P)))
    print(f"max optimality gap {worst_gap:.2e}, idempotence {worst_idem:.2e}")
    assert worst_gap <= 1e-8
    assert worst_idem <= 1e-10


@criterion(3, "entropy capping matches exhaustive cap-set search")
def test_c03_entropy_cap_oracle():
    rng = np.random.default_rng(103)
    worst = worst_post = 0.0
    for _ in range(500):
        d = int(rng.integers(1, 13))
        k = int(rng.integers(1, d + 1))
        lam = np.sort(rng.dirichlet(np.full(d, rng.uniform(0.2, 3.0))))[::-1]
        lam = np.maximum(lam, 1e-300)
        lam = lam / lam.sum()
        v = entropy_cap(lam, 1.0 / k, 1.0)
        worst = max(worst, np.max(np.abs(v - entropy_cap_exhaustive(lam, 1.0 / k, 1.0))))
        worst_post = max(worst_post, abs(v.sum() - 1.0), v.max() - 1.0 / k)
    print(f"max deviation {worst:.2e}, post-condition slack {worst_post:.2e}")
    assert worst <= 1e-10
    assert worst_post <= 1e-10


@criterion(4, "systematic rounding is unbiased")
def test_c04_rounding_unbiased():
    rng = np.random.default_rng(104)
    draws = 20_000
    for _ in range(20):
        m = int(rng.integers(2, 9))
        k = int(rng.integers(1, m + 1))
        w = rng.uniform(0, 1, m)
        w *= min(1.0, k / w.sum())
        counts = np.zeros(m)
        for _ in range(draws):
            counts[sample_k_subset(w, k, rng)] += 1
        assert np.all(np.abs(counts / draws - w) <= binomial_band(w, draws) + 1e-12), w
    for _ in range(5):
        dx, dy = (int(v) for v in rng.integers(2, 6, 2))
        k = int(rng.integers(1, min(dx, dy) + 1))
        M = _feasible_matrix(rng, dx, dy, k)
        A = rng.standard_normal((dx, dy))
        vals = np.array([np.sum(round_msg(M, k, rng)[0] * A) for _ in range(draws)])
        sigma = vals.std() / np.sqrt(draws)
        assert abs(vals.mean() - np.sum(M * A)) <= 4 * sigma + 1e-12


@criterion(5, "dilation spectrum is {+s, -s, 0, ...}")
def test_c05_dilation_spectrum():
    rng = np.random.default_rng(105)
    worst = 0.0
    for _ in range(200):
        dx, dy = (int(v) for v in rng.integers(1, 11, 2))
        Wx = rng.standard_normal((dx, dx))
        Wy = rng.standard_normal((dy, dy))
        g = inexact_gradient(Wx, Wy, rng.standard_normal(dx), rng.standard_normal(dy))
        s = svd_thin(g.matrix).singular_values[0]
        expect = np.zeros(dx + dy)
        expect[0], expect[-1] = s, -s
        worst = max(worst, np.max(np.abs(sym_eig(dilate(g).matrix).eigenvalues - expect)))
    print(f"max eigenvalue deviation {worst:.2e}")
    assert worst <= 1e-8


@criterion(6, "streaming covariance equals batch mean")
def test_c06_streaming_covariance():
    rng = np.random.default_rng(106)
    X = rng.standard_normal((1_010, 10)) @ rng.standard_normal((10, 10))
    w = StreamingWhitener.from_aux(X[:10])
    for x in X[10:]:
        w.update(x)
    batch = X.T @ X / X.shape[0]
    rel = np.linalg.norm(w.cov - batch) / np.linalg.norm(batch)
    print(f"relative Frobenius error {rel:.2e}")
    assert rel <= 1e-12


@criterion(7, "gradient error decays like 1/sqrt(t)")
def test_c07_gradient_error_decay():
    # a small auxiliary set keeps the estimation error dominated by t
    tau, errs = 20, {100: [], 400: []}
    for seed in range(50):
        X, Y, gt = gen_synthetic(10, 10, RHO, tau + 400, 4.0, 4.0, seed=seed)
        W_pop = gt.whiteners()
        wx = StreamingWhitener.from_aux(X[:tau])
        wy = StreamingWhitener.from_aux(Y[:tau])
        for t in range(1, 401):
            x, y = X[tau + t - 1], Y[tau + t - 1]
            wx.update(x)
            wy.update(y)
            if t in errs:
                g = inexact_gradient(wx.whitener(), wy.whitener(), x, y)
                errs[t].append(gradient_error(g, reference_gradient(*W_pop, x, y)))
    ratio = np.mean(errs[400]) / np.mean(errs[100])
    print(f"mean error t=100 {np.mean(errs[100]):.4f}, t=400 {np.mean(errs[400]):.4f}, ratio {ratio:.3f}")
    assert ratio <= 0.6


@pytest.fixture(scope="module")
def instance():
    return gen_synthetic(D, D, RHO, N_ROWS, COND, COND, seed=DATA_SEED)


def _config(algo, **kw):
    return RunConfig(algo=algo, k=K, T=T_RUN, tau=TAU, eta_mode="theory", seed=RUN_SEED,
                     eval_every=T_RUN, **kw)


@pytest.fixture(scope="module")
def msg_run(instance):
    X, Y, gt = instance
    return run(_config("msg"), (X, Y), gt)


@pytest.fixture(scope="module")
def capped_run(instance):
    X, Y, gt = instance
    return run(_config("capped-msg", cap_rank=2 * K), (X, Y), gt)


@pytest.fixture(scope="module")
def meg_run(instance):
    X, Y, gt = instance
    return run(_config("meg"), (X, Y), gt)


@criterion(8, "MSG suboptimality below the theoretical bound and pilot limit")
def test_c08_msg_bound(msg_run):
    subopt, bound = msg_run.summary["final_subopt"], msg_run.summary["bound"]
    print(f"subopt {subopt:.4f}, bound {bound:.1f}, pilot limit {MSG_PILOT_LIMIT}")
    assert msg_run.summary["optimum"] == pytest.approx(sum(RHO[:K]), abs=1e-8)
    assert subopt <= bound
    assert subopt <= MSG_PILOT_LIMIT


@criterion(9, "MEG suboptimality below the theoretical bound and pilot limit")
def test_c09_meg_bound(meg_run):
    subopt, bound = meg_run.summary["final_subopt"], meg_run.summary["bound"]
    print(f"subopt {subopt:.4f}, bound {bound:.1f}, pilot limit {MEG_PILOT_LIMIT}")
    assert subopt <= bound
    assert subopt <= MEG_PILOT_LIMIT


@criterion(10, "orthogonality gaps of MSG factors at most 0.1")
def test_c10_orthogonality(msg_run):
    row = msg_run.rows[-1]
    print(f"orth_x {row['orth_x']:.4f}, orth_y {row['orth_y']:.4f}")
    assert row["orth_x"] <= 0.1
    assert row["orth_y"] <= 0.1


@criterion(11, "SAA value within 0.02 of the sum of the top-2 correlations")
def test_c11_saa():
    X, Y, _ = gen_synthetic(D, D, RHO, 50_000, COND, COND, seed=DATA_SEED)
    _, value = saa_solve(X, Y, K)
    print(f"SAA value {value:.5f}")
    assert abs(value - 1.6) <= 0.02


@criterion(12, "capped MSG within 10% of uncapped MSG")
def test_c12_capped_parity(msg_run, capped_run):
    a, b = msg_run.summary["final_subopt"], capped_run.summary["final_subopt"]
    rel = abs(b - a) / a
    print(f"uncapped {a:.4f}, capped {b:.4f}, relative difference {rel:.3f}")
    assert rel <= 0.10


@criterion(13, "seeded runs give byte-identical metrics CSVs")
@pytest.mark.parametrize("algo", ["msg", "capped-msg", "meg"])
def test_c13_determinism(instance, tmp_path, algo):
    X, Y, gt = instance
    cfg = RunConfig(algo=algo, k=K, T=1_000, tau=TAU, eta_mode="sqrt", seed=11,
                    eval_every=250, record_time=False)
    blobs = []
    for rep in range(2):
        prefix = tmp_path / f"{algo}_{rep}"
        run(cfg, (X, Y), gt, out_prefix=str(prefix))
        blobs.append(((tmp_path / f"{algo}_{rep}_metrics.csv").read_bytes(),
                      (tmp_path / f"{algo}_{rep}_solution.txt").read_bytes()))
    assert blobs[0] == blobs[1]
