"""Rounding a fractional solution, and the batch baseline."""

import numpy as np

from streamcca.evaluation import saa_solve
from streamcca.harness import gen_synthetic
from streamcca.rounding import round_msg, sample_k_subset

rng = np.random.default_rng(0)

# Systematic sampling selects index i with probability w_i exactly.
w = np.array([0.9, 0.6, 0.5])
counts = np.zeros(3)
for _ in range(20_000):
    counts[sample_k_subset(w, 2, rng)] += 1
print("target", w, "observed", np.round(counts / 20_000, 3))

# A fractional MSG iterate rounds to a partial isometry whose mean is the
# original matrix.
U, _ = np.linalg.qr(rng.standard_normal((4, 3)))
V, _ = np.linalg.qr(rng.standard_normal((3, 3)))
M = (U * [0.8, 0.7, 0.4]) @ V.T
mean = sum(round_msg(M, 2, rng)[0] for _ in range(5000)) / 5000
print("max |E[M_tilde] - M| over 5000 draws", np.abs(mean - M).max().round(4))

# The sample average approximation solves the empirical problem exactly.
rho = [0.9, 0.7, 0.5, 0.3, 0.1]
for n in (1_000, 10_000, 50_000):
    X, Y, _ = gen_synthetic(10, 10, rho, n, cond_x=2.0, cond_y=2.0, seed=0)
    print(f"n={n:6d}  SAA value {saa_solve(X, Y, 2)[1]:.4f}  (population 1.6)")
