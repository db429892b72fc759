"""How the running covariance and its whitener settle down as samples arrive."""

import numpy as np

from streamcca.harness import gen_synthetic
from streamcca.spectral import spectral_norm
from streamcca.whitening import StreamingWhitener, min_aux_size

X, _, truth = gen_synthetic(8, 8, [0.8, 0.5], 5000, cond_x=4.0, seed=3)
W_pop = truth.whiteners()[0]

# Start from a small auxiliary batch and fold in the rest one sample at a time.
w = StreamingWhitener.from_aux(X[:20])
for n, x in enumerate(X[20:], start=21):
    w.update(x)
    if n in (50, 200, 1000, 5000):
        err = spectral_norm(w.whitener() - W_pop)
        print(f"n={n:5d}  |W_n - W|_2 = {err:.3f}")

# The streamed estimate is the plain sample average.
print("max deviation from batch mean", np.abs(w.cov - X.T @ X / len(X)).max())

# A capped whitener keeps the top eigenpairs and flattens the rest.
cw = w.capped_whitening_matrix(3)
print("capped whitener tail constant", round(cw.tail_constant, 4))
print("distance to full whitener", round(spectral_norm(cw.todense() - w.whitening_matrix()), 4))

# The auxiliary size the analysis asks for is very conservative.
B = float(np.max(np.sum(X ** 2, axis=1)))
print("prescribed auxiliary size", min_aux_size(B, truth.r_x, truth.r_x, 8, 8, 0.05))
