"""The two projections the solvers rely on, shown on small spectra."""

import numpy as np

from streamcca.meg import bregman_project
from streamcca.msg import project_F
from streamcca.spectral import entropy_cap, project_capped_box_sum

np.set_printoptions(precision=4, suppress=True)

# Singular values are projected onto the box [0, 1] with a sum budget k.
# When clipping alone fits the budget nothing else happens.
print(project_capped_box_sum([1.5, -0.2], 2))

# Otherwise every value is shifted down by the same amount before clipping.
# Here the shift is 0.65.
s = np.array([1.5, 0.8, 0.3])
v = project_capped_box_sum(s, 1)
print(v, "shift", round(s[1] - v[1], 4))

# On matrices the same map acts on the singular values only.
rng = np.random.default_rng(0)
X = 2 * rng.standard_normal((5, 4))
P = project_F(X, 2)
sv = np.linalg.svd(P, compute_uv=False)
print("singular values before", np.linalg.svd(X, compute_uv=False))
print("singular values after ", sv, "sum", sv.sum())

# The MEG iterate is a density matrix whose eigenvalues may not exceed 1/k.
# The relative-entropy projection pins the large ones at the cap and
# rescales the rest proportionally.
print(entropy_cap([0.7, 0.2, 0.1], 0.5, 1.0))

Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
N = (Q * [0.7, 0.2, 0.1]) @ Q.T
print(np.linalg.eigvalsh(bregman_project(N, 2))[::-1])
