"""Pure-Python versions of the compiled kernels in ``_ckernels.pyx``."""

import numpy as np


def update_column(g, x):
    n = x.shape[0]
    if g.shape != (n, n):
        raise ValueError("g must be square and match len(x)")
    for i in range(n):
        eta = g[i] @ x - g[i, i] * x[i]
        mag = abs(eta)
        x[i] = eta / mag if mag > 0 else 1.0
