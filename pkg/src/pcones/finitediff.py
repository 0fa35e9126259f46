"""Central finite differences used as independent derivative oracles."""

import numpy as np


def fd_gradient(f, x, h=None):
    """Central-difference gradient of scalar ``f`` at ``x``.

    Default step is ``1e-6 * max(1, max|x_i|)``.
    """
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-6 * max(1.0, float(np.max(np.abs(x))))
    g = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def fd_jacobian(F, x, h=1e-5):
    """Central-difference Jacobian of vector ``F``; column k is dF/dx_k."""
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        cols.append((np.asarray(F(x + e)) - np.asarray(F(x - e))) / (2.0 * h))
    return np.stack(cols, axis=-1)
