"""Frame transport g' = g X(t) by a fourth-order Magnus step."""
import numpy as np
from scipy.linalg import expm

from .e21 import GroupElement, reorthonormalize
from .errors import IntegrationFailure

_C = np.sqrt(3.0) / 6.0
_W = np.sqrt(3.0) / 12.0


def magnus4(X, t, h):
    """One step of size h for g' = g X(t); X maps time to a 4x4 matrix.

    Two Gauss nodes; Omega = h/2 (X1 + X2) + sqrt(3)/12 h^2 [X1, X2]
    (right-multiplied form of the usual left-invariant Magnus expansion).
    """
    X1 = X(t + (0.5 - _C) * h)
    X2 = X(t + (0.5 + _C) * h)
    return expm(0.5 * h * (X1 + X2) + _W * h * h * (X1 @ X2 - X2 @ X1))


def transport(X, g0: GroupElement, t, dt_max):
    """Solve g' = g X(t) with g(t[0]) = g0 and return matrices on the grid t.

    Each grid interval is split into equal substeps no longer than dt_max;
    the linear part is re-orthonormalized after every substep.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty((len(t), 4, 4))
    M = g0.matrix
    out[0] = M
    for i in range(1, len(t)):
        span = t[i] - t[i - 1]
        n = max(1, int(np.ceil(abs(span) / dt_max - 1e-9)))
        h = span / n
        for j in range(n):
            M = M @ magnus4(X, t[i - 1] + j * h, h)
            M[1:, 1:] = reorthonormalize(M[1:, 1:])
        if not np.all(np.isfinite(M)):
            raise IntegrationFailure(f"frame became non-finite near t = {t[i]:g}")
        out[i] = M
    return out
