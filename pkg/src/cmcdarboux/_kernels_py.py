"""Pure numpy reference implementation of the transport kernels."""
import numpy as np


def rk4_sweep(G, Y0, tau):
    """Integrate ``Y' = G(t) Y`` along batches of edge chains.

    ``G`` has shape (B, K, 2s+1, n, n): for each of B independent paths, K
    consecutive edges, each split into s classical RK4 substeps of length
    ``tau``; the 2s+1 samples are the generator at substep starts, midpoints
    and ends.  ``Y0`` has shape (B, n, m).  Returns node values, shape
    (B, K+1, n, m).
    """
    G = np.asarray(G, dtype=np.complex128)
    Y = np.array(Y0, dtype=np.complex128)
    B, K, S2, n, _ = G.shape
    nsub = (S2 - 1) // 2
    out = np.empty((B, K + 1) + Y.shape[1:], dtype=np.complex128)
    out[:, 0] = Y
    half = 0.5 * tau
    for k in range(K):
        for s in range(nsub):
            A0 = G[:, k, 2 * s]
            Am = G[:, k, 2 * s + 1]
            A1 = G[:, k, 2 * s + 2]
            k1 = A0 @ Y
            k2 = Am @ (Y + half * k1)
            k3 = Am @ (Y + half * k2)
            k4 = A1 @ (Y + tau * k3)
            Y = Y + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[:, k + 1] = Y
    return out
