"""Path integration of linear matrix ODEs over a conformal grid.

Every integration here solves ``dY = G Y`` along grid edges, where the
generator ``G`` is supplied as a pair of samplers ``gen_x(x, y)``,
``gen_y(x, y)`` returning stacks of n x n matrices.  Each edge is covered by
``substeps`` classical RK4 steps; the generator is sampled at the start,
midpoint and end of every substep.
"""
import numpy as np

from . import kernels


def _edge_samples(substeps):
    return np.linspace(0.0, 1.0, 2 * substeps + 1)


def sweep_line(gen, xs, ys, Y0, tau):
    """Integrate along K edges for a batch of B parallel lines.

    ``xs``/``ys`` have shape (B, K, 2s+1) and give the sample coordinates;
    ``Y0`` has shape (B, n, m).  Returns (B, K+1, n, m).
    """
    G = gen(xs, ys)
    return kernels.rk4_sweep(G, Y0, tau)


def integrate_on_grid(grid, gen_x, gen_y, Y0, substeps=8):
    """Grid field Y with ``Y(base) = Y0``, ``Y_x = gen_x Y``, ``Y_y = gen_y Y``.

    Path convention: along the base row from the base column to the right
    and to the left, then along every column up and down from the base row.
    """
    Y0 = np.asarray(Y0, dtype=complex)
    nx, ny, i0, j0 = grid.nx, grid.ny, grid.i0, grid.j0
    xs, ys, hx, hy = grid.xs, grid.ys, grid.hx, grid.hy
    t = _edge_samples(substeps)
    out = np.empty((nx, ny) + Y0.shape, dtype=complex)

    row = np.empty((nx,) + Y0.shape, dtype=complex)
    row[i0] = Y0
    K = nx - 1 - i0
    if K:
        px = xs[i0] + hx * (np.arange(K)[:, None] + t[None, :])
        res = sweep_line(gen_x, px[None], np.full_like(px, ys[j0])[None], Y0[None], hx / substeps)
        row[i0:] = res[0]
    K = i0
    if K:
        px = xs[i0] - hx * (np.arange(K)[:, None] + t[None, :])
        res = sweep_line(gen_x, px[None], np.full_like(px, ys[j0])[None], Y0[None], -hx / substeps)
        row[: i0 + 1] = res[0][::-1]
    out[:, j0] = row

    K = ny - 1 - j0
    if K:
        py = ys[j0] + hy * (np.arange(K)[:, None] + t[None, :])
        PY = np.broadcast_to(py, (nx,) + py.shape)
        PX = np.broadcast_to(xs[:, None, None], PY.shape)
        res = sweep_line(gen_y, PX, PY, row, hy / substeps)
        out[:, j0:] = res
    K = j0
    if K:
        py = ys[j0] - hy * (np.arange(K)[:, None] + t[None, :])
        PY = np.broadcast_to(py, (nx,) + py.shape)
        PX = np.broadcast_to(xs[:, None, None], PY.shape)
        res = sweep_line(gen_y, PX, PY, row, -hy / substeps)
        out[:, : j0 + 1] = res[:, ::-1]
    return out


def integrate_path(grid, gen_x, gen_y, path, Y0, substeps=8):
    """Integrate along a list of grid nodes ``[(i, j), ...]`` joined by unit
    edges; returns the value at every node of the path."""
    Y = np.asarray(Y0, dtype=complex)
    t = _edge_samples(substeps)
    xs, ys, hx, hy = grid.xs, grid.ys, grid.hx, grid.hy
    values = [Y]
    for (i, j), (k, l) in zip(path[:-1], path[1:]):
        di, dj = k - i, l - j
        if abs(di) + abs(dj) != 1:
            raise ValueError(f"path step {(i, j)} -> {(k, l)} is not a grid edge")
        if not (0 <= k < grid.nx and 0 <= l < grid.ny):
            raise ValueError(f"path leaves the grid at {(k, l)}")
        if di:
            px = xs[i] + di * hx * t
            py = np.full_like(px, ys[j])
            res = sweep_line(gen_x, px[None, None], py[None, None], Y[None], di * hx / substeps)
        else:
            py = ys[j] + dj * hy * t
            px = np.full_like(py, xs[i])
            res = sweep_line(gen_y, px[None, None], py[None, None], Y[None], dj * hy / substeps)
        Y = res[0, -1]
        values.append(Y)
    return values


def plaquette_holonomy(grid, gen_x, gen_y, substeps=4):
    """Transport of the identity counter-clockwise around every grid cell
    (bottom, right, top, left); shape (nx-1, ny-1, n, n)."""
    xs, ys, hx, hy = grid.xs, grid.ys, grid.hx, grid.hy
    t = _edge_samples(substeps)
    X, Y = np.meshgrid(xs[:-1], ys[:-1], indexing="ij")
    X = X.ravel()
    Y = Y.ravel()
    B = X.size
    probe = gen_x(X[:1, None, None], Y[:1, None, None])
    n = probe.shape[-1]
    P = np.broadcast_to(np.eye(n, dtype=complex), (B, n, n)).copy()

    def edge(gen, px, py, P, tau):
        return sweep_line(gen, px[:, None, :], py[:, None, :], P, tau)[:, -1]

    ones = np.ones_like(t)
    P = edge(gen_x, X[:, None] + hx * t, Y[:, None] * ones, P, hx / substeps)
    P = edge(gen_y, (X[:, None] + hx) * ones, Y[:, None] + hy * t, P, hy / substeps)
    P = edge(gen_x, X[:, None] + hx - hx * t, (Y[:, None] + hy) * ones, P, -hx / substeps)
    P = edge(gen_y, X[:, None] * ones, Y[:, None] + hy - hy * t, P, -hy / substeps)
    return P.reshape(grid.nx - 1, grid.ny - 1, n, n)
