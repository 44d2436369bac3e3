"""Conformal grids, 1-forms and the differential operators of a map into S^2.

Conventions: the complex structure of the coordinate rectangle is
``J_M d/dx = d/dy`` so that ``(*w)(d/dx) = w(d/dy)`` and
``(*w)(d/dy) = -w(d/dx)``.  Fields are numpy arrays whose two leading axes
run over the grid (x index first); quaternion- and endomorphism-valued fields
carry trailing 2x2 matrix axes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RectBivariateSpline

from . import quatlib as ql
from .errors import DegenerateImmersion


@dataclass(frozen=True)
class ConformalGrid:
    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int
    i0: int = 0
    j0: int = 0

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError("grid needs at least 3 points per axis")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("grid extents must be increasing")
        if not (0 <= self.i0 < self.nx and 0 <= self.j0 < self.ny):
            raise ValueError("base point outside the grid")

    @classmethod
    def standard(cls, nx=64, ny=64, i0=0, j0=None):
        """The desk-scale box [0, 2pi] x [-1, 1]; base point on the x-axis."""
        if j0 is None:
            j0 = (ny - 1) // 2
        return cls(0.0, 2 * np.pi, -1.0, 1.0, nx, ny, i0, j0)

    @property
    def hx(self):
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def hy(self):
        return (self.y1 - self.y0) / (self.ny - 1)

    @property
    def h(self):
        return max(self.hx, self.hy)

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def xs(self):
        return self.x0 + self.hx * np.arange(self.nx)

    @property
    def ys(self):
        return self.y0 + self.hy * np.arange(self.ny)

    def mesh(self):
        return np.meshgrid(self.xs, self.ys, indexing="ij")

    @property
    def z(self):
        X, Y = self.mesh()
        return X + 1j * Y

    @property
    def base_xy(self):
        return self.xs[self.i0], self.ys[self.j0]

    def refined(self, factor=2):
        """Same box with spacing divided by ``factor``; base point kept."""
        return ConformalGrid(
            self.x0, self.x1, self.y0, self.y1,
            factor * (self.nx - 1) + 1, factor * (self.ny - 1) + 1,
            factor * self.i0, factor * self.j0,
        )


@dataclass
class OneForm:
    """A 1-form stored by its values on d/dx and d/dy."""

    x: np.ndarray
    y: np.ndarray

    def star(self):
        return OneForm(self.y, -self.x)

    def __add__(self, other):
        return OneForm(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return OneForm(self.x - other.x, self.y - other.y)

    def __neg__(self):
        return OneForm(-self.x, -self.y)

    def scale(self, c):
        return OneForm(c * self.x, c * self.y)

    def left(self, m):
        """Pointwise ``m @ w``."""
        return OneForm(m @ self.x, m @ self.y)

    def right(self, m):
        return OneForm(self.x @ m, self.y @ m)

    def norm(self):
        """Pointwise norm combining both components (Frobenius)."""
        return np.sqrt(ql.mnorm(self.x) ** 2 + ql.mnorm(self.y) ** 2)


@dataclass
class SurfaceData:
    """An immersion with Gauss map, conformal factor and Hopf differential.

    ``df`` and ``dN`` optionally hold exact derivatives; ``hopf_sampler`` maps
    coordinate arrays ``(x, y)`` to the exact Hopf field ``(A_x, A_y)``.
    When absent, finite differences and spline interpolation are used.
    """

    grid: ConformalGrid
    f: np.ndarray
    N: np.ndarray
    u: np.ndarray
    Qhopf: np.ndarray
    df: Optional[OneForm] = None
    dN: Optional[OneForm] = None
    hopf_sampler: Optional[Callable] = None
    notes: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# discrete derivatives


def ddx(grid, F, order=2):
    return _diff(F, grid.hx, 0, order)


def ddy(grid, F, order=2):
    return _diff(F, grid.hy, 1, order)


def _diff(F, h, axis, order):
    F = np.asarray(F)
    if order == 2:
        return np.gradient(F, h, axis=axis, edge_order=2)
    if order not in _CENTRAL:
        raise ValueError("order must be 2, 4 or 6")
    # higher-order stencils on the interior; the outer layers keep the
    # second-order one-sided/central values
    out = np.gradient(F, h, axis=axis, edge_order=2)
    n = F.shape[axis]
    weights = _CENTRAL[order]
    r = len(weights) // 2
    if n < 2 * r + 1:
        return out

    def sl(a, b):
        s = [slice(None)] * F.ndim
        s[axis] = slice(a, b)
        return tuple(s)

    acc = np.zeros_like(out[sl(r, n - r)])
    for k, w in enumerate(weights):
        if w:
            acc = acc + w * F[sl(k, n - 2 * r + k)]
    out[sl(r, n - r)] = acc / h
    return out


_CENTRAL = {
    4: (1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12),
    6: (-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60),
}


def d(grid, F, order=2):
    """Exterior derivative of a 0-form."""
    return OneForm(ddx(grid, F, order), ddy(grid, F, order))


def plaquette_d(grid, w):
    """Exterior derivative of a 1-form evaluated on (d/dx, d/dy) per cell,
    from the trapezoidal circulation around the cell; shape (nx-1, ny-1, ...)."""
    hx, hy = grid.hx, grid.hy
    wx, wy = w.x, w.y
    bottom = 0.5 * (wx[:-1, :-1] + wx[1:, :-1])
    top = 0.5 * (wx[:-1, 1:] + wx[1:, 1:])
    left = 0.5 * (wy[:-1, :-1] + wy[:-1, 1:])
    right = 0.5 * (wy[1:, :-1] + wy[1:, 1:])
    return (bottom - top) / hy + (right - left) / hx


def cell_average(F):
    F = np.asarray(F)
    return 0.25 * (F[:-1, :-1] + F[1:, :-1] + F[:-1, 1:] + F[1:, 1:])


def wedge(a, b):
    """``(a ^ b)(d/dx, d/dy)`` for matrix-valued 1-forms, pointwise."""
    return a.x @ b.y - a.y @ b.x


def bracket_wedge(a, b):
    """Graded bracket ``[a ^ b]`` on (d/dx, d/dy)."""
    return wedge(a, b) + wedge(b, a)


def interior(F, width=1):
    F = np.asarray(F)
    return F[width:-width, width:-width]


# ---------------------------------------------------------------------------
# operators of a map N into S^2


def tangent_part(N, w):
    """Part of a 1-form anti-commuting with N, ``(w + N w N)/2``: the
    projection of an Im H-valued form onto the tangent plane of S^2 at N."""
    return OneForm(0.5 * (w.x + N @ w.x @ N), 0.5 * (w.y + N @ w.y @ N))


def _dN(grid, N, dN):
    if dN is not None:
        return dN
    # finite differences leave the tangent plane at O(h^2); project back so
    # the algebraic type identities hold to rounding
    return tangent_part(N, d(grid, N))


def type_split_dN(grid, N, dN=None):
    """``(dN)' = (dN - N*dN)/2`` and ``(dN)'' = (dN + N*dN)/2``."""
    dN = _dN(grid, N, dN)
    NstardN = dN.star().left(N)
    return (dN - NstardN).scale(0.5), (dN + NstardN).scale(0.5)


def hopf_fields(grid, N, dN=None):
    """Hopf fields ``A = (J dJ + *dJ)/4`` and ``Q = (J dJ - *dJ)/4`` as 2x2
    matrices acting on columns (J is left multiplication by N)."""
    dN = _dN(grid, N, dN)
    JdJ = dN.left(N)
    sdJ = dN.star()
    return (JdJ + sdJ).scale(0.25), (JdJ - sdJ).scale(0.25)


def mean_curvature(grid, f, N, df=None, dN=None, min_df=1e-8):
    """Pointwise least-squares H with ``(dN)' = -H df``."""
    df = df if df is not None else d(grid, f)
    dNp, _ = type_split_dN(grid, N, dN)

    def ip(p, q):
        return 0.5 * np.einsum("...ab,...ab->...", p, np.conj(q)).real

    den = ip(df.x, df.x) + ip(df.y, df.y)
    if np.any(np.sqrt(den) < min_df):
        raise DegenerateImmersion("df vanishes on the grid")
    num = ip(dNp.x, df.x) + ip(dNp.y, df.y)
    return -num / den


def gauss_map_from_immersion(grid, f, df=None):
    """Left normal N with ``*df = N df``, i.e. ``N = f_y f_x^{-1}`` normalized."""
    df = df if df is not None else d(grid, f)
    N = df.y @ ql.inv2(df.x)
    return N / ql.qnorm(N)[..., None, None]


def conformality_residual(grid, f, N, df=None):
    """Pointwise max of ``|*df - N df|`` and ``|*df + df N|``."""
    df = df if df is not None else d(grid, f)
    sdf = df.star()
    r1 = (sdf - df.left(N)).norm()
    r2 = (sdf + df.right(N)).norm()
    return np.maximum(r1, r2)


def harmonic_residual(grid, N, dN=None):
    """Norm of the discrete ``d*A`` per cell; vanishes iff N is harmonic."""
    A, _ = hopf_fields(grid, N, dN)
    return ql.mnorm(plaquette_d(grid, A.star()))


def spline_sampler(grid, values):
    """Bicubic interpolant of a node field of any trailing shape; returns a
    callable ``(x, y) -> values`` for arbitrary coordinate arrays."""
    values = np.asarray(values)
    tail = values.shape[2:]
    flat = values.reshape(grid.nx, grid.ny, -1)
    splines = []
    for c in range(flat.shape[-1]):
        comp = flat[..., c]
        splines.append((
            RectBivariateSpline(grid.xs, grid.ys, comp.real, kx=3, ky=3),
            RectBivariateSpline(grid.xs, grid.ys, comp.imag, kx=3, ky=3),
        ))

    def sample(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.empty(x.shape + (len(splines),), dtype=complex)
        for c, (sr, si) in enumerate(splines):
            out[..., c] = sr.ev(x, y) + 1j * si.ev(x, y)
        return out.reshape(x.shape + tail)

    return sample


def hopf_sampler_from_nodes(grid, A):
    sx = spline_sampler(grid, A.x)
    sy = spline_sampler(grid, A.y)
    return lambda x, y: (sx(x, y), sy(x, y))


def surface_hopf_sampler(surface):
    """Exact Hopf sampler if the surface carries one, else a bicubic one
    built from (exact or finite-difference) node values."""
    if surface.hopf_sampler is not None:
        return surface.hopf_sampler
    A, _ = hopf_fields(surface.grid, surface.N, surface.dN)
    return hopf_sampler_from_nodes(surface.grid, A)
