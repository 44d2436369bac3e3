"""The C*-family of flat connections ``d_lambda`` of a harmonic map into S^2.

``d_lambda = d + (lambda - 1) A10 + (1/lambda - 1) A01`` acts on columns of
C^2 = (H, I); parallel sections solve ``d phi = -alpha_lambda phi``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import quatlib as ql
from . import surface as sf
from .errors import LambdaZero, TypeViolation, ZeroVector
from .transport import integrate_on_grid, integrate_path, plaquette_holonomy

DEFAULT_SUBSTEPS = 8


def _check_lambda(lam):
    lam = complex(lam)
    if lam == 0:
        raise LambdaZero("spectral parameter must be non-zero")
    return lam


def split_type(A):
    """(1,0) and (0,1) parts with respect to I (scalar i on columns)."""
    sA = A.star()
    return (A - sA.scale(1j)).scale(0.5), (A + sA.scale(1j)).scale(0.5)


@dataclass
class ConnectionFamily:
    grid: sf.ConformalGrid
    A10: sf.OneForm
    A01: sf.OneForm
    hopf_sampler: Optional[Callable] = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def sample_parts(self, x, y):
        """(A10_x, A10_y, A01_x, A01_y) at arbitrary coordinates.

        Samples are cached by coordinates: transport for different lambda
        visits the same points.
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        key = (x.shape, x.tobytes(), y.tobytes())
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.hopf_sampler is None:
            self.hopf_sampler = sf.hopf_sampler_from_nodes(self.grid, self.A10 + self.A01)
        Ax, Ay = self.hopf_sampler(x, y)
        out = (
            0.5 * (Ax - 1j * Ay),
            0.5 * (Ay + 1j * Ax),
            0.5 * (Ax + 1j * Ay),
            0.5 * (Ay - 1j * Ax),
        )
        if len(self._cache) >= 8:
            self._cache.pop(next(iter(self._cache)))
        self._cache[key] = out
        return out

    def alpha_samplers(self, lam):
        lam = _check_lambda(lam)
        c10, c01 = lam - 1, 1 / lam - 1

        def gen_x(x, y):
            a10x, _, a01x, _ = self.sample_parts(x, y)
            return c10 * a10x + c01 * a01x

        def gen_y(x, y):
            _, a10y, _, a01y = self.sample_parts(x, y)
            return c10 * a10y + c01 * a01y

        return gen_x, gen_y

    def transport_samplers(self, lam):
        gx, gy = self.alpha_samplers(lam)
        return (lambda x, y: -gx(x, y)), (lambda x, y: -gy(x, y))


@dataclass
class ParallelSection:
    mu: complex
    phi: np.ndarray
    v: np.ndarray


def from_hopf(grid, A, N=None, hopf_sampler=None, tol=1e-10):
    """Family of the Hopf field A; with N given, checks that A anti-commutes
    with J = N."""
    if N is not None:
        scale = 1.0 + max(np.max(ql.mnorm(A.x)), np.max(ql.mnorm(A.y)))
        dev = max(
            np.max(ql.mnorm(A.x @ N + N @ A.x)),
            np.max(ql.mnorm(A.y @ N + N @ A.y)),
        )
        if dev > tol * scale:
            raise TypeViolation(f"Hopf field does not anti-commute with J (deviation {dev:.3g})")
    A10, A01 = split_type(A)
    return ConnectionFamily(grid, A10, A01, hopf_sampler)


def family_of(surface, exact=True):
    """Associated family of the Gauss map of ``surface``; ``exact`` selects
    the analytic derivative data when the surface carries it."""
    grid = surface.grid
    if exact:
        A, _ = sf.hopf_fields(grid, surface.N, surface.dN)
        return from_hopf(grid, A, surface.N, surface.hopf_sampler)
    A, _ = sf.hopf_fields(grid, surface.N)
    return from_hopf(grid, A, surface.N)


def family_of_normal(grid, N, dN=None):
    A, _ = sf.hopf_fields(grid, N, dN)
    return from_hopf(grid, A, N)


def connection_form(family, lam):
    lam = _check_lambda(lam)
    return family.A10.scale(lam - 1) + family.A01.scale(1 / lam - 1)


def hopf_field_mu(family, mu):
    mu = _check_lambda(mu)
    return family.A10.scale(mu) + family.A01.scale(1 / mu)


def curvature_residual(family, lam, substeps=4):
    """Per-cell ``|P - id| / (hx hy)`` for the holonomy P around the cell."""
    lam = _check_lambda(lam)
    grid = family.grid
    if lam == 1:
        return np.zeros((grid.nx - 1, grid.ny - 1))
    gx, gy = family.transport_samplers(lam)
    P = plaquette_holonomy(grid, gx, gy, substeps)
    eye = np.eye(2)
    return ql.mnorm(P - eye) / (grid.hx * grid.hy)


def covariant_coclosed_residual(family, mu):
    """Per-cell norm of ``d_mu * A_mu`` (graded bracket with alpha_mu)."""
    Amu = hopf_field_mu(family, mu)
    sA = Amu.star()
    alpha = connection_form(family, mu)
    dpart = sf.plaquette_d(family.grid, sA)
    bpart = sf.cell_average(sf.bracket_wedge(alpha, sA))
    return ql.mnorm(dpart + bpart)


def _apply(form, phi):
    return sf.OneForm(
        np.einsum("...ab,...b->...a", form.x, phi),
        np.einsum("...ab,...b->...a", form.y, phi),
    )


def covariant_derivative(family, lam, phi, order=2):
    """``d_lambda phi`` for a section field (finite-difference d)."""
    grid = family.grid
    dphi = sf.d(grid, phi, order)
    return dphi + _apply(connection_form(family, lam), phi)


def reality_residual(family, lam, samples=4, seed=0):
    """Max over random sections of ``|d_lambda(phi j) - (d_{1/conj(lambda)} phi) j|``."""
    lam = _check_lambda(lam)
    lam_r = 1 / np.conj(lam)
    rng = np.random.default_rng(seed)
    grid = family.grid
    worst = 0.0
    for _ in range(samples):
        phi = rng.normal(size=grid.shape + (2,)) + 1j * rng.normal(size=grid.shape + (2,))
        lhs = covariant_derivative(family, lam, ql.times_j(phi))
        rhs = covariant_derivative(family, lam_r, phi)
        rhs = sf.OneForm(ql.times_j(rhs.x), ql.times_j(rhs.y))
        diff = lhs - rhs
        worst = max(worst, float(np.max(np.abs(diff.x))), float(np.max(np.abs(diff.y))))
    return worst


def parallel_transport(family, lam, path, v0, substeps=DEFAULT_SUBSTEPS):
    """Transport of the column ``v0`` along a grid path; returns the end value."""
    lam = _check_lambda(lam)
    v0 = np.asarray(v0, dtype=complex).reshape(2, 1)
    if lam == 1:
        return v0[:, 0].copy()
    gx, gy = family.transport_samplers(lam)
    return integrate_path(family.grid, gx, gy, path, v0, substeps)[-1][:, 0]


def parallel_section(family, mu, v, substeps=DEFAULT_SUBSTEPS):
    """d_mu-parallel section with value ``v`` at the base point."""
    mu = _check_lambda(mu)
    v = np.asarray(v, dtype=complex).reshape(2)
    if np.linalg.norm(v) == 0:
        raise ZeroVector("base value of a parallel section must be non-zero")
    grid = family.grid
    if mu == 1:
        phi = np.broadcast_to(v, grid.shape + (2,)).copy()
    else:
        gx, gy = family.transport_samplers(mu)
        phi = integrate_on_grid(grid, gx, gy, v.reshape(2, 1), substeps)[..., 0]
    return ParallelSection(mu, phi, v)
