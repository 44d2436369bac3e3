"""The vacuum solution u = u0, Q = e^{u0}/2: closed-form frames and the round
cylinder of radius 1/2.

With constant coefficients ``U_lambda`` and ``V_lambda`` commute, so the
extended frame is ``F_lambda = exp((z - z0) U_lambda + conj(z - z0) V_lambda)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quatlib as ql
from . import surface as sf
from .frame import SIGMA3, frame_generators, frame_generators_dt, gauss_map_of_frame

_SERIES_W = 1e-3


def _cosh_sinhc(w):
    """``C(w) = cosh(sqrt w)``, ``S(w) = sinh(sqrt w)/sqrt w`` and ``S'(w)``."""
    w = np.asarray(w, dtype=complex)
    r = np.sqrt(w)
    small = np.abs(w) < _SERIES_W
    rs = np.where(small, 1.0, r)
    C = np.cosh(r)
    S = np.where(small, 1 + w / 6 + w**2 / 120 + w**3 / 5040, np.sinh(rs) / rs)
    ws = np.where(small, 1.0, w)
    dS = np.where(
        small,
        1 / 6 + w / 60 + w**2 / 1680 + w**3 / 90720,
        (C - S) / (2 * ws),
    )
    return C, S, dS


def expm_traceless(M):
    """exp of a stack of traceless 2x2 matrices (``M^2 = w I``, ``w = -det M``)."""
    w = -ql.det2(M)
    C, S, _ = _cosh_sinhc(w)
    return C[..., None, None] * np.eye(2) + S[..., None, None] * M


def dexpm_traceless(M, dM):
    """Directional derivative of ``exp`` at traceless M in the direction dM."""
    w = M[..., 0, 0] ** 2 + M[..., 0, 1] * M[..., 1, 0]
    dw = 2 * M[..., 0, 0] * dM[..., 0, 0] + dM[..., 0, 1] * M[..., 1, 0] + M[..., 0, 1] * dM[..., 1, 0]
    C, S, dS = _cosh_sinhc(w)
    return (
        (0.5 * S * dw)[..., None, None] * np.eye(2)
        + (dS * dw)[..., None, None] * M
        + S[..., None, None] * dM
    )


class VacuumCylinder:
    """Closed-form data of the vacuum solution on a grid."""

    def __init__(self, grid, u0=0.0, Q0=0.5, tol=1e-12):
        self.grid = grid
        self.u0 = float(u0)
        self.Q0 = complex(Q0)
        err = self.commutator_norm(2.0)
        if err > tol:
            raise ValueError(
                f"U and V do not commute for u0={u0}, Q0={Q0} (|[U,V]| = {err:.3g}); "
                "the vacuum needs |Q0| = exp(u0)/2"
            )

    def UV(self, lam):
        return frame_generators(self.u0, 0.0, self.Q0, complex(lam))

    def commutator_norm(self, lam):
        U, V = self.UV(lam)
        return float(ql.mnorm(U @ V - V @ U))

    def _exponent(self, lam, x, y):
        bx, by = self.grid.base_xy
        dz = (np.asarray(x) - bx) + 1j * (np.asarray(y) - by)
        U, V = self.UV(lam)
        return dz[..., None, None] * U + np.conj(dz)[..., None, None] * V, dz

    def frame(self, lam, x=None, y=None):
        if x is None:
            x, y = self.grid.mesh()
        M, _ = self._exponent(lam, x, y)
        return expm_traceless(M)

    def frame_dt(self, s, x=None, y=None):
        """``(F, dF/dt)`` at ``lambda = e^{is}`` in closed form."""
        if x is None:
            x, y = self.grid.mesh()
        lam = np.exp(1j * s)
        M, dz = self._exponent(lam, x, y)
        dU, dV = frame_generators_dt(self.u0, lam)
        dM = dz[..., None, None] * dU + np.conj(dz)[..., None, None] * dV
        return expm_traceless(M), dexpm_traceless(M, dM)

    def immersion(self, x=None, y=None):
        F, G = self.frame_dt(0.0, x, y)
        return 2.0 * G @ ql.inv2(F)

    def df(self, x, y):
        """``f_x = -i e^{u/2} F sigma_1 F^{-1}``, ``f_y = -i e^{u/2} F sigma_2 F^{-1}``."""
        F = self.frame(1.0, x, y)
        Fi = ql.inv2(F)
        e = np.exp(0.5 * self.u0)
        return (-1j * e * (F @ ql.pauli(1) @ Fi), -1j * e * (F @ ql.pauli(2) @ Fi))

    def dN(self, x, y):
        F = self.frame(1.0, x, y)
        Fi = ql.inv2(F)
        U, V = self.UV(1.0)
        Mx, My = U + V, 1j * (U - V)
        com = lambda M: M @ SIGMA3 - SIGMA3 @ M
        return (-1j * (F @ com(Mx) @ Fi), -1j * (F @ com(My) @ Fi))

    def hopf_sampler(self, x, y):
        """Exact Hopf field ``A = -(1/2) *df`` (valid since H = 1)."""
        fx, fy = self.df(x, y)
        return -0.5 * fy, 0.5 * fx

    def surface(self):
        grid = self.grid
        X, Y = grid.mesh()
        F = self.frame(1.0, X, Y)
        f = ql.imag_part(self.immersion(X, Y))
        N = gauss_map_of_frame(F)
        df = sf.OneForm(*self.df(X, Y))
        dN = sf.OneForm(*self.dN(X, Y))
        return sf.SurfaceData(
            grid,
            f,
            N,
            np.full(grid.shape, self.u0),
            np.full(grid.shape, self.Q0, dtype=complex),
            df=df,
            dN=dN,
            hopf_sampler=self.hopf_sampler,
            notes={"datum": "vacuum_cylinder", "u0": self.u0, "Q0": [self.Q0.real, self.Q0.imag]},
        )


def vacuum_cylinder(grid, u0=0.0, Q0=0.5):
    """Vacuum datum; returns ``(SurfaceData, VacuumCylinder)``."""
    vac = VacuumCylinder(grid, u0, Q0)
    return vac.surface(), vac


@dataclass
class CylinderFit:
    axis: np.ndarray
    center: np.ndarray
    radius: float
    radial_deviation: float


def fit_cylinder(points, normals):
    """Best-fit cylinder: the axis is the direction most orthogonal to all
    normals, the cross-section a least-squares circle in the orthogonal plane."""
    P = np.asarray(points, dtype=float).reshape(-1, 3)
    Nn = np.asarray(normals, dtype=float).reshape(-1, 3)
    evals, evecs = np.linalg.eigh(Nn.T @ Nn)
    axis = evecs[:, 0]
    e1 = np.cross(axis, [1.0, 0.0, 0.0])
    if np.linalg.norm(e1) < 0.5:
        e1 = np.cross(axis, [0.0, 1.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    a, b = P @ e1, P @ e2
    # Kasa fit: a^2 + b^2 = 2 c_a a + 2 c_b b + k
    Amat = np.column_stack([2 * a, 2 * b, np.ones_like(a)])
    sol, *_ = np.linalg.lstsq(Amat, a**2 + b**2, rcond=None)
    ca, cb, k = sol
    radius = float(np.sqrt(k + ca**2 + cb**2))
    dist = np.hypot(a - ca, b - cb)
    center = ca * e1 + cb * e2
    return CylinderFit(axis, center, radius, float(np.max(np.abs(dist - radius))))
