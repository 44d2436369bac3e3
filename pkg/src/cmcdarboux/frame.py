"""Extended frames of CMC surfaces (H = 1) and the Sym-Bobenko formula.

The extended frame solves ``F^{-1} F_z = U_lambda``, ``F^{-1} F_zbar = V_lambda``
with::

    U = [[-u_z/4,            Q e^{-u/2}],      V = [[u_zbar/4,  e^{u/2}/(2 lambda)],
         [-lambda e^{u/2}/2,  u_z/4     ]]           [-conj(Q) e^{-u/2}, -u_zbar/4]]

so that ``F_x = F (U + V)`` and ``F_y = i F (U - V)``.  The frame is
normalized to the identity at the grid's base point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RectBivariateSpline

from . import quatlib as ql
from . import surface as sf
from .errors import BranchPoint, LambdaZero, NotUnitCircle, SingularFrame, ZeroVector
from .flat_family import DEFAULT_SUBSTEPS, ParallelSection, connection_form, family_of_normal
from .transport import integrate_on_grid

SIGMA3 = ql.pauli(3)


@dataclass
class ExtendedFrame:
    lam: complex
    F: np.ndarray
    grid: sf.ConformalGrid


@dataclass
class FrameDerivative:
    """``G = d/dt F_{e^{it}}`` at ``t = s``, together with the frame itself."""

    s: float
    F: np.ndarray
    G: np.ndarray
    grid: sf.ConformalGrid


def frame_generators(u, uz, Q, lam):
    """``U_lambda``, ``V_lambda`` from the conformal factor, its z-derivative
    and the Hopf differential (all broadcastable arrays)."""
    u, uz, Q = np.broadcast_arrays(
        np.asarray(u, dtype=float), np.asarray(uz, dtype=complex), np.asarray(Q, dtype=complex)
    )
    eu = np.exp(0.5 * u)
    emu = np.exp(-0.5 * u)
    uzb = np.conj(uz)
    U = np.empty(u.shape + (2, 2), dtype=complex)
    V = np.empty_like(U)
    U[..., 0, 0] = -uz / 4
    U[..., 0, 1] = Q * emu
    U[..., 1, 0] = -0.5 * lam * eu
    U[..., 1, 1] = uz / 4
    V[..., 0, 0] = uzb / 4
    V[..., 0, 1] = 0.5 / lam * eu
    V[..., 1, 0] = -np.conj(Q) * emu
    V[..., 1, 1] = -uzb / 4
    return U, V


def frame_generators_dt(u, lam):
    """``d/dt`` of ``U`` and ``V`` along ``lambda = e^{it}``, i.e.
    ``i lambda dU/dlambda`` and ``i lambda dV/dlambda``."""
    eu = np.exp(0.5 * np.asarray(u, dtype=float))
    dU = np.zeros(eu.shape + (2, 2), dtype=complex)
    dV = np.zeros_like(dU)
    dU[..., 1, 0] = 1j * lam * (-0.5 * eu)
    dV[..., 0, 1] = 1j * lam * (-0.5 / lam**2 * eu)
    return dU, dV


class FrameData:
    """Samples ``(u, u_z, Q)`` at arbitrary points from constants or node fields."""

    def __init__(self, grid, u, Qhopf):
        self.grid = grid
        self._u_const = np.ndim(u) == 0
        self._q_const = np.ndim(Qhopf) == 0
        if self._u_const:
            self.u = float(u)
        else:
            self.u = RectBivariateSpline(grid.xs, grid.ys, np.asarray(u, dtype=float))
        if self._q_const:
            self.Q = complex(Qhopf)
        else:
            Qa = np.asarray(Qhopf, dtype=complex)
            self.Q = (
                RectBivariateSpline(grid.xs, grid.ys, Qa.real),
                RectBivariateSpline(grid.xs, grid.ys, Qa.imag),
            )

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self._u_const:
            u = np.full(x.shape, self.u)
            uz = np.zeros(x.shape, dtype=complex)
        else:
            u = self.u.ev(x, y)
            uz = 0.5 * (self.u.ev(x, y, dx=1) - 1j * self.u.ev(x, y, dy=1))
        if self._q_const:
            Q = np.full(x.shape, self.Q, dtype=complex)
        else:
            Q = self.Q[0].ev(x, y) + 1j * self.Q[1].ev(x, y)
        return u, uz, Q


def _check_lambda(lam):
    lam = complex(lam)
    if lam == 0:
        raise LambdaZero("spectral parameter must be non-zero")
    return lam


def _swapT(M):
    return np.swapaxes(M, -1, -2)


def integrate_frame(grid, u, Qhopf, lam, substeps=DEFAULT_SUBSTEPS):
    lam = _check_lambda(lam)
    data = FrameData(grid, u, Qhopf)

    def gen_x(x, y):
        U, V = frame_generators(*data(x, y), lam)
        return _swapT(U + V)

    def gen_y(x, y):
        U, V = frame_generators(*data(x, y), lam)
        return _swapT(1j * (U - V))

    FT = integrate_on_grid(grid, gen_x, gen_y, np.eye(2, dtype=complex), substeps)
    return ExtendedFrame(lam, _swapT(FT), grid)


def frame_t_derivative(grid, u, Qhopf, s, substeps=DEFAULT_SUBSTEPS):
    """Augmented variational system for ``(F, dF/dt)`` at ``lambda = e^{is}``:
    ``[F, G]_x = [F, G] [[M_x, dM_x], [0, M_x]]`` and likewise in y."""
    lam = np.exp(1j * s)
    data = FrameData(grid, u, Qhopf)

    def block(M, dM):
        out = np.zeros(M.shape[:-2] + (4, 4), dtype=complex)
        out[..., :2, :2] = M
        out[..., :2, 2:] = dM
        out[..., 2:, 2:] = M
        return _swapT(out)

    def gen_x(x, y):
        uu, uz, Q = data(x, y)
        U, V = frame_generators(uu, uz, Q, lam)
        dU, dV = frame_generators_dt(uu, lam)
        return block(U + V, dU + dV)

    def gen_y(x, y):
        uu, uz, Q = data(x, y)
        U, V = frame_generators(uu, uz, Q, lam)
        dU, dV = frame_generators_dt(uu, lam)
        return block(1j * (U - V), 1j * (dU - dV))

    Y0 = np.zeros((4, 2), dtype=complex)
    Y0[:2, :] = np.eye(2)
    XT = integrate_on_grid(grid, gen_x, gen_y, Y0, substeps)
    X = _swapT(XT)
    return FrameDerivative(float(s), X[..., :, :2].copy(), X[..., :, 2:].copy(), grid)


def gauss_map_of_frame(F):
    return -1j * (F @ SIGMA3 @ ql.inv2(F))


def sym_bobenko(grid, u, Qhopf, substeps=DEFAULT_SUBSTEPS, min_df=1e-8):
    """CMC surface ``f = 2 (dF/dt) F^{-1}`` (imaginary part; the constant real
    part is recorded in ``notes``) with Gauss map ``N = -i F sigma_3 F^{-1}``."""
    fd = frame_t_derivative(grid, u, Qhopf, 0.0, substeps)
    Finv = ql.inv2(fd.F)
    raw = 2.0 * fd.G @ Finv
    re = ql.real_part(raw)
    f = ql.imag_part(raw)
    N = gauss_map_of_frame(fd.F)
    df = sf.d(grid, f)
    if np.any(df.norm() < min_df):
        raise BranchPoint("Sym-Bobenko immersion has a vanishing differential")
    u_arr = np.broadcast_to(np.asarray(u, dtype=float), grid.shape).copy()
    Q_arr = np.broadcast_to(np.asarray(Qhopf, dtype=complex), grid.shape).copy()
    notes = {"real_part_mean": float(np.mean(re)), "real_part_deviation": float(np.max(np.abs(re - np.mean(re))))}
    return sf.SurfaceData(grid, f, N, u_arr, Q_arr, notes=notes), fd


def frame_to_connection(frame, frame1, family):
    """Max interior ``|S^{-1} dS - alpha_lambda|`` with ``S = F_lambda F^{-1}``."""
    grid = frame.grid
    S = frame.F @ ql.inv2(frame1.F)
    if np.min(np.abs(ql.det2(S))) < 1e-12:
        raise SingularFrame("gauge S_lambda is singular")
    Sinv = ql.inv2(S)
    dS = sf.d(grid, S)
    form = sf.OneForm(Sinv @ dS.x, Sinv @ dS.y)
    alpha = connection_form(family, frame.lam)
    res = (form - alpha).norm()
    return float(np.max(sf.interior(res))), form


def parallel_section_via_frame(frame1, frame_mu, v):
    """``phi = F F_mu^{-1} v``."""
    v = np.asarray(v, dtype=complex).reshape(2)
    if np.linalg.norm(v) == 0:
        raise ZeroVector("base value of a parallel section must be non-zero")
    if np.min(np.abs(ql.det2(frame_mu.F))) < 1e-14:
        raise SingularFrame("extended frame is singular")
    phi = np.einsum("...ab,b->...a", frame1.F @ ql.inv2(frame_mu.F), v)
    return ParallelSection(frame_mu.lam, phi, v)


def associated_normal(N, section, tol=1e-12):
    """``N_phi = phi^{-1} N phi`` for a section parallel at ``|mu| = 1``."""
    if abs(abs(section.mu) - 1.0) > tol:
        raise NotUnitCircle("associated family needs mu on the unit circle")
    P = ql.col_to_mat(section.phi)
    return ql.inv2(P) @ N @ P


def associated_surface(grid, u, Qhopf, s, v=(1.0, 0.0), substeps=DEFAULT_SUBSTEPS):
    """Member ``f_phi = -2 phi^{-1} d/dt phi_{e^{it}}|_{t=s}`` of the associated
    family, built from ``phi_lambda = F F_lambda^{-1} v``.

    Returns ``(surface, section)`` where ``surface.N`` is ``N_phi``.
    """
    v = np.asarray(v, dtype=complex).reshape(2)
    F1 = integrate_frame(grid, u, Qhopf, 1.0, substeps)
    fd = frame_t_derivative(grid, u, Qhopf, s, substeps)
    mu = np.exp(1j * s)
    Fmu_inv = ql.inv2(fd.F)
    phi = np.einsum("...ab,b->...a", F1.F @ Fmu_inv, v)
    dphi = -np.einsum("...ab,b->...a", F1.F @ Fmu_inv @ fd.G @ Fmu_inv, v)
    P = ql.col_to_mat(phi)
    raw = -2.0 * ql.inv2(P) @ ql.col_to_mat(dphi)
    re = ql.real_part(raw)
    f = ql.imag_part(raw)
    N0 = gauss_map_of_frame(F1.F)
    section = ParallelSection(mu, phi, v)
    Nphi = associated_normal(N0, section, tol=1e-9)
    u_arr = np.broadcast_to(np.asarray(u, dtype=float), grid.shape).copy()
    Q_arr = np.broadcast_to(np.asarray(Qhopf, dtype=complex), grid.shape).copy()
    notes = {"real_part_deviation": float(np.max(np.abs(re - np.mean(re))))}
    return sf.SurfaceData(grid, f, Nphi, u_arr, Q_arr, notes=notes), section


def gauge_identity_residual(family, N, section, lam):
    """Per-node ``|Phi alpha^phi_lambda Phi^{-1} - dPhi Phi^{-1} - alpha_{lambda mu}|``
    where ``alpha^phi`` is the family of ``N_phi`` (finite differences)."""
    grid = family.grid
    Nphi = associated_normal(N, section, tol=1e-9)
    fam_phi = family_of_normal(grid, Nphi)
    a_phi = connection_form(fam_phi, lam)
    P = ql.col_to_mat(section.phi)
    Pinv = ql.inv2(P)
    dP = sf.d(grid, P)
    gauged = sf.OneForm(P @ a_phi.x @ Pinv - dP.x @ Pinv, P @ a_phi.y @ Pinv - dP.y @ Pinv)
    target = connection_form(family, lam * section.mu)
    return (gauged - target).norm()
