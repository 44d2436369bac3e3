"""mu-Darboux transforms, simple factor dressing and their comparison.

A d_mu-parallel section ``phi`` (a column field) is read as a quaternion field
through :func:`quatlib.col_to_mat`; complex scalars ``c`` are embedded as
``diag(c, conj c)`` so that ``phi c phi^{-1}`` is a genuine quaternion
conjugation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import quatlib as ql
from . import surface as sf
from .errors import MuForbidden, PoleAt, SingularTransform, ZeroH, ZeroSection
from .flat_family import connection_form

GUARD = 1e-10
UNIT_CIRCLE_TOL = 1e-12


@dataclass(frozen=True)
class MuParams:
    mu: complex
    a: complex
    b: complex

    @property
    def on_unit_circle(self):
        return abs(abs(self.mu) - 1.0) < UNIT_CIRCLE_TOL

    @property
    def is_real(self):
        return self.mu.imag == 0


def mu_params(mu):
    mu = complex(mu)
    if mu == 0 or mu == 1:
        raise MuForbidden(f"mu = {mu} is not allowed (needs mu not in {{0, 1}})")
    return MuParams(mu, (mu + 1 / mu) / 2, 1j * (1 / mu - mu) / 2)


def _params(mu_or_params):
    if isinstance(mu_or_params, MuParams):
        return mu_or_params
    return mu_params(mu_or_params)


def _phi_matrix(section):
    phi = np.asarray(section.phi)
    n = np.sqrt(np.sum(np.abs(phi) ** 2, axis=-1))
    if np.min(n) < GUARD:
        raise ZeroSection("parallel section vanishes on the grid")
    return ql.col_to_mat(phi)


def conjugated_scalars(section, params=None):
    """``a_hat = phi a phi^{-1}`` and ``b_hat = phi b phi^{-1}``."""
    p = _params(section.mu if params is None else params)
    P = _phi_matrix(section)
    Pinv = ql.inv2(P)
    shape = P.shape[:-2]

    def conj(c):
        # real scalars are central in H
        if c.imag == 0:
            return ql.scalar_mat(c, shape)
        return P @ ql.scalar_mat(c, shape) @ Pinv

    return conj(p.a), conj(p.b)


def mu_darboux_T(N, section, params=None, guard=GUARD):
    """``T = (N (a_hat - 1) + b_hat) / 2``."""
    ahat, bhat = conjugated_scalars(section, params)
    eye = np.eye(2)
    if np.min(ql.qnorm(eye - ahat)) < guard:
        raise SingularTransform("|1 - a_hat| fell below the guard")
    T = 0.5 * (N @ (ahat - eye) + bhat)
    if np.min(ql.qnorm(T)) < guard:
        raise SingularTransform("|T| fell below the guard")
    return T


def initial_condition_residual(T, N, ahat, bhat):
    """Pointwise ``|2 T (1 - a_hat)^{-1} + N - b_hat (1 - a_hat)^{-1}|``."""
    w = ql.inv2(np.eye(2) - ahat)
    return ql.qnorm(2 * T @ w + N - bhat @ w)


def riccati_residual(grid, T, N, ahat, dN=None, order=2):
    """Pointwise ``|dT - (dN)'' (a_hat - 1)/2 + T (dN)' T|``."""
    dT = sf.d(grid, T, order)
    dNp, dNpp = sf.type_split_dN(grid, N, dN)
    c = 0.5 * (ahat - np.eye(2))
    res = sf.OneForm(
        dT.x - dNpp.x @ c + T @ dNp.x @ T,
        dT.y - dNpp.y @ c + T @ dNp.y @ T,
    )
    return res.norm()


def proof_identity_residual(T, N, ahat):
    """Pointwise ``|T_h^2 + T_h N + N T_h - rho_hat^{-1}|`` where
    ``rho_hat = (1 - a_hat)/2`` and ``T_h = T rho_hat^{-1}``."""
    rho_inv = ql.inv2(0.5 * (np.eye(2) - ahat))
    Th = T @ rho_inv
    return ql.qnorm(Th @ Th + Th @ N + N @ Th - rho_inv)


def mu_darboux_normal(N, section, params=None):
    """Transform ``T^{-1} N T`` of the harmonic map N.

    On the unit circle a and b are real, so T lies in span(1, N) and
    commutes with N; the result is N itself.
    """
    p = _params(section.mu if params is None else params)
    T = mu_darboux_T(N, section, p)
    if p.on_unit_circle:
        return np.array(N, copy=True)
    return ql.inv2(T) @ N @ T


def _s2_distance(P, Q):
    """Great-circle distance between stacks of unit imaginary quaternions."""
    chord = np.linalg.norm(ql.to_r3(P) - ql.to_r3(Q), axis=-1)
    return 2 * np.arcsin(np.clip(chord / 2, 0.0, 1.0))


@dataclass
class DarbouxResult:
    params: MuParams
    T: np.ndarray
    fhat: np.ndarray
    Nhat: np.ndarray
    ahat: np.ndarray
    bhat: np.ndarray
    residuals: dict = field(default_factory=dict)
    gauss_sign: int = -1

    @property
    def rho_hat(self):
        return 0.5 * (np.eye(2) - self.ahat)

    @property
    def T_hat(self):
        return self.T @ ql.inv2(self.rho_hat)

    @property
    def surface_part(self):
        return ql.imag_part(self.fhat)


def mu_darboux_surface(grid, f, N, section, dN=None, df=None, params=None):
    """``f_hat = f + T^{-1}`` with diagnostics.

    The Gauss map of ``Im f_hat`` is measured from finite differences and
    compared with both ``-T^{-1} N T`` and ``+T^{-1} N T``; ``gauss_sign``
    records the one that matches and ``Nhat`` is stored with that sign.
    """
    p = _params(section.mu if params is None else params)
    ahat, bhat = conjugated_scalars(section, p)
    T = mu_darboux_T(N, section, p)
    Tinv = ql.inv2(T)
    fhat = f + Tinv
    conj = Tinv @ N @ T

    fim = ql.imag_part(fhat)
    measured = sf.gauss_map_from_immersion(grid, fim)
    inner = sf.interior(measured)
    d_minus = float(np.max(_s2_distance(inner, sf.interior(-conj))))
    d_plus = float(np.max(_s2_distance(inner, sf.interior(conj))))
    sign = -1 if d_minus <= d_plus else 1
    Nhat = sign * conj

    re = ql.real_part(fhat)
    scale = 1.0 + float(np.max(ql.qnorm(fhat)))
    H = sf.mean_curvature(grid, fim, Nhat)
    res = {
        "T_min_norm": float(np.min(ql.qnorm(T))),
        "T_real_part_max": float(np.max(np.abs(ql.real_part(T)))),
        "initial_condition": float(np.max(initial_condition_residual(T, N, ahat, bhat))),
        "real_part_deviation": float(np.max(np.abs(re - np.mean(re)))) / scale,
        "riccati": riccati_residual(grid, T, N, ahat, dN),
        "mean_curvature": H,
        "conformality": sf.conformality_residual(grid, fim, Nhat),
        "gauss_distance_minus": d_minus,
        "gauss_distance_plus": d_plus,
    }
    return DarbouxResult(p, T, fhat, Nhat, ahat, bhat, res, sign)


def darboux_left_normal(grid, f, N, Hfield, section, params=None, zero_tol=GUARD, exclude_zeros=False):
    """``f_hat = f + (H T)^{-1}`` for a surface with ``(dN)' = -df H``.

    Points where ``|H|`` drops below ``zero_tol`` raise :class:`ZeroH`, or are
    set to NaN when ``exclude_zeros`` is true.  The result carries the left
    normal ``-T^{-1} N T``; ``notes["constant"]`` flags a constant transform.
    """
    p = _params(section.mu if params is None else params)
    Hfield = np.asarray(Hfield, dtype=complex)
    if Hfield.shape[-2:] != (2, 2):
        Hfield = ql.scalar_mat(Hfield, Hfield.shape)
    zeros = ql.qnorm(Hfield) < zero_tol
    if np.any(zeros) and not exclude_zeros:
        raise ZeroH(f"H vanishes at {int(zeros.sum())} grid points")
    T = mu_darboux_T(N, section, p)
    safe = np.where(zeros[..., None, None], np.eye(2), Hfield)
    fhat = f + ql.inv2(safe @ T)
    Nhat = -ql.inv2(T) @ N @ T
    fhat = np.where(zeros[..., None, None], np.nan, fhat)
    Nhat = np.where(zeros[..., None, None], np.nan, Nhat)
    dfh = sf.d(grid, fhat)
    notes = {
        "mu": [p.mu.real, p.mu.imag],
        "excluded_points": int(zeros.sum()),
        "constant": bool(np.nanmax(dfh.norm()) < 1e-10),
    }
    shape = grid.shape
    return sf.SurfaceData(
        grid, fhat, Nhat, np.full(shape, np.nan), np.full(shape, np.nan, dtype=complex), notes=notes
    )


# ---------------------------------------------------------------------------
# simple factor dressing


def gamma(lam, mu):
    """Scalar factor of the simple dressing matrix; ``lam = inf`` is allowed."""
    mu = complex(mu)
    if mu == 0 or mu == 1 or abs(abs(mu) - 1.0) < UNIT_CIRCLE_TOL:
        raise MuForbidden("gamma needs mu outside the unit circle and 0")
    c = (1 - 1 / np.conj(mu)) / (1 - mu)
    if np.isinf(lam):
        return c
    lam = complex(lam)
    pole = 1 / np.conj(mu)
    if abs(lam - pole) == 0:
        raise PoleAt(f"gamma has a pole at lambda = {pole}")
    return c * (lam - mu) / (lam - pole)


def gamma_derivative(lam, mu):
    """``d gamma / d lambda``."""
    mu = complex(mu)
    c = (1 - 1 / np.conj(mu)) / (1 - mu)
    pole = 1 / np.conj(mu)
    return c * (mu - pole) / (lam - pole) ** 2


def line_projection(phi):
    """Hermitian projection onto span(phi) and onto its complement span(phi j)."""
    phi = np.asarray(phi, dtype=complex)
    n2 = np.sum(np.abs(phi) ** 2, axis=-1)
    if np.min(n2) < GUARD**2:
        raise ZeroSection("section vanishes on the grid")
    pi = np.einsum("...a,...b->...ab", phi, np.conj(phi)) / n2[..., None, None]
    return pi, np.eye(2) - pi


def eigenline(N):
    """A column spanning the ``+i`` eigenline of N (as a complex matrix)."""
    P = 0.5 * (np.eye(2) - 1j * N)
    c0, c1 = P[..., :, 0], P[..., :, 1]
    pick = np.linalg.norm(c0, axis=-1) >= np.linalg.norm(c1, axis=-1)
    return np.where(pick[..., None], c0, c1)


def sphere_from_columns(w):
    """Vectorized ``w i w^{-1}`` for a stack of non-zero columns."""
    Wm = ql.col_to_mat(w)
    return Wm @ ql.scalar_mat(1j) @ ql.inv2(Wm)


@dataclass
class DressingResult:
    mu: complex
    grid: Optional[sf.ConformalGrid]
    pi: np.ndarray
    rInf: np.ndarray
    r0: np.ndarray
    omega10: Optional[sf.OneForm]
    omega01: Optional[sf.OneForm]
    Nhat: np.ndarray
    E: np.ndarray
    Ehat: np.ndarray
    trivial: bool = False

    def r(self, lam):
        if self.trivial:
            return np.broadcast_to(np.eye(2, dtype=complex), self.pi.shape).copy()
        g = gamma(lam, self.mu)
        return g * self.pi + (np.eye(2) - self.pi)


def simple_factor_dress(N, section, family=None):
    """Simple factor dressing of N by the line spanned by ``section``.

    With ``family`` given, the dressed Hopf parts ``omega10 = Ad(r_inf) A10``
    and ``omega01 = Ad(r_0) A01`` are filled in.
    """
    mu = complex(section.mu)
    if mu == 0 or mu == 1:
        raise MuForbidden(f"mu = {mu} is not allowed")
    grid = family.grid if family is not None else None
    E = eigenline(N)
    pi, pi_perp = line_projection(section.phi)
    if abs(abs(mu) - 1.0) < UNIT_CIRCLE_TOL:
        eye = np.broadcast_to(np.eye(2, dtype=complex), pi.shape).copy()
        om10 = family.A10 if family is not None else None
        om01 = family.A01 if family is not None else None
        return DressingResult(mu, grid, pi, eye, eye.copy(), om10, om01, N.copy(), E, E.copy(), True)
    rInf = gamma(np.inf, mu) * pi + pi_perp
    r0 = gamma(0.0, mu) * pi + pi_perp
    Ehat = np.einsum("...ab,...b->...a", rInf, E)
    Nhat = sphere_from_columns(Ehat)
    om10 = om01 = None
    if family is not None:
        rInf_inv, r0_inv = ql.inv2(rInf), ql.inv2(r0)
        om10 = sf.OneForm(rInf @ family.A10.x @ rInf_inv, rInf @ family.A10.y @ rInf_inv)
        om01 = sf.OneForm(r0 @ family.A01.x @ r0_inv, r0 @ family.A01.y @ r0_inv)
    return DressingResult(mu, grid, pi, rInf, r0, om10, om01, Nhat, E, Ehat)


def nilpotency_residual(form):
    """Max of ``|w(d/dx)^2|`` and ``|w(d/dy)^2|``."""
    return float(max(np.max(ql.mnorm(form.x @ form.x)), np.max(ql.mnorm(form.y @ form.y))))


def reality_condition_residual(dress, phi, lam):
    """``|(r_lam phi) j gamma_{1/conj lam} - r_{1/conj lam} (phi j)|``."""
    lam_r = 1 / np.conj(complex(lam))
    lhs = ql.times_j(np.einsum("...ab,...b->...a", dress.r(lam), phi)) * gamma(lam_r, dress.mu)
    rhs = np.einsum("...ab,...b->...a", dress.r(lam_r), ql.times_j(phi))
    return float(np.max(np.abs(lhs - rhs)))


def equivalence_check(N, section):
    """Max S^2-distance between the dressed N and ``T^{-1} N T``."""
    dressed = simple_factor_dress(N, section).Nhat
    return float(np.max(_s2_distance(dressed, mu_darboux_normal(N, section))))


def eigenline_angle(T, ahat, dress):
    """Max angle between the complex lines ``T_h E`` and ``r_inf E``."""
    Th = T @ ql.inv2(0.5 * (np.eye(2) - ahat))
    w1 = np.einsum("...ab,...b->...a", Th, dress.E)
    w2 = dress.Ehat
    # sine of the angle between complex lines in C^2 from the 2x2 determinant
    det = np.abs(w1[..., 0] * w2[..., 1] - w1[..., 1] * w2[..., 0])
    sin = det / (np.linalg.norm(w1, axis=-1) * np.linalg.norm(w2, axis=-1))
    return float(np.max(np.arcsin(np.clip(sin, 0.0, 1.0))))


@dataclass
class HolomorphyCheck:
    """Sup norms of the dressed connection on circles around ``lambda = mu``."""

    radii: tuple
    dressed: tuple
    ungauged: tuple
    reference: float

    @property
    def bounded(self):
        return max(self.dressed) < 10 * self.reference

    @property
    def growth(self):
        """Growth of the dressed connection from the largest to the smallest radius."""
        return self.dressed[-1] / self.dressed[0]

    @property
    def ungauged_growth(self):
        return self.ungauged[-1] / self.ungauged[0]


def _sample_points(grid, count, margin):
    k = int(np.ceil(np.sqrt(count)))
    ii = np.linspace(margin, grid.nx - 1 - margin, k).round().astype(int)
    jj = np.linspace(margin, grid.ny - 1 - margin, k).round().astype(int)
    pts = [(i, j) for i in ii for j in jj][:count]
    return tuple(np.array(p) for p in zip(*pts))


def dressed_holomorphy_check(dress, family, radii=(1e-1, 1e-2, 1e-3, 1e-4), angles=8, points=16, order=6):
    """Sample ``r alpha r^{-1} - dr r^{-1}`` at ``lambda = mu + eps e^{i theta}``.

    ``dr`` is ``(gamma - 1) d pi`` with ``d pi`` from central differences of
    the given order, evaluated at ``points`` interior nodes.  ``reference`` is
    the value at ``lambda = mu + 0.1``.  For a parallel line the sup norms stay
    bounded as the radius shrinks; otherwise they grow like ``1/eps``.
    """
    grid = family.grid
    mu = dress.mu
    if dress.trivial:
        alpha = connection_form(family, mu + 0.1)
        ref = float(np.max(alpha.norm()))
        n = len(radii)
        return HolomorphyCheck(tuple(radii), (ref,) * n, (ref,) * n, ref)
    idx = _sample_points(grid, points, margin=order // 2)
    pi = dress.pi
    dpi = sf.d(grid, pi, order)
    dpi_x, dpi_y = dpi.x[idx], dpi.y[idx]
    pi_s = pi[idx]
    eye = np.eye(2)

    def sup(lam):
        a = connection_form(family, lam)
        ax, ay = a.x[idx], a.y[idx]
        g = gamma(lam, mu)
        r = g * pi_s + (eye - pi_s)
        rinv = pi_s / g + (eye - pi_s)
        ux, uy = r @ ax @ rinv, r @ ay @ rinv
        wx = ux - (g - 1) * dpi_x @ rinv
        wy = uy - (g - 1) * dpi_y @ rinv
        un = np.sqrt(ql.mnorm(ux) ** 2 + ql.mnorm(uy) ** 2)
        wn = np.sqrt(ql.mnorm(wx) ** 2 + ql.mnorm(wy) ** 2)
        return float(np.max(wn)), float(np.max(un))

    thetas = 2 * np.pi * np.arange(angles) / angles
    dressed, ungauged = [], []
    for eps in radii:
        vals = [sup(mu + eps * np.exp(1j * t)) for t in thetas]
        dressed.append(max(v[0] for v in vals))
        ungauged.append(max(v[1] for v in vals))
    ref = sup(mu + 0.1)[0]
    return HolomorphyCheck(tuple(radii), tuple(dressed), tuple(ungauged), ref)


def dressed_cmc_surface(grid, f, dress, v):
    """``f_hat = f - 2 ((d/dt r) v) v^{-1}`` with the constant lambda = 1
    section ``v``; ``d/dt r = i gamma'(1) pi`` at ``t = 0``.

    The real part of the correction is dropped and recorded in ``notes``.
    """
    v = np.asarray(v, dtype=complex).reshape(2)
    shape = grid.shape
    if dress.trivial:
        return sf.SurfaceData(grid, f.copy(), dress.Nhat, np.zeros(shape), np.zeros(shape, dtype=complex),
                              notes={"trivial": True})
    dr = 1j * gamma_derivative(1.0, dress.mu) * dress.pi
    w = np.einsum("...ab,b->...a", dr, v)
    Vinv = ql.inv2(ql.col_to_mat(v))
    corr = -2.0 * ql.col_to_mat(w) @ Vinv
    re = ql.real_part(corr)
    fhat = f + ql.imag_part(corr)
    measured = sf.gauss_map_from_immersion(grid, fhat)
    inner = sf.interior(measured)
    d_minus = float(np.max(_s2_distance(inner, sf.interior(-dress.Nhat))))
    d_plus = float(np.max(_s2_distance(inner, sf.interior(dress.Nhat))))
    sign = 1 if d_plus <= d_minus else -1
    notes = {
        "trivial": False,
        "real_part_deviation": float(np.max(np.abs(re - np.mean(re)))),
        "gauss_sign": sign,
        "gauss_distance_plus": d_plus,
        "gauss_distance_minus": d_minus,
    }
    return sf.SurfaceData(grid, fhat, sign * dress.Nhat, np.zeros(shape), np.zeros(shape, dtype=complex),
                          notes=notes)
