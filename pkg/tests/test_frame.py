import numpy as np
import pytest

from cmcdarboux import flat_family as ff
from cmcdarboux import frame as fr
from cmcdarboux import quatlib as ql
from cmcdarboux import surface as sf
from cmcdarboux.errors import LambdaZero, NotUnitCircle, ZeroVector
from cmcdarboux.flat_family import ParallelSection
from cmcdarboux.vacuum import fit_cylinder

U0, Q0 = 0.0, 0.5
ANNULUS = [2.0, 0.5, 1j, -0.7 + 1.1j, 3.0 * np.exp(2.2j)]


@pytest.fixture(scope="module")
def frame1(grid):
    return fr.integrate_frame(grid, U0, Q0, 1.0)


@pytest.fixture(scope="module")
def frames(grid):
    cache = {}

    def get(lam):
        if lam not in cache:
            cache[lam] = fr.integrate_frame(grid, U0, Q0, lam)
        return cache[lam]

    return get


@pytest.fixture(scope="module")
def sym(grid):
    return fr.sym_bobenko(grid, U0, Q0)


def interior_max(a, width=1):
    return float(np.max(sf.interior(a, width)))


# --- integrate_frame --------------------------------------------------------


def test_frame_is_identity_at_base(grid, frame1, frames):
    for F in (frame1, frames(2.0)):
        assert np.array_equal(F.F[grid.i0, grid.j0], np.eye(2))
    with pytest.raises(LambdaZero):
        fr.integrate_frame(grid, U0, Q0, 0)


@pytest.mark.parametrize("lam", [1.0] + ANNULUS)
def test_frame_matches_closed_form(grid, vac, frames, lam):
    assert np.max(np.abs(frames(lam).F - vac.frame(lam))) < 1e-8


@pytest.mark.parametrize("lam", ANNULUS)
def test_frame_determinant_stays_away_from_zero(frames, lam):
    assert np.min(np.abs(ql.det2(frames(lam).F))) > 1e-8


@pytest.mark.parametrize("lam", [1.0, 2.0, 1j])
def test_frame_compatibility(grid, frames, lam):
    F = frames(lam).F
    U, V = fr.frame_generators(U0, 0.0, Q0, lam)
    Fx, Fy = F @ (U + V), F @ (1j * (U - V))
    res = ql.mnorm(sf.ddy(grid, Fx) - sf.ddx(grid, Fy))
    assert interior_max(res) < 50 * grid.h**2


def test_frame_gauss_map_is_the_cylinder_normal(frame1, cyl):
    assert np.max(np.abs(fr.gauss_map_of_frame(frame1.F) - cyl.N)) < 1e-8


# --- frame_to_connection ----------------------------------------------------


def test_connection_at_one_is_trivial(frame1, family):
    res, form = fr.frame_to_connection(frame1, frame1, family)
    assert res < 1e-12 and np.max(form.norm()) < 1e-12


@pytest.mark.parametrize("lam", ANNULUS)
def test_frame_reproduces_connection(grid, frame1, frames, family, lam):
    res, form = fr.frame_to_connection(frames(lam), frame1, family)
    assert res < 50 * grid.h**2
    if abs(abs(lam) - 1) < 1e-12:
        assert np.all(ql.is_quaternionic(form.x, tol=1e-8)) and np.all(ql.is_quaternionic(form.y, tol=1e-8))


# --- parallel_section_via_frame ---------------------------------------------


def test_section_via_frame_at_one(grid, frame1):
    sec = fr.parallel_section_via_frame(frame1, frame1, [1, 1j])
    assert np.max(np.abs(sec.phi - np.array([1, 1j]))) < 1e-14
    with pytest.raises(ZeroVector):
        fr.parallel_section_via_frame(frame1, frame1, [0, 0])


def test_section_via_frame_is_linear(frame1, frames):
    Fm = frames(2.0)
    v1, v2 = np.array([1.0, 0.0]), np.array([0.3j, 2.0])
    a = fr.parallel_section_via_frame(frame1, Fm, v1 + v2).phi
    b = fr.parallel_section_via_frame(frame1, Fm, v1).phi + fr.parallel_section_via_frame(frame1, Fm, v2).phi
    assert np.max(np.abs(a - b)) < 1e-12


def test_section_via_frame_matches_transport(frame1, frames, sections):
    sec = sections(2.0)
    via = fr.parallel_section_via_frame(frame1, frames(2.0), sec.v)
    assert np.max(np.abs(via.phi - sec.phi)) < 1e-7


# --- frame_t_derivative -----------------------------------------------------


def test_t_derivative_vanishes_at_base(grid):
    fd = fr.frame_t_derivative(grid, U0, Q0, 0.7)
    assert np.max(np.abs(fd.G[grid.i0, grid.j0])) == 0


def t_difference_error(grid, fd, delta):
    s = fd.s
    Fp = fr.integrate_frame(grid, U0, Q0, np.exp(1j * (s + delta))).F
    Fm = fr.integrate_frame(grid, U0, Q0, np.exp(1j * (s - delta))).F
    return np.max(np.abs((Fp - Fm) / (2 * delta) - fd.G))


def test_t_derivative_matches_finite_difference(grid):
    fd = fr.frame_t_derivative(grid, U0, Q0, 0.0)
    assert t_difference_error(grid, fd, 1e-3) < 1e-6


def test_t_derivative_difference_error_is_second_order(grid):
    fd = fr.frame_t_derivative(grid, U0, Q0, np.pi / 2)
    assert np.max(np.abs(fd.F - fr.integrate_frame(grid, U0, Q0, 1j).F)) < 1e-12
    e1, e2 = t_difference_error(grid, fd, 1e-3), t_difference_error(grid, fd, 5e-4)
    assert 3.5 < e1 / e2 < 4.5
    assert e2 < 1e-6


def test_t_derivative_matches_closed_form(grid, vac):
    fd = fr.frame_t_derivative(grid, U0, Q0, 0.0)
    F, G = vac.frame_dt(0.0)
    assert np.max(np.abs(fd.G - G)) < 1e-8 and np.max(np.abs(fd.F - F)) < 1e-8


def test_log_derivative_gives_half_df(grid, sym, cyl):
    _, fd = sym
    P = fd.G @ ql.inv2(fd.F)
    dP = sf.d(grid, P)
    half = cyl.df.scale(0.5)
    # the constant real part drops out of the differential
    assert interior_max((dP - half).norm()) < 50 * grid.h**2


# --- sym_bobenko ------------------------------------------------------------


def test_sym_bobenko_gives_the_cylinder(grid, sym):
    S, _ = sym
    H = sf.mean_curvature(grid, S.f, S.N)
    assert interior_max(np.abs(H - 1)) < 10 * grid.h**2
    fit = fit_cylinder(ql.to_r3(S.f), ql.to_r3(S.N))
    assert fit.radius == pytest.approx(0.5, abs=1e-3)
    assert S.notes["real_part_deviation"] < 1e-10


def test_sym_bobenko_normal_and_conformality(grid, sym):
    S, _ = sym
    df = sf.d(grid, S.f)
    # *df = N df = -df N
    assert interior_max((df.star() - df.left(S.N)).norm()) < 50 * grid.h**2
    assert interior_max((df.star() + df.right(S.N)).norm()) < 50 * grid.h**2
    assert interior_max(np.abs(ql.qnorm(df.x) ** 2 - np.exp(U0))) < 50 * grid.h**2


def test_sym_bobenko_base_point_change_is_a_rigid_motion(grid, sym, frame1):
    S, _ = sym
    i, j = 10, 40
    moved = sf.ConformalGrid(grid.x0, grid.x1, grid.y0, grid.y1, grid.nx, grid.ny, i0=i, j0=j)
    S2, _ = fr.sym_bobenko(moved, U0, Q0)
    R = frame1.F[i, j]
    diff = S2.f - ql.inv2(R) @ S.f @ R
    assert np.max(np.abs(diff - diff.mean(axis=(0, 1)))) < 1e-8


# --- associated family ------------------------------------------------------


def test_associated_normal_errors_and_trivial_case(grid, cyl, family):
    sec = ff.parallel_section(family, 2.0, [1, 0])
    with pytest.raises(NotUnitCircle):
        fr.associated_normal(cyl.N, sec)
    const = ParallelSection(1.0, np.broadcast_to(np.array([1.0, 0.0j]), grid.shape + (2,)), np.array([1.0, 0.0j]))
    assert np.max(np.abs(fr.associated_normal(cyl.N, const) - cyl.N)) < 1e-15


def test_associated_normal_by_constant_rotation(grid, cyl):
    v = np.array([0.6, 0.8j])
    const = ParallelSection(1.0, np.broadcast_to(v, grid.shape + (2,)), v)
    Nphi = fr.associated_normal(cyl.N, const)
    a = interior_max(sf.harmonic_residual(grid, Nphi))
    b = interior_max(sf.harmonic_residual(grid, cyl.N))
    assert a == pytest.approx(b, rel=1e-8, abs=1e-14)


def test_associated_normal_at_i(grid, cyl, family):
    sec = ff.parallel_section(family, 1j, [1, 0.2])
    Nphi = fr.associated_normal(cyl.N, sec)
    assert interior_max(sf.harmonic_residual(grid, Nphi)) < 50 * grid.h**2
    assert np.max(np.abs(ql.real_part(Nphi))) < 1e-12
    assert np.max(np.abs(ql.qnorm(Nphi) - 1)) < 1e-12


def test_associated_surface_at_zero_is_sym_bobenko(grid, sym):
    S, _ = sym
    A, sec = fr.associated_surface(grid, U0, Q0, 0.0)
    diff = A.f - S.f
    assert np.max(np.abs(diff - diff.mean(axis=(0, 1)))) < 1e-10
    assert np.max(np.abs(A.N - S.N)) < 1e-10


def test_associated_surface_quarter_turn(grid, cyl, family):
    A, sec = fr.associated_surface(grid, U0, Q0, np.pi / 2)
    H = sf.mean_curvature(grid, A.f, A.N)
    assert interior_max(np.abs(H - 1)) < 10 * grid.h**2
    assert interior_max(sf.conformality_residual(grid, A.f, A.N)) < 50 * grid.h**2
    for lam in (2.0, 0.5j):
        res = fr.gauge_identity_residual(family, cyl.N, sec, lam)
        assert interior_max(res) < 50 * grid.h**2
