import numpy as np
import pytest

from cmcdarboux import flat_family as ff
from cmcdarboux import frame as fr
from cmcdarboux import quatlib as ql
from cmcdarboux import surface as sf
from cmcdarboux.errors import LambdaZero, TypeViolation, ZeroVector
from cmcdarboux.vacuum import vacuum_cylinder

LAMBDAS = [complex(r * np.cos(t), r * np.sin(t)) for r in (0.25, 0.5, 2.0, 4.0) for t in (0.3, 2.2, 4.1)]


def zero_form(grid):
    z = np.zeros(grid.shape + (2, 2), dtype=complex)
    return sf.OneForm(z, z.copy())


# --- from_hopf --------------------------------------------------------------


def test_zero_hopf_field(grid):
    fam = ff.from_hopf(grid, zero_form(grid))
    assert np.max(fam.A10.norm()) == 0 and np.max(fam.A01.norm()) == 0


def test_parts_are_nilpotent_and_sum_to_A(grid, cyl, family):
    A, _ = sf.hopf_fields(grid, cyl.N, cyl.dN)
    assert np.max((family.A10 + family.A01 - A).norm()) < 1e-15
    for part in (family.A10, family.A01):
        for comp in (part.x, part.y):
            assert np.max(ql.mnorm(comp @ comp)) < 1e-12


def test_parts_have_their_types(family):
    assert np.max((family.A10.star() - family.A10.scale(1j)).norm()) < 1e-15
    assert np.max((family.A01.star() + family.A01.scale(1j)).norm()) < 1e-15


def test_hopf_reality_on_random_sections(grid, family, rng):
    phi = rng.normal(size=grid.shape + (2,)) + 1j * rng.normal(size=grid.shape + (2,))
    for c in ("x", "y"):
        a10, a01 = getattr(family.A10, c), getattr(family.A01, c)
        lhs = np.einsum("...ab,...b->...a", a10, ql.times_j(phi))
        rhs = ql.times_j(np.einsum("...ab,...b->...a", a01, phi))
        assert np.max(np.abs(lhs - rhs)) < 1e-13


def test_type_violation(grid, cyl, rng):
    bad = sf.OneForm(
        rng.normal(size=grid.shape + (2, 2)) + 0j, rng.normal(size=grid.shape + (2, 2)) + 0j
    )
    with pytest.raises(TypeViolation):
        ff.from_hopf(grid, bad, cyl.N)


def test_finite_difference_family_passes_type_check(cyl):
    fam = ff.family_of(cyl, exact=False)
    assert fam.hopf_sampler is None


# --- connection_form / hopf_field_mu ----------------------------------------


def test_connection_form_special_values(grid, cyl, family):
    A, _ = sf.hopf_fields(grid, cyl.N, cyl.dN)
    assert np.max(ff.connection_form(family, 1.0).norm()) == 0
    assert np.max((ff.connection_form(family, -1.0) - A.scale(-2)).norm()) < 1e-15
    with pytest.raises(LambdaZero):
        ff.connection_form(family, 0)


@pytest.mark.parametrize("t", [0.4, 1.7, np.pi])
def test_connection_form_quaternionic_on_unit_circle(family, t):
    a = ff.connection_form(family, np.exp(1j * t))
    assert np.all(ql.is_quaternionic(a.x)) and np.all(ql.is_quaternionic(a.y))
    b = ff.connection_form(family, 2 * np.exp(1j * t))
    assert not np.all(ql.is_quaternionic(b.x))


def test_hopf_field_mu(grid, cyl, family):
    A, _ = sf.hopf_fields(grid, cyl.N, cyl.dN)
    assert np.max((ff.hopf_field_mu(family, 1) - A).norm()) < 1e-15
    assert np.max((ff.hopf_field_mu(family, -1) + A).norm()) < 1e-15


@pytest.mark.parametrize("mu", [2.0, 1j, 0.3 + 0.5j])
def test_hopf_field_mu_is_coclosed(grid, fd_family, mu):
    res = ff.covariant_coclosed_residual(fd_family, mu)
    assert np.max(sf.interior(res)) < 50 * grid.h**2


# --- curvature --------------------------------------------------------------


def test_curvature_trivial_at_one(fd_family):
    assert np.max(ff.curvature_residual(fd_family, 1.0)) == 0


@pytest.mark.parametrize("lam", LAMBDAS)
def test_flatness_on_annulus(grid, fd_family, lam):
    assert np.max(sf.interior(ff.curvature_residual(fd_family, lam))) < 50 * grid.h**2


def test_exact_family_is_flat_to_integration_accuracy(family):
    assert np.max(ff.curvature_residual(family, 2.0)) < 1e-6


def test_non_harmonic_control_is_not_flat():
    vals = []
    for n in (33, 65):
        g = sf.ConformalGrid.standard(n, n)
        S, _ = vacuum_cylinder(g)
        X, _ = g.mesh()
        M = S.N + 0.1 * np.sin(X)[..., None, None] * ql.qmat(0, 1)
        M = M / ql.qnorm(M)[..., None, None]
        vals.append(np.max(sf.interior(ff.curvature_residual(ff.family_of_normal(g, M), 2.0))))
    assert min(vals) > 0.05 and vals[1] > 0.8 * vals[0]


# --- reality ----------------------------------------------------------------


@pytest.mark.parametrize("lam", [2.0, 1j, -0.3 + 0.1j])
def test_reality_residual(family, lam):
    assert ff.reality_residual(family, lam) < 1e-12


def test_reality_on_unit_circle_is_self_dual(family):
    lam = 1j
    assert np.isclose(1 / np.conj(lam), lam)
    a, b = ff.connection_form(family, lam), ff.connection_form(family, 1 / np.conj(lam))
    assert np.max((a - b).norm()) < 1e-15


def test_reality_negative_control(grid, rng):
    shape = grid.shape + (2, 2)
    rnd = lambda: rng.normal(size=shape) + 1j * rng.normal(size=shape)
    fam = ff.ConnectionFamily(grid, sf.OneForm(rnd(), rnd()), sf.OneForm(rnd(), rnd()))
    assert ff.reality_residual(fam, 2.0) > 0.1


# --- parallel transport -----------------------------------------------------


def test_transport_trivial_at_one(family):
    path = [(0, 0), (1, 0), (1, 1)]
    v = np.array([0.3, 1 - 2j])
    assert np.array_equal(ff.parallel_transport(family, 1.0, path, v), v)


def test_transport_around_plaquette(grid, family):
    v = np.array([1.0, 0.5j])
    i, j = 20, 30
    loop = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1), (i, j)]
    w = ff.parallel_transport(family, 2.0, loop, v)
    assert np.linalg.norm(w - v) / (grid.hx * grid.hy) < 100 * grid.h**4


def test_transport_is_path_independent(family):
    v = np.array([1.0, 0.2 + 0.1j])
    p1 = [(0, 31)] + [(i, 31) for i in range(1, 11)] + [(10, j) for j in range(32, 41)]
    p2 = [(0, 31)] + [(0, j) for j in range(32, 41)] + [(i, 40) for i in range(1, 11)]
    assert p1[-1] == p2[-1]
    for lam in (2.0, 0.5 + 0.5j):
        a = ff.parallel_transport(family, lam, p1, v)
        b = ff.parallel_transport(family, lam, p2, v)
        assert np.max(np.abs(a - b)) < 1e-7


def test_transport_is_linear(family):
    path = [(0, 31), (1, 31), (1, 32), (2, 32)]
    v1, v2 = np.array([1.0, 0.0]), np.array([0.2j, -1.0])
    t = lambda v: ff.parallel_transport(family, 3.0, path, v)
    assert np.allclose(t(v1 + 2 * v2), t(v1) + 2 * t(v2), atol=1e-14)


def test_transport_rejects_bad_paths(family):
    with pytest.raises(ValueError):
        ff.parallel_transport(family, 2.0, [(0, 0), (2, 0)], [1, 0])
    with pytest.raises(ValueError):
        ff.parallel_transport(family, 2.0, [(0, 0), (-1, 0)], [1, 0])
    with pytest.raises(LambdaZero):
        ff.parallel_transport(family, 0.0, [(0, 0), (1, 0)], [1, 0])


# --- parallel sections ------------------------------------------------------


def test_section_at_one_is_constant(grid, family):
    sec = ff.parallel_section(family, 1.0, [1, 2j])
    assert np.array_equal(sec.phi, np.broadcast_to([1, 2j], grid.shape + (2,)))


def test_section_base_value_and_errors(grid, family, sections):
    sec = sections(2.0)
    assert np.array_equal(sec.phi[grid.i0, grid.j0], sec.v)
    with pytest.raises(ZeroVector):
        ff.parallel_section(family, 2.0, [0, 0])
    with pytest.raises(LambdaZero):
        ff.parallel_section(family, 0.0, [1, 0])


@pytest.mark.parametrize("mu", [2.0, 1 + 1j])
def test_section_never_vanishes(sections, mu):
    assert np.min(np.linalg.norm(sections(mu).phi, axis=-1)) > 0.1


@pytest.mark.parametrize("mu", [2.0, 1 + 1j, 0.5])
def test_section_matches_frame_formula(grid, vac, sections, mu):
    sec = sections(mu)
    F1 = fr.integrate_frame(grid, 0.0, 0.5, 1.0)
    Fmu = fr.integrate_frame(grid, 0.0, 0.5, mu)
    via = fr.parallel_section_via_frame(F1, Fmu, sec.v)
    assert np.max(np.abs(via.phi - sec.phi)) < 1e-7


def test_section_is_parallel(grid, family, sections):
    sec = sections(2.0)
    res = ff.covariant_derivative(family, 2.0, sec.phi, order=4)
    err = np.maximum(np.abs(res.x).max(-1), np.abs(res.y).max(-1))
    assert np.max(sf.interior(err, 2)) < 10 * grid.h**4


def test_section_equals_transport_along_the_integration_path(grid, family, sections):
    sec = sections(2.0)
    i, j = 7, 45
    path = [(k, grid.j0) for k in range(grid.i0, i + 1)] + [(i, l) for l in range(grid.j0 + 1, j + 1)]
    w = ff.parallel_transport(family, 2.0, path, sec.v)
    assert np.max(np.abs(w - sec.phi[i, j])) < 1e-13
