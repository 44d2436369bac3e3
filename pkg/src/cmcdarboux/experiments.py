"""Batch experiments behind the command line: each command builds the vacuum
datum from a config, runs its checks and writes an OBJ mesh plus a JSON report."""
from __future__ import annotations

import os
import time

import numpy as np

from . import flat_family as ff
from . import frame as fr
from . import quatlib as ql
from . import surface as sf
from . import transforms as tr
from .report import DiagnosticsReport, export_obj, export_report, export_timings
from .vacuum import fit_cylinder, vacuum_cylinder

COMMANDS = ("cylinder", "frame", "sym", "darboux", "dress", "associated", "verify")

# spectral samples in 1/4 <= |lambda| <= 4
LAMBDA_SAMPLES = tuple(
    complex(r * np.cos(t), r * np.sin(t)) for r in (0.25, 0.5, 2.0, 4.0) for t in (0.3, 2.2, 4.1)
)
GAUGE_LAMBDAS = (2.0, 0.5j)


class Context:
    """Per-run state shared by the checks: grid, datum, family, report."""

    def __init__(self, cfg, command):
        self.cfg = cfg
        self.command = command
        self.grid = cfg.grid.build()
        self.h = self.grid.h
        echo = cfg.to_dict()
        # where the files go does not affect any number in the report
        echo.pop("out_dir")
        self.report = DiagnosticsReport(command, echo)
        self.substeps = cfg.integrator.substeps
        self.rng = np.random.default_rng(cfg.seed)
        self._t0 = time.perf_counter()
        s = cfg.surface
        self.surface, self.vac = vacuum_cylinder(self.grid, s.u0, s.Q0_complex)
        if s.derivatives == "finite_difference":
            S = self.surface
            self.surface = sf.SurfaceData(S.grid, S.f, S.N, S.u, S.Qhopf, notes=S.notes)
        self.exact = s.derivatives == "exact"
        self.family = ff.family_of(self.surface, exact=self.exact)
        self.mu = cfg.transform.mu_complex
        self.v = np.array(cfg.transform.v_complex)

    def add(self, name, values, interior=None):
        vals = np.asarray(values, dtype=float)
        if interior and vals.ndim >= 2:
            vals = sf.interior(vals, interior)
        return self.report.add(name, vals, self.h, self.cfg.tolerances, self.cfg.tol_scale)

    def tick(self, label):
        now = time.perf_counter()
        self.report.timings[label] = now - self._t0
        self._t0 = now

    def section(self, mu=None):
        mu = self.mu if mu is None else mu
        return ff.parallel_section(self.family, mu, self.v, self.substeps)


# ---------------------------------------------------------------------------
# building blocks


def algebraic_identities(S, family, mu, seed=0):
    """Pointwise-algebraic identities of the datum; name -> max residual."""
    grid = S.grid
    N = S.N
    A, Q = sf.hopf_fields(grid, N, S.dN)
    dN = S.dN if S.dN is not None else sf.tangent_part(N, sf.d(grid, N))
    sA = A.star()
    out = {
        "hopf_type_star_left": float(np.max((sA - A.left(N)).norm())),
        "hopf_type_star_right": float(np.max((sA + A.right(N)).norm())),
        "hopf_wedge": float(np.max(ql.mnorm(sf.wedge(A, Q)))),
        "hopf_sum": float(np.max((dN.left(N).scale(0.5) - (A + Q)).norm())),
        "reality": max(ff.reality_residual(family, lam, samples=2, seed=seed) for lam in (2.0, 0.3 + 0.4j)),
    }
    p = tr.mu_params(mu)
    out["ab_circle"] = abs(p.a**2 + p.b**2 - 1)
    rng = np.random.default_rng(seed)
    q = rng.normal(size=(6, 4))
    hom = 0.0
    for w in q.reshape(3, 2, 4):
        a, b = ql.Quaternion.from_real(*w[0]), ql.Quaternion.from_real(*w[1])
        hom = max(hom, float(np.max(np.abs((a * b).to_matrix() - a.to_matrix() @ b.to_matrix()))))
    out["quaternion_homomorphism"] = hom
    if abs(abs(mu) - 1) > tr.UNIT_CIRCLE_TOL:
        lams = (2j, -3.0, 0.4 + 0.1j)
        out["gamma_at_one"] = abs(tr.gamma(1.0, mu) - 1)
        out["gamma_reality"] = max(
            abs(np.conj(tr.gamma(lam, mu)) ** -1 - tr.gamma(1 / np.conj(lam), mu)) for lam in lams
        )
    return out


def flatness_values(family, lams=LAMBDA_SAMPLES, substeps=4):
    return np.array([np.max(sf.interior(ff.curvature_residual(family, lam, substeps))) for lam in lams])


def _h_error(grid, f, N, df=None, dN=None):
    return np.abs(sf.interior(sf.mean_curvature(grid, f, N, df, dN)) - 1)


def _write_outputs(ctx, surfaces):
    out_dir = ctx.cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    for name, f in surfaces.items():
        path = os.path.join(out_dir, f"{ctx.command}_{name}.obj")
        export_obj(f, path)
        ctx.report.artifacts.append(os.path.basename(path))
    export_report(ctx.report, os.path.join(out_dir, f"{ctx.command}.json"))
    export_timings(ctx.report, os.path.join(out_dir, f"{ctx.command}.timings.json"))


# ---------------------------------------------------------------------------
# commands


def _cylinder(ctx):
    S, g = ctx.surface, ctx.grid
    ctx.add("mean_curvature_error", _h_error(g, S.f, S.N, S.df, S.dN))
    fit = fit_cylinder(ql.to_r3(S.f), ql.to_r3(S.N))
    ctx.add("cylinder_radius_error", abs(fit.radius - 0.5))
    ctx.add("conformality", sf.conformality_residual(g, S.f, S.N, S.df), interior=1)
    ctx.add("harmonicity", sf.harmonic_residual(g, S.N, S.dN), interior=1)
    ctx.report.notes["cylinder"] = {"radius": fit.radius, "axis": fit.axis.tolist(), "deviation": fit.radial_deviation}
    return {"surface": S.f}


def _frame(ctx):
    g, vac = ctx.grid, ctx.vac
    u0, Q0 = vac.u0, vac.Q0
    errs = []
    frames = {}
    for lam in (1.0, ctx.mu):
        F = fr.integrate_frame(g, u0, Q0, lam, ctx.substeps)
        frames[lam] = F
        errs.append(np.max(np.abs(F.F - vac.frame(lam))))
    ctx.add("frame_closed_form", errs)
    ctx.tick("frames")
    ctx.add("flatness", flatness_values(ctx.family))
    ctx.tick("flatness")
    gauge = []
    for lam in LAMBDA_SAMPLES[::3]:
        F = fr.integrate_frame(g, u0, Q0, lam, ctx.substeps)
        gauge.append(fr.frame_to_connection(F, frames[1.0], ctx.family)[0])
    ctx.add("frame_gauge", gauge)
    ctx.tick("gauge")
    ode = ctx.section()
    via = fr.parallel_section_via_frame(frames[1.0], frames[ctx.mu], ctx.v)
    ctx.add("two_route_sections", np.max(np.abs(ode.phi - via.phi)))
    ctx.tick("sections")
    return {}


def _sym(ctx):
    g, vac = ctx.grid, ctx.vac
    S, _ = fr.sym_bobenko(g, vac.u0, vac.Q0, ctx.substeps)
    ctx.add("mean_curvature_error", _h_error(g, S.f, S.N))
    fit = fit_cylinder(ql.to_r3(S.f), ql.to_r3(S.N))
    ctx.add("cylinder_radius_error", abs(fit.radius - 0.5))
    ctx.add("conformality", sf.conformality_residual(g, S.f, S.N), interior=1)
    ctx.report.notes["sym"] = dict(S.notes, radius=fit.radius, closed_form_distance=float(np.max(np.abs(S.f - ctx.surface.f))))
    return {"surface": S.f}


def _darboux(ctx, section=None):
    S, g = ctx.surface, ctx.grid
    sec = section if section is not None else ctx.section()
    res = tr.mu_darboux_surface(g, S.f, S.N, sec, dN=S.dN)
    R = res.residuals
    p = res.params
    ctx.add("T_inverse_norm", 1.0 / R["T_min_norm"])
    ctx.add("initial_condition", R["initial_condition"])
    ctx.add("real_part_deviation", R["real_part_deviation"])
    ctx.add("riccati_residual", R["riccati"], interior=1)
    ctx.add("darboux_mean_curvature_error", np.abs(sf.interior(R["mean_curvature"]) - 1))
    ctx.add("darboux_conformality", R["conformality"], interior=1)
    Nh = ql.inv2(res.T) @ S.N @ res.T
    ctx.add("harmonicity_hat", sf.harmonic_residual(g, Nh), interior=1)
    ctx.add("proof_identity", tr.proof_identity_residual(res.T, S.N, res.ahat))
    if p.is_real:
        ctx.add("T_real_part", R["T_real_part_max"])
    if p.on_unit_circle:
        closed = S.f + S.N + ql.scalar_mat(p.b / (1 - p.a))
        ctx.add("unit_circle_closed_form", [np.max(np.abs(Nh - S.N)), np.max(np.abs(res.fhat - closed))])
    ctx.report.notes["darboux"] = {
        "gauss_map_sign": res.gauss_sign,
        "gauss_map_rule": "-T^-1 N T" if res.gauss_sign < 0 else "+T^-1 N T",
        "gauss_distance_minus": R["gauss_distance_minus"],
        "gauss_distance_plus": R["gauss_distance_plus"],
        "real_part_mean": float(np.mean(ql.real_part(res.fhat))),
    }
    ctx.tick("darboux")
    return {"surface": res.surface_part}, res


def _negative_control_section(ctx):
    """A non-parallel section: the base value plus a seeded smooth wobble."""
    X, Y = ctx.grid.mesh()
    c = ctx.rng.normal(size=4)
    wob = np.stack([c[0] * np.sin(X) + c[1] * Y, c[2] * np.cos(X) + c[3] * Y * Y], axis=-1)
    return ff.ParallelSection(ctx.mu, ctx.v + 0.3 * wob, ctx.v)


def _dress(ctx, section=None, darboux=None):
    S, g = ctx.surface, ctx.grid
    sec = section if section is not None else ctx.section()
    d = tr.simple_factor_dress(S.N, sec, ctx.family)
    if d.trivial:
        ctx.report.notes["dress"] = {"trivial": True, "message": "trivial dressing (mu on the unit circle); f_hat = f"}
        ctx.add("dressing_identity_at_one", np.max(np.abs(d.rInf - np.eye(2))))
        ctx.add("harmonicity_dressed", sf.harmonic_residual(g, d.Nhat, S.dN), interior=1)
        return {"surface": S.f}, d
    ctx.add("dressing_identity_at_one", np.max(np.abs(d.r(1.0) - np.eye(2))))
    ctx.add("nilpotency", tr.nilpotency_residual(d.omega10))
    ctx.add("dressing_reality", [tr.reality_condition_residual(d, sec.phi, lam) for lam in (2j, -3.0)])
    hc = tr.dressed_holomorphy_check(d, ctx.family)
    ctx.add("holomorphy_bound", max(hc.dressed) / hc.reference)
    bad = tr.simple_factor_dress(S.N, _negative_control_section(ctx), ctx.family)
    hn = tr.dressed_holomorphy_check(bad, ctx.family)
    ctx.add("holomorphy_negative_control", hn.growth)
    ctx.add("harmonicity_dressed", sf.harmonic_residual(g, d.Nhat), interior=1)
    ds = tr.dressed_cmc_surface(g, S.f, d, sec.v)
    ctx.add("dressed_mean_curvature_error", _h_error(g, ds.f, ds.N))
    if darboux is not None:
        ctx.add("eigenline_angle", tr.eigenline_angle(darboux.T, darboux.ahat, d))
    ctx.report.notes["dress"] = {
        "trivial": False,
        "holomorphy_radii": list(hc.radii),
        "holomorphy_dressed": list(hc.dressed),
        "holomorphy_ungauged": list(hc.ungauged),
        "holomorphy_reference": hc.reference,
        "negative_control_dressed": list(hn.dressed),
        "dressed_surface_gauss_sign": ds.notes["gauss_sign"],
    }
    ctx.tick("dress")
    return {"surface": ds.f}, d


def _associated(ctx):
    g, vac = ctx.grid, ctx.vac
    s = ctx.cfg.transform.s
    A, sec = fr.associated_surface(g, vac.u0, vac.Q0, s, ctx.v, ctx.substeps)
    ctx.add("associated_harmonicity", sf.harmonic_residual(g, A.N), interior=1)
    ctx.add("associated_mean_curvature_error", _h_error(g, A.f, A.N))
    gauge = [sf.interior(fr.gauge_identity_residual(ctx.family, ctx.surface.N, sec, lam)) for lam in GAUGE_LAMBDAS]
    ctx.add("gauge_identity", np.max(gauge))
    ctx.report.notes["associated"] = dict(A.notes, s=s)
    ctx.tick("associated")
    return {"surface": A.f}


def _verify(ctx):
    S = ctx.surface
    ids = algebraic_identities(S, ctx.family, ctx.mu, ctx.cfg.seed)
    ctx.add("algebraic_identities", list(ids.values()))
    ctx.report.notes["algebraic_identities"] = ids
    ctx.add("flatness", flatness_values(ctx.family))
    ctx.tick("flatness")
    sec = ctx.section()
    surfaces, res = _darboux(ctx, sec)
    dsurf, _ = _dress(ctx, sec, res)
    ctx.add("equivalence_check", tr.equivalence_check(S.N, sec))
    ctx.tick("equivalence")
    return {"darboux": surfaces["surface"], "dressed": dsurf["surface"]}


_RUNNERS = {
    "cylinder": _cylinder,
    "frame": _frame,
    "sym": _sym,
    "darboux": lambda ctx: _darboux(ctx)[0],
    "dress": lambda ctx: _dress(ctx)[0],
    "associated": _associated,
    "verify": _verify,
}


def run_experiment(cfg, command=None, write=True):
    """Run ``command`` (default: the config's transform kind) and write its
    outputs under ``cfg.out_dir``; returns the report."""
    command = command or cfg.transform.kind
    if command not in _RUNNERS:
        raise ValueError(f"unknown command {command!r}")
    ctx = Context(cfg, command)
    ctx.tick("setup")
    surfaces = _RUNNERS[command](ctx)
    if write:
        _write_outputs(ctx, surfaces)
    return ctx.report
