"""Diagnostics reports (JSON) and mesh export (OBJ)."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import quatlib as ql

SCHEMA_VERSION = 1

# name -> (kind, value, what it checks); kind "h2" scales with the grid
# spacing, "abs" is absolute, "min" is a lower bound
TOLERANCES = {
    "algebraic_identities": ("abs", 1e-12, "quaternion algebra and Hopf field type identities"),
    "flatness": ("h2", 50.0, "flatness of the spectral family of connections"),
    "flatness_convergence": ("min", 3.5, "second-order convergence of the flatness residual"),
    "frame_gauge": ("h2", 50.0, "frame gauge S^-1 dS equals the connection form"),
    "two_route_sections": ("abs", 1e-7, "parallel sections from the ODE match frame sections"),
    "frame_closed_form": ("abs", 1e-8, "integrated frame matches the vacuum closed form"),
    "mean_curvature_error": ("h2", 10.0, "constant mean curvature H = 1"),
    "cylinder_radius_error": ("abs", 1e-3, "best-fit cylinder radius 1/2"),
    "conformality": ("h2", 50.0, "*df = N df = -df N"),
    "harmonicity": ("h2", 50.0, "harmonicity of the Gauss map"),
    "T_inverse_norm": ("abs", 1e10, "T is nowhere vanishing"),
    "T_real_part": ("abs", 1e-8, "T is imaginary for real mu"),
    "initial_condition": ("abs", 1e-10, "algebraic initial condition of the Riccati equation"),
    "real_part_deviation": ("abs", 1e-6, "constant real part of the transform"),
    "riccati_residual": ("h2", 100.0, "Riccati equation for T"),
    "darboux_mean_curvature_error": ("h2", 10.0, "the transform has H = 1"),
    "darboux_conformality": ("h2", 100.0, "conformality of the transform with its Gauss map"),
    "unit_circle_closed_form": ("abs", 1e-12, "closed form of the transform for mu on the unit circle"),
    "harmonicity_hat": ("h2", 100.0, "harmonicity of the transformed map"),
    "harmonicity_dressed": ("h2", 100.0, "harmonicity of the dressed map"),
    "proof_identity": ("abs", 1e-10, "quadratic identity for T rho^-1"),
    "eigenline_angle": ("abs", 1e-8, "T rho^-1 and r_inf move the eigenline alike"),
    "nilpotency": ("abs", 1e-12, "dressed (1,0) part squares to zero"),
    "dressing_identity_at_one": ("abs", 1e-12, "dressing matrix is the identity at lambda = 1"),
    "dressing_reality": ("abs", 1e-12, "reality condition of the dressing matrix"),
    "holomorphy_bound": ("abs", 10.0, "dressed connection bounded near mu (ratio to reference)"),
    "holomorphy_negative_control": ("min", 100.0, "non-parallel line gives a pole (growth)"),
    "equivalence_check": ("abs", 1e-6, "dressing equals the mu-Darboux transform"),
    "dressed_mean_curvature_error": ("h2", 10.0, "dressed CMC surface has H = 1"),
    "associated_harmonicity": ("h2", 50.0, "associated family member is harmonic"),
    "associated_mean_curvature_error": ("h2", 10.0, "associated CMC surface has H = 1"),
    "gauge_identity": ("h2", 50.0, "gauge identity between associated families"),
}


def tolerance(name, h, overrides=None, scale=1.0):
    """Bound for ``name``; overrides replace the tabulated multiplier/value.

    ``scale`` loosens upper bounds (multiplies) and lower bounds (divides).
    """
    kind, val, _ = TOLERANCES[name]
    if overrides and name in overrides:
        val = overrides[name]
    if kind == "h2":
        return val * h * h * scale
    if kind == "min":
        return val / scale
    return val * scale


@dataclass
class Residual:
    name: str
    max: float
    mean: float
    tolerance: float
    lower_bound: bool = False
    theorem: str = ""

    @property
    def passed(self):
        if not np.isfinite(self.max):
            return False
        if self.lower_bound:
            return self.max >= self.tolerance
        return self.max <= self.tolerance

    def to_dict(self):
        return {
            "name": self.name,
            "max": _clean(self.max),
            "mean": _clean(self.mean),
            "tolerance": _clean(self.tolerance),
            "bound": "lower" if self.lower_bound else "upper",
            "pass": bool(self.passed),
            "theorem": self.theorem,
        }


def _clean(x):
    x = float(x)
    return x if np.isfinite(x) else str(x)


@dataclass
class DiagnosticsReport:
    command: str
    config: dict
    residuals: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def add(self, name, values, h, overrides=None, scale=1.0):
        """Record a residual from a scalar or array of values."""
        kind, _, what = TOLERANCES[name]
        arr = np.asarray(values, dtype=float)
        if arr.size == 0:
            mx = mn = 0.0
        else:
            mx, mn = float(np.max(arr)), float(np.mean(arr))
        if kind == "min":
            mx = mn = float(np.min(arr))
        r = Residual(name, mx, mn, tolerance(name, h, overrides, scale), kind == "min", what)
        self.residuals.append(r)
        return r

    @property
    def passed(self):
        return all(r.passed for r in self.residuals)

    def get(self, name):
        for r in self.residuals:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "residuals": [r.to_dict() for r in self.residuals],
            "notes": _jsonable(self.notes),
            "artifacts": list(self.artifacts),
            "pass": bool(self.passed),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _clean(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def export_report(report, path):
    """Write the report as JSON with sorted keys (timings go elsewhere)."""
    text = json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
    _write(path, text)
    return path


def export_timings(report, path):
    text = json.dumps(_jsonable(report.timings), sort_keys=True, indent=2) + "\n"
    _write(path, text)
    return path


def _write(path, text):
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def surface_points(f):
    """(nx, ny, 3) points from an imaginary-quaternion field or R^3 array."""
    f = np.asarray(f)
    if f.shape[-2:] == (2, 2):
        return ql.to_r3(f)
    return np.asarray(f, dtype=float)


def export_obj(surface, path):
    """ASCII OBJ: vertex ``i*ny + j`` (1-based in faces) for node (i, j), one
    quad per grid cell, 9 significant digits."""
    f = surface.f if hasattr(surface, "f") else surface
    P = surface_points(f) + 0.0  # no "-0" in the output
    if not np.all(np.isfinite(P)):
        raise ValueError("surface has non-finite points")
    nx, ny = P.shape[:2]
    lines = ["# grid %d x %d" % (nx, ny)]
    for p in P.reshape(-1, 3):
        lines.append("v %.9g %.9g %.9g" % (p[0], p[1], p[2]))
    for i in range(nx - 1):
        for j in range(ny - 1):
            a = i * ny + j + 1
            lines.append("f %d %d %d %d" % (a, a + ny, a + ny + 1, a + 1))
    _write(path, "\n".join(lines) + "\n")
    return path
