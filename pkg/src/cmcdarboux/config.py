"""Experiment configuration: a YAML document validated into dataclasses.

Schema (every key optional; defaults shown)::

    grid:
      x0: 0.0
      x1: 6.283185307179586
      y0: -1.0
      y1: 1.0
      nx: 64
      ny: 64
      i0: 0
      j0: null            # null -> (ny - 1) // 2
    surface:
      kind: vacuum_cylinder
      u0: 0.0
      Q0: [0.5, 0.0]      # re, im; accepted only if |Q0| = exp(u0)/2
      derivatives: exact  # exact | finite_difference
    transform:
      kind: verify        # darboux | dress | associated | verify
      mu: [2.0, 0.0]      # re, im
      v: [[1.0, 0.0], [0.0, 0.0]]   # two complex numbers as re/im pairs
      s: 0.7853981633974483
    integrator:
      substeps: 8
    tolerances: {}        # name -> multiplier of h^2 or absolute bound
    tol_scale: 1.0
    seed: 0
    out_dir: out
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

import yaml

from .errors import ConfigError, MuForbidden
from .surface import ConformalGrid

TRANSFORM_KINDS = ("darboux", "dress", "associated", "verify")
SURFACE_KINDS = ("vacuum_cylinder",)
DERIVATIVES = ("exact", "finite_difference")


@dataclass(frozen=True)
class GridSpec:
    x0: float = 0.0
    x1: float = 2 * math.pi
    y0: float = -1.0
    y1: float = 1.0
    nx: int = 64
    ny: int = 64
    i0: int = 0
    j0: Optional[int] = None

    def build(self):
        j0 = (self.ny - 1) // 2 if self.j0 is None else self.j0
        return ConformalGrid(self.x0, self.x1, self.y0, self.y1, self.nx, self.ny, self.i0, j0)


@dataclass(frozen=True)
class SurfaceSpec:
    kind: str = "vacuum_cylinder"
    u0: float = 0.0
    Q0: tuple = (0.5, 0.0)
    derivatives: str = "exact"

    @property
    def Q0_complex(self):
        return complex(*self.Q0)


@dataclass(frozen=True)
class TransformSpec:
    kind: str = "verify"
    mu: tuple = (2.0, 0.0)
    v: tuple = ((1.0, 0.0), (0.0, 0.0))
    s: float = math.pi / 4

    @property
    def mu_complex(self):
        return complex(*self.mu)

    @property
    def v_complex(self):
        return tuple(complex(*c) for c in self.v)


@dataclass(frozen=True)
class IntegratorSpec:
    substeps: int = 8


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    surface: SurfaceSpec = field(default_factory=SurfaceSpec)
    transform: TransformSpec = field(default_factory=TransformSpec)
    integrator: IntegratorSpec = field(default_factory=IntegratorSpec)
    tolerances: dict = field(default_factory=dict)
    tol_scale: float = 1.0
    seed: int = 0
    out_dir: str = "out"

    def to_dict(self):
        d = asdict(self)
        d["surface"]["Q0"] = list(self.surface.Q0)
        d["transform"]["mu"] = list(self.transform.mu)
        d["transform"]["v"] = [list(c) for c in self.transform.v]
        d["tolerances"] = dict(sorted(self.tolerances.items()))
        return d

    def dumps(self):
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    def with_overrides(self, **kw):
        """Shallow overrides by section, e.g. ``grid={'nx': 32}``."""
        out = self
        for key, val in kw.items():
            if val is None:
                continue
            cur = getattr(out, key)
            if isinstance(val, dict) and hasattr(cur, "__dataclass_fields__"):
                out = replace(out, **{key: replace(cur, **val)})
            else:
                out = replace(out, **{key: val})
        return validate(out)


# ---------------------------------------------------------------------------
# parsing


def _line_of(text, path):
    """Line number (1-based) of the node at ``path`` in a YAML document."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return None
    line = None
    for key in path:
        if node is None or not isinstance(node, yaml.MappingNode):
            break
        for k, v in node.value:
            if k.value == key:
                line = k.start_mark.line + 1
                node = v
                break
        else:
            break
    return line


def _fail(msg, path, text=None):
    name = ".".join(path)
    line = _line_of(text, path) if text is not None else None
    if line is not None:
        name = f"{name} (line {line})"
    raise ConfigError(msg, name)


def _number(val, path, text, kind=float):
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        _fail(f"expected a number, got {val!r}", path, text)
    if kind is int:
        if isinstance(val, float) and not val.is_integer():
            _fail(f"expected an integer, got {val!r}", path, text)
        return int(val)
    if not math.isfinite(val):
        _fail("must be finite", path, text)
    return float(val)


def _pair(val, path, text):
    if not isinstance(val, (list, tuple)) or len(val) != 2:
        _fail(f"expected [re, im], got {val!r}", path, text)
    return (_number(val[0], path, text), _number(val[1], path, text))


def _section(raw, name, cls, text, convert):
    data = raw.get(name, {}) or {}
    if not isinstance(data, dict):
        _fail("expected a mapping", (name,), text)
    known = {f.name for f in fields(cls)}
    for key in data:
        if key not in known:
            _fail("unknown key", (name, key), text)
    kw = {}
    for key, val in data.items():
        kw[key] = convert(key, val, (name, key))
    return cls(**kw)


def from_dict(raw, text=None):
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a mapping")
    top = {f.name for f in fields(ExperimentConfig)}
    for key in raw:
        if key not in top:
            _fail("unknown key", (key,), text)

    def grid_conv(key, val, path):
        if key == "j0" and val is None:
            return None
        return _number(val, path, text, int if key in ("nx", "ny", "i0", "j0") else float)

    def surf_conv(key, val, path):
        if key == "kind":
            if val not in SURFACE_KINDS:
                _fail(f"unknown surface kind {val!r}", path, text)
            return val
        if key == "derivatives":
            if val not in DERIVATIVES:
                _fail(f"expected one of {DERIVATIVES}", path, text)
            return val
        if key == "Q0":
            return _pair(val, path, text)
        return _number(val, path, text)

    def tr_conv(key, val, path):
        if key == "kind":
            if val not in TRANSFORM_KINDS:
                _fail(f"unknown transform kind {val!r}", path, text)
            return val
        if key == "mu":
            return _pair(val, path, text)
        if key == "v":
            if not isinstance(val, (list, tuple)) or len(val) != 2:
                _fail("expected two [re, im] pairs", path, text)
            return tuple(_pair(c, path, text) for c in val)
        return _number(val, path, text)

    def int_conv(key, val, path):
        return _number(val, path, text, int)

    kw = {
        "grid": _section(raw, "grid", GridSpec, text, grid_conv),
        "surface": _section(raw, "surface", SurfaceSpec, text, surf_conv),
        "transform": _section(raw, "transform", TransformSpec, text, tr_conv),
        "integrator": _section(raw, "integrator", IntegratorSpec, text, int_conv),
    }
    tols = raw.get("tolerances", {}) or {}
    if not isinstance(tols, dict):
        _fail("expected a mapping", ("tolerances",), text)
    kw["tolerances"] = {str(k): _number(v, ("tolerances", str(k)), text) for k, v in tols.items()}
    if "tol_scale" in raw:
        kw["tol_scale"] = _number(raw["tol_scale"], ("tol_scale",), text)
    if "seed" in raw:
        kw["seed"] = _number(raw["seed"], ("seed",), text, int)
    if "out_dir" in raw:
        if not isinstance(raw["out_dir"], str):
            _fail("expected a path string", ("out_dir",), text)
        kw["out_dir"] = raw["out_dir"]
    return validate(ExperimentConfig(**kw), text)


def loads(text):
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}") from exc
    return from_dict(raw, text)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def validate(cfg, text=None):
    g = cfg.grid
    try:
        g.build()
    except ValueError as exc:
        _fail(str(exc), ("grid",), text)
    if g.nx < 8 or g.ny < 8:
        _fail("nx and ny must be at least 8", ("grid", "nx" if g.nx < 8 else "ny"), text)
    if cfg.integrator.substeps < 1:
        _fail("must be positive", ("integrator", "substeps"), text)
    if cfg.tol_scale <= 0:
        _fail("must be positive", ("tol_scale",), text)
    s = cfg.surface
    if abs(abs(s.Q0_complex) - math.exp(s.u0) / 2) > 1e-12:
        _fail("vacuum datum needs |Q0| = exp(u0)/2 so that U and V commute", ("surface", "Q0"), text)
    mu = cfg.transform.mu_complex
    if mu == 0 or mu == 1:
        line = _line_of(text, ("transform", "mu")) if text is not None else None
        where = "transform.mu" + (f" (line {line})" if line else "")
        raise MuForbidden(f"{where}: mu = {mu} is not allowed (needs mu not in {{0, 1}})")
    v = cfg.transform.v_complex
    if abs(v[0]) == 0 and abs(v[1]) == 0:
        _fail("base section value must be non-zero", ("transform", "v"), text)
    return cfg
