import json
import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmcdarboux import cli
from cmcdarboux import config as cfgmod
from cmcdarboux.config import ExperimentConfig
from cmcdarboux.errors import ConfigError, MuForbidden
from cmcdarboux.report import DiagnosticsReport, export_obj, export_report, tolerance


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


def run_cli(*argv):
    return cli.main(list(argv) + ["--quiet"])


@pytest.fixture(scope="module")
def verify_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("verify")
    code = run_cli("verify", "--out-dir", str(out), "--mu", "2", "0")
    with open(out / "verify.json") as fh:
        return code, json.load(fh), out


# --- OBJ export -------------------------------------------------------------


def test_obj_two_by_two(tmp_path):
    P = np.array([[[0, 0, 0], [0, 1, 0]], [[1, 0, 0], [1, 1, -0.0]]], dtype=float)
    path = export_obj(P, str(tmp_path / "sq.obj"))
    lines = open(path).read().splitlines()
    assert sum(l.startswith("v ") for l in lines) == 4
    assert [l for l in lines if l.startswith("f ")] == ["f 1 3 4 2"]
    assert "-0" not in open(path).read()


def test_obj_cylinder_counts_and_determinism(tmp_path, cyl):
    a = export_obj(cyl, str(tmp_path / "a.obj"))
    b = export_obj(cyl, str(tmp_path / "b.obj"))
    lines = open(a).read().splitlines()
    assert sum(l.startswith("v ") for l in lines) == 4096
    assert sum(l.startswith("f ") for l in lines) == 3969
    assert read(a) == read(b)
    v = lines[1].split()
    assert len(v) == 4 and all(len(x.lstrip("-").replace(".", "").lstrip("0")) <= 9 for x in v[1:] if "e" not in x)


def test_obj_rejects_non_finite(tmp_path):
    P = np.zeros((2, 2, 3))
    P[0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        export_obj(P, str(tmp_path / "bad.obj"))


# --- JSON reports -----------------------------------------------------------


def test_empty_report_is_valid_json(tmp_path):
    path = export_report(DiagnosticsReport("cylinder", {}), str(tmp_path / "r.json"))
    data = json.load(open(path))
    assert data["residuals"] == [] and data["pass"] is True
    assert data["schema_version"] == 1


def test_report_pass_and_fail_entries():
    rep = DiagnosticsReport("x", {})
    rep.add("flatness", [1e-3, 2e-3], h=0.1)
    assert rep.passed and rep.get("flatness").tolerance == pytest.approx(0.5)
    rep.add("holomorphy_negative_control", 5.0, h=0.1)
    assert not rep.passed
    d = rep.to_dict()
    assert d["pass"] is False
    assert d["residuals"][1]["bound"] == "lower" and d["residuals"][1]["pass"] is False
    rep.add("nilpotency", float("nan"), h=0.1)
    assert rep.to_dict()["residuals"][2]["max"] == "nan"


def test_tolerance_kinds():
    h = 0.1
    assert tolerance("flatness", h) == pytest.approx(0.5)
    assert tolerance("flatness", h, scale=2) == pytest.approx(1.0)
    assert tolerance("flatness", h, overrides={"flatness": 10}) == pytest.approx(0.1)
    assert tolerance("equivalence_check", h) == 1e-6
    assert tolerance("holomorphy_negative_control", h, scale=2) == 50.0


def test_verify_report_contents(verify_run):
    code, data, out = verify_run
    assert code == 0 and data["pass"] is True
    names = {r["name"] for r in data["residuals"]}
    for key in ("equivalence_check", "riccati_residual", "flatness", "harmonicity_hat"):
        assert key in names
    eq = next(r for r in data["residuals"] if r["name"] == "equivalence_check")
    assert eq["max"] < 1e-6
    assert list(data) == sorted(data)
    assert "out_dir" not in data["config"]
    assert set(os.listdir(out)) >= {"verify.json", "verify.timings.json", "verify_darboux.obj", "verify_dressed.obj"}


def test_failing_tolerance_gives_exit_one(tmp_path):
    code = run_cli("cylinder", "--out-dir", str(tmp_path), "--tol-scale", "1e-30")
    data = json.load(open(tmp_path / "cylinder.json"))
    assert code == 1 and data["pass"] is False


def test_mu_one_is_rejected_before_computing(tmp_path):
    with pytest.raises(MuForbidden):
        ExperimentConfig().with_overrides(transform={"mu": (1.0, 0.0)})
    code = run_cli("darboux", "--out-dir", str(tmp_path), "--mu", "1", "0")
    assert code == 1 and os.listdir(tmp_path) == []


def test_dress_on_unit_circle_is_trivial(tmp_path, cyl):
    code = run_cli("dress", "--out-dir", str(tmp_path), "--mu", "0", "1")
    data = json.load(open(tmp_path / "dress.json"))
    assert code == 0
    assert data["notes"]["dress"]["trivial"] is True
    assert "trivial dressing" in data["notes"]["dress"]["message"]
    assert read(tmp_path / "dress_surface.obj") == read(export_obj(cyl, str(tmp_path / "cyl.obj")))


@pytest.mark.parametrize("cmd", ["cylinder", "frame", "sym", "darboux", "associated"])
def test_commands_pass(tmp_path, cmd):
    # the absolute frame bound of 1e-8 is stated for the 64 x 64 grid
    grid = ["64", "64"] if cmd == "frame" else ["32", "32"]
    assert run_cli(cmd, "--out-dir", str(tmp_path), "--grid", *grid) == 0
    assert os.path.exists(tmp_path / f"{cmd}.json")


def test_cli_prints_one_line_per_residual(tmp_path, capsys):
    assert cli.main(["cylinder", "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out.splitlines()
    data = json.load(open(tmp_path / "cylinder.json"))
    assert sum(l.startswith(("PASS", "FAIL")) for l in out) == len(data["residuals"])


def test_runs_are_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run_cli("darboux", "--out-dir", str(d), "--grid", "32", "32", "--mu", "1", "1") == 0
    for name in ("darboux.json", "darboux_surface.obj"):
        assert read(a / name) == read(b / name)


# --- configuration ----------------------------------------------------------


def test_default_config_round_trip():
    cfg = ExperimentConfig()
    assert cfgmod.loads(cfg.dumps()) == cfg


configs = st.builds(
    lambda nx, ny, mu, v, scale, seed, sub: ExperimentConfig().with_overrides(
        grid={"nx": nx, "ny": ny},
        transform={"mu": mu, "v": v},
        integrator={"substeps": sub},
        tol_scale=scale,
        seed=seed,
    ),
    st.integers(8, 200),
    st.integers(8, 200),
    st.tuples(st.floats(2, 5), st.floats(-3, 3)),
    st.tuples(st.tuples(st.just(1.0), st.floats(-1, 1)), st.tuples(st.floats(-1, 1), st.floats(-1, 1))),
    st.floats(0.1, 10),
    st.integers(0, 2**31),
    st.integers(1, 16),
)


@settings(max_examples=30, deadline=None)
@given(configs)
def test_config_round_trip_property(cfg):
    assert cfgmod.loads(cfg.dumps()) == cfg


def test_config_file_and_cli_overrides(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("grid:\n  nx: 16\n  ny: 16\ntransform:\n  mu: [0.5, 0.0]\nseed: 3\n")
    args = cli.build_parser().parse_args(["darboux", "--config", str(path), "--mu", "2", "1", "--tol-scale", "2"])
    cfg = cli.config_from_args(args)
    assert cfg.grid.nx == 16 and cfg.seed == 3 and cfg.tol_scale == 2
    assert cfg.transform.mu_complex == 2 + 1j and cfg.transform.kind == "darboux"
    assert cfg.grid.j0 == 7 or cfg.grid.build().j0 == 7


@pytest.mark.parametrize(
    "text, field, line",
    [
        ("grid:\n  nx: 4\n", "grid.nx", 2),
        ("grid:\n  nx: 16\n  bogus: 1\n", "grid.bogus", 3),
        ("seed: 0\ntransform:\n  mu: [2.0]\n", "transform.mu", 3),
        ("surface:\n  Q0: [0.3, 0.0]\n", "surface.Q0", 2),
        ("transform:\n  kind: explode\n", "transform.kind", 2),
        ("tol_scale: -1\n", "tol_scale", 1),
    ],
)
def test_config_errors_name_field_and_line(text, field, line):
    with pytest.raises(ConfigError) as exc:
        cfgmod.loads(text)
    assert exc.value.field == f"{field} (line {line})"


def test_config_mu_forbidden_reports_line():
    with pytest.raises(MuForbidden, match=r"transform.mu \(line 3\)"):
        cfgmod.loads("seed: 1\ntransform:\n  mu: [1.0, 0.0]\n")


def test_config_rejects_bad_documents():
    with pytest.raises(ConfigError):
        cfgmod.loads("[1, 2]")
    with pytest.raises(ConfigError):
        cfgmod.loads("grid: {nx: 8\n")


def test_config_defaults():
    cfg = ExperimentConfig()
    assert cfg.seed == 0 and cfg.transform.s == pytest.approx(math.pi / 4)
    assert cfg.grid.build().shape == (64, 64)
