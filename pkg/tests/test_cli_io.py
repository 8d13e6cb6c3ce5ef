import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pilotwave import fields
from pilotwave.cli import main
from pilotwave.config import (
    ConfigError,
    GridSpec,
    RunOptions,
    parse_config,
    serialize_config,
)
from pilotwave.export import export_field_grid, export_trajectories
from pilotwave.integrator import Status, integrate_ensemble
from pilotwave.model import ScenarioKind, make_scenario
from pilotwave.observables import square_grid_initials
from pilotwave.report import VerifyOptions, run_verify


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_empty_document_gives_defaults():
    cfg = parse_config("", scenario="ewea")
    assert cfg.scenario == make_scenario("ewea")
    assert cfg.grid == GridSpec()
    assert cfg.options == RunOptions()
    assert parse_config("scenario = ewua\n").scenario == make_scenario("ewua")


def test_width_override_equals_uwea():
    cfg = parse_config("scenario = ewea\n[packet.pos]\ndx0 = 1.4e-7\n")
    uwea = make_scenario("uwea")
    assert cfg.scenario.kind is ScenarioKind.CUSTOM
    assert cfg.scenario.packet_neg == uwea.packet_neg
    assert cfg.scenario.packet_pos == uwea.packet_pos
    assert cfg.scenario.constants == uwea.constants


def test_misspelled_key_names_key_and_line():
    with pytest.raises(ConfigError) as err:
        parse_config("scenario = ewea\n\n[constants]\nkx_ = 1.3e6\n")
    assert err.value.line == 4
    assert "kx_" in str(err.value) and "line 4" in str(err.value)


@pytest.mark.parametrize("text, line", [
    ("[nonsense]\n", 1),
    ("[grid]\nnx = 3\nnx = 4\n", 3),
    ("[grid]\nnx = many\n", 2),
    ("[grid\n", 1),
    ("seed 3\n", 1),
    ("[run]\nbogus = 1\n", 2),
])
def test_syntax_errors_carry_line(text, line):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.line == line


def test_comments_and_frames():
    cfg = parse_config("# header\nseed = 7 ; trailing\n[grid]\nframes = 0, 5e-10, 1e-9  # three\n")
    assert cfg.options.seed == 7
    assert cfg.grid.frames == (0.0, 5e-10, 1e-9)


def test_bad_values_rejected():
    with pytest.raises(ConfigError):
        parse_config("[grid]\nnx = 1\n")
    with pytest.raises(ConfigError):
        parse_config("[grid]\nframes = 1e-9, 5e-10\n")
    with pytest.raises(ConfigError):
        parse_config("scenario = nope\n")
    with pytest.raises(ValueError):         # physical validation from the scenario factory
        parse_config("[packet.neg]\ndx0 = -1e-8\n")


@pytest.mark.parametrize("kw", [
    dict(x_min=1e-6, x_max=-1e-6),
    dict(z_min=0.0, z_max=0.0),
    dict(nx=1),
    dict(nz=2.5),
    dict(frames=(-1e-10, 1e-9)),
    dict(frames=(1e-9, 1e-9)),
    dict(frames=()),
])
def test_gridspec_validation(kw):
    with pytest.raises(ValueError):
        GridSpec(**kw)


finite_pos = st.floats(1e-9, 1e-6, allow_nan=False)


@given(st.sampled_from(["ewea", "ewua", "uwea"]), finite_pos, finite_pos,
       st.floats(0.01, 0.99), st.floats(-math.pi, math.pi),
       st.lists(st.floats(0.0, 3e-9), min_size=1, max_size=6, unique=True),
       st.integers(2, 500), st.integers(0, 2 ** 31))
@settings(max_examples=60, deadline=None)
def test_serialize_round_trip(kind, dx_neg, dx_pos, amp, chi, frames, n, seed):
    sc = make_scenario(kind, {"dx0_neg": dx_neg, "dx0_pos": dx_pos, "amp_neg": amp, "chi": chi})
    grid = GridSpec(nx=n, nz=n + 1, frames=tuple(sorted(frames)))
    opts = RunOptions(seed=seed, born=n)
    back = parse_config(serialize_config(sc, grid, opts))
    assert back.scenario == sc
    assert back.grid == grid
    assert back.options == opts


def test_round_trip_presets_exact():
    for kind in ("ewea", "ewua", "uwea"):
        sc = make_scenario(kind)
        back = parse_config(serialize_config(sc)).scenario
        assert back == sc and back.kind is sc.kind


def test_minimal_grid_export(tmp_path):
    grid = GridSpec(nx=2, nz=2, frames=(0.0,))
    res = export_field_grid(make_scenario("ewea"), grid, "intensity", tmp_path)
    rows = _rows(res.files[0])
    assert rows[0] == ["x", "z", "value"]
    assert len(rows) == 5
    coords = [(float(r[0]), float(r[1])) for r in rows[1:]]
    assert coords == [(-3.5e-6, -3.5e-6), (3.5e-6, -3.5e-6), (-3.5e-6, 3.5e-6), (3.5e-6, 3.5e-6)]


def test_default_intensity_export(tmp_path):
    sc = make_scenario("ewea")
    grid = GridSpec(nx=11, nz=7)
    res = export_field_grid(sc, grid, "intensity", tmp_path)
    assert len(res.files) == 6 and res.masked_points == 0
    assert res.frames == tuple(np.linspace(0, 1.5e-9, 6))
    for path, t in zip(res.files, res.frames):
        rows = _rows(path)
        assert len(rows) == 1 + 77
        x, z, v = (np.array([float(r[i]) for r in rows[1:]]) for i in range(3))
        assert np.array_equal(v, fields.intensity(sc, x, 0.0, z, t))   # 17 digits read back exactly
    index = _rows(tmp_path / "intensity_frames.csv")
    assert index[0] == ["frame", "t", "file", "masked"] and len(index) == 7


def test_qpotential_mask_matches_intensity(tmp_path):
    sc = make_scenario("ewea")
    grid = GridSpec(nx=41, nz=41, frames=(0.0,))
    q = export_field_grid(sc, grid, "qpotential", tmp_path / "q")
    i = export_field_grid(sc, grid, "intensity", tmp_path / "i")
    q_empty = np.array([r[2] == "" for r in _rows(q.files[0])[1:]])
    dens = np.array([float(r[2]) for r in _rows(i.files[0])[1:]])
    thr = fields.node_threshold(sc, 0.0)
    assert q_empty.any() and not q_empty.all()
    assert np.array_equal(q_empty, dens < thr)
    assert q.masked_points == q_empty.sum()
    assert np.isclose(q.frames[0], 0.0)


def test_exports_are_byte_identical(tmp_path):
    sc = make_scenario("ewua")
    grid = GridSpec(nx=15, nz=9, frames=(0.0, 1e-9))
    a = export_field_grid(sc, grid, "qpotential", tmp_path / "a")
    b = export_field_grid(sc, grid, "qpotential", tmp_path / "b")
    for fa, fb in zip(a.files, b.files):
        assert fa.read_bytes() == fb.read_bytes()
    trajs = integrate_ensemble(sc, square_grid_initials(sc, 1).points, 0.0, 3e-10)
    ta = export_trajectories(trajs, tmp_path / "a.csv")
    tb = export_trajectories(trajs, tmp_path / "b.csv")
    assert ta.read_bytes() == tb.read_bytes()


@pytest.fixture(scope="module")
def ewea_traj_csv(tmp_path_factory):
    sc = make_scenario("ewea")
    trajs = integrate_ensemble(sc, square_grid_initials(sc, 3).points, 0.0, 1.5e-9)
    return sc, _rows(export_trajectories(trajs, tmp_path_factory.mktemp("tr") / "t.csv"))


def test_trajectory_csv_layout(ewea_traj_csv):
    _, rows = ewea_traj_csv
    assert rows[0] == "traj_id,t,x,y,z,vx,vy,vz,status".split(",")
    # both endpoints are recorded: 151 samples per trajectory
    assert len(rows) - 1 == 18 * 151
    ids = [int(r[0]) for r in rows[1:]]
    assert ids == sorted(ids) and set(ids) == set(range(18))
    assert all(r[8] == "completed" for r in rows[1:])


def test_trajectory_csv_y_closed_form(ewea_traj_csv):
    sc, rows = ewea_traj_csv
    t = np.array([float(r[1]) for r in rows[1:]])
    y = np.array([float(r[3]) for r in rows[1:]])
    assert np.array_equal(y, sc.alpha * sc.packet_neg.ky * t)


def test_trajectory_csv_node_masked(tmp_path):
    sc = make_scenario("ewea")
    trajs = integrate_ensemble(sc, [(-5e-7, 0.0), (3.5e-6, 3.5e-6)], 0.0, 1e-10)
    rows = _rows(export_trajectories(trajs, tmp_path / "t.csv"))[1:]
    first = [r for r in rows if r[0] == "0"]
    second = [r for r in rows if r[0] == "1"]
    assert len(second) < len(first)
    assert trajs[1].status is Status.NODE_MASKED
    assert all(r[8] == "node_masked" for r in second)


def test_export_trajectories_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        export_trajectories([], tmp_path / "t.csv")


def test_report_lists_every_criterion_once():
    rep = run_verify(make_scenario("ewea"), VerifyOptions(skip=(1, 2, 5, 6, 7, 8, 9)))
    assert sorted(r.criterion for r in rep.results) == list(range(1, 10))
    kv = dict(line.split("=", 1) for line in rep.key_values().splitlines())
    for n in range(1, 10):
        assert f"check.{n}.status" in kv
    assert kv["check.1.status"] == "skip"
    assert float(kv["scenario.visibility"]) >= 0.99
    assert rep.text().count("\n") == 10


def test_cli_exit_codes(tmp_path, capsys):
    all_but_4 = "1,2,3,5,6,7,8,9"
    assert main(["verify", "--skip", all_but_4, "--out", str(tmp_path / "ok")]) == 0
    assert (tmp_path / "ok" / "report.txt").exists()
    # the UWEA visibility criterion does not hold, so this check fails honestly
    assert main(["verify", "--skip", "1,2,4,5,6,7,8,9", "--out", str(tmp_path / "f")]) == 1
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[constants]\nkx_ = 1\n")
    assert main(["fields", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "kx_" in capsys.readouterr().err


def test_cli_fields_and_trajectories(tmp_path, capsys):
    out = tmp_path / "f"
    assert main(["fields", "--scenario", "uwea", "--which", "qpotential", "--frames", "3",
                 "--grid-n", "5", "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == [
        "qpotential_00.csv", "qpotential_01.csv", "qpotential_02.csv", "qpotential_frames.csv"]
    assert main(["fields", "--frames", "0,1e-9", "--grid-n", "3", "--out", str(out)]) == 0
    assert len(_rows(out / "intensity_01.csv")) == 10
    assert main(["trajectories", "--born", "50", "--seed", "2", "--n-traj", "4",
                 "--t-final", "2e-10", "--out", str(tmp_path / "t")]) == 0
    rows = _rows(tmp_path / "t" / "trajectories.csv")
    assert {r[0] for r in rows[1:]} == {"0", "1", "2", "3"}
    assert main(["visibility", "--scenario", "ewua", "--out", str(tmp_path / "v")]) == 0
    assert "visibility=0.5" in capsys.readouterr().out
