import json
import math

import numpy as np
import pytest

from scatkit.catalog import pole_diagram
from scatkit.cli import (
    ExperimentSpec,
    emit_plotdata,
    load_keyvalue,
    load_packet_config,
    main,
    parse_plotdata,
    run,
)
from scatkit.diagram import KConfiguration, save_diagram, save_kconfig
from scatkit.kinematics import pole_surface_config

POLE_MASSES = (1.0, 1.0, 2.5, 1.0, 4.0)

PACKET_CONF = """
# packet description
m = 1.0
pbar = 1.0, 0.0, 0.0, 0.0
gamma = 0.0
r1 = 0.3
r2 = 0.45
dim = 1
"""

MODEL_CONF = """
kind = bump
l = 1
R1 = 0.5
R2 = 1.5
mu = 1.0
v_max = 300.0
v_step = 0.08
"""


@pytest.fixture
def pole_files(tmp_path):
    d = pole_diagram()
    rng = np.random.default_rng(21)
    on = KConfiguration(pole_surface_config(*POLE_MASSES, rng=rng))
    off = KConfiguration(pole_surface_config(*POLE_MASSES, rng=rng, virtual_shift=0.6))
    paths = {}
    for name, payload in [
        ("diagram.json", save_diagram(d)),
        ("k_on.json", save_kconfig(on)),
        ("k_off.json", save_kconfig(off)),
    ]:
        p = tmp_path / name
        p.write_bytes(payload)
        paths[name] = str(p)
    return paths


class TestEmitPlotdata:
    def test_empty_table_header_only(self):
        raw = emit_plotdata((["a", "b"], []))
        assert raw == b"a,b\n"

    def test_round_trip(self):
        table = (["x", "y"], [[1.0, 2.5], [3.0, -0.125]])
        header, rows = parse_plotdata(emit_plotdata(table))
        assert header == ["x", "y"]
        assert [[float(c) for c in row] for row in rows] == [[1.0, 2.5], [3.0, -0.125]]

    def test_nan_literal(self):
        raw = emit_plotdata((["x"], [[float("nan")]]))
        assert b"nan" in raw
        _, rows = parse_plotdata(raw)
        assert math.isnan(float(rows[0][0]))


def test_keyvalue_parsing_and_packet():
    kv = load_keyvalue(PACKET_CONF)
    assert kv["m"] == "1.0"
    pk = load_packet_config(PACKET_CONF)
    assert pk.spatial_dim == 1
    assert pk.chi.r1 == 0.3


def test_degree_command(tmp_path):
    code = main(["degree", "--nl", "1", "--nv", "2", "--out-dir", str(tmp_path), "--name", "deg"])
    assert code == 0
    report = json.loads((tmp_path / "deg.report.json").read_text())
    assert report["d"] == "-1"
    assert report["kind"] == "pole"
    assert report["experiment"]["seed"] == 0


def test_analyze_trivial_and_singular(pole_files, tmp_path):
    out = tmp_path / "out"
    code = main(
        ["analyze", "--diagram", pole_files["diagram.json"], "--k", pole_files["k_off.json"],
         "--out-dir", str(out), "--name", "off", "--seed", "3"]
    )
    assert code == 0
    report = json.loads((out / "off.report.json").read_text())
    assert report["verdict"] == "trivial"

    code = main(
        ["analyze", "--diagram", pole_files["diagram.json"], "--k", pole_files["k_on.json"],
         "--out-dir", str(out), "--name", "on", "--seed", "3"]
    )
    assert code == 0
    report = json.loads((out / "on.report.json").read_text())
    assert report["verdict"] == "singular"


def test_missing_input_exits_2(tmp_path):
    code = main(["analyze", "--diagram", str(tmp_path / "absent.json"), "--k", str(tmp_path / "k.json"),
                 "--out-dir", str(tmp_path)])
    assert code == 2


def test_bad_config_exits_2(tmp_path):
    bad = tmp_path / "packet.conf"
    bad.write_text("m = 1.0\n")  # missing required keys
    code = main(["falloff", "--packet", str(bad), "--u", "1,0,0,0", "--out-dir", str(tmp_path)])
    assert code == 2


def test_scan_surface_and_falloff(pole_files, tmp_path):
    out = tmp_path / "scan"
    code = main(
        ["scan-surface", "--diagram", pole_files["diagram.json"], "--count", "3",
         "--seed", "5", "--out-dir", str(out), "--name", "scan"]
    )
    assert code == 0
    report = json.loads((out / "scan.report.json").read_text())
    assert report["returned"] == 3
    header, rows = parse_plotdata((out / "scan.csv").read_bytes())
    assert len(rows) == 3
    assert header[0] == "sample"

    packet = tmp_path / "packet.conf"
    packet.write_text(PACKET_CONF)
    code = main(
        ["falloff", "--packet", str(packet), "--u", "1,0,0,0", "--tau-min", "20",
         "--tau-max", "100", "--points", "8", "--out-dir", str(out), "--name", "fall"]
    )
    assert code == 0
    report = json.loads((out / "fall.report.json").read_text())
    assert report["fit"]["kind"] == "power"


def test_transform_roundtrip_command(tmp_path):
    model = tmp_path / "model.conf"
    model.write_text(MODEL_CONF)
    code = main(["transform", "--model", str(model), "--experiment", "roundtrip",
                 "--out-dir", str(tmp_path), "--name", "rt"])
    assert code == 0
    report = json.loads((tmp_path / "rt.report.json").read_text())
    assert report["passed"] is True
    assert report["max_error"] <= 1e-6


def test_reports_byte_identical_across_runs(pole_files, tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        spec = ExperimentSpec(
            name="repro",
            kind="scan-surface",
            inputs={"diagram": pole_files["diagram.json"]},
            options={"count": 4},
            seed=11,
        )
        assert run(spec, out_dir=out) == 0
    assert (out1 / "repro.report.json").read_bytes() == (out2 / "repro.report.json").read_bytes()
    assert (out1 / "repro.csv").read_bytes() == (out2 / "repro.csv").read_bytes()


def test_unknown_kind_rejected():
    with pytest.raises(Exception):
        ExperimentSpec(name="x", kind="nope")
