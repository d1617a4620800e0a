import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from sensorplace.casestudy import case_study, format_table
from sensorplace.cli import run
from sensorplace.detectability import AUDIT_SCHEMA
from sensorplace.feeder import dump_feeder
from sensorplace.generate import random_feeder
from sensorplace.placement import Placement, build_program, check_feasible
from sensorplace.render import render_dot, render_json

from conftest import sample_placement

DATA = Path(__file__).parent / "data"
FIVE_BUS = str(DATA / "five_bus.json")
FIVE_BUS_Z3 = str(DATA / "five_bus_z3.json")


def read_json(path):
    return json.loads(Path(path).read_text())


def test_solve_and_verify(tmp_path):
    out = tmp_path / "p.json"
    assert run(["solve", "--feeder", FIVE_BUS, "--out", str(out)]) == 0
    doc = read_json(out)
    assert doc["total_cost"] == 3
    assert doc["optimal"] is True
    assert doc["node_sensors"] == [] and doc["line_sensors"] == [[1, 2], [1, 3], [3, 5]]

    report = tmp_path / "audit.json"
    assert run(["verify", "--feeder", FIVE_BUS, "--placement", str(out),
                "--scope", "single-edge", "--out", str(report)]) == 0
    audit = read_json(report)
    jsonschema.validate(audit, AUDIT_SCHEMA)
    assert audit["claim_holds"] is True and audit["pairs_checked"] == 10

    assert run(["verify", "--feeder", FIVE_BUS, "--placement", str(out),
                "--scope", "full-hu", "--out", str(report)]) == 0
    assert read_json(report)["pairs_checked"] == 45


def test_verify_reports_counterexample(tmp_path, five_bus_z3):
    pl = tmp_path / "sample.json"
    pl.write_text(json.dumps(sample_placement(five_bus_z3).to_json()))
    report = tmp_path / "audit.json"
    assert run(["verify", "--feeder", FIVE_BUS_Z3, "--placement", str(pl),
                "--scope", "full-hu", "--out", str(report)]) == 0
    audit = read_json(report)
    assert audit["claim_holds"] is False
    assert [[[1, 3]], [[3, 4], [3, 5]]] in audit["indistinguishable_pairs"]


def test_outputs_are_idempotent(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["simulate", "--feeder", FIVE_BUS, "--trials", "50", "--sensor-sigma", "0.05",
                    "--seed", "4", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = read_json(a)
    assert doc["trials"] == 50 and doc["seed"] == 4 and doc["sensor_sigma"] == 0.05


def test_enumerate(tmp_path):
    out = tmp_path / "h.json"
    assert run(["enumerate", "--feeder", FIVE_BUS, "--out", str(out)]) == 0
    doc = read_json(out)
    assert doc["count"] == 10 and doc["hypothesis_space"] == 16
    assert doc["hypotheses"][2] == [[1, 2], [1, 3]]
    assert run(["enumerate", "--feeder", FIVE_BUS, "--max-nodes", "3", "--out", str(out)]) == 1
    assert run(["enumerate", "--feeder", FIVE_BUS, "--max-nodes", "3", "--max-outages", "1",
                "--out", str(out)]) == 0
    assert read_json(out)["count"] == 5


def test_render(tmp_path, capsys, five_bus):
    pl = tmp_path / "sample.json"
    pl.write_text(json.dumps(sample_placement(five_bus).to_json()))
    assert run(["render", "--feeder", FIVE_BUS, "--placement", str(pl)]) == 0
    dot = capsys.readouterr().out
    assert dot == render_dot(five_bus, sample_placement(five_bus))
    assert run(["render", "--feeder", FIVE_BUS, "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["edges"][0] == {"from": 1, "to": 2, "line_sensor": False}


def test_case_study_command(tmp_path):
    out = tmp_path / "cs.json"
    assert run(["case-study", "--feeder", FIVE_BUS, "--ratios", "2,3",
                "--zero-injection", "", "--zero-injection", "3", "--out", str(out)]) == 0
    rows = read_json(out)
    assert len(rows) == 4
    assert all(r["feasible"] for r in rows)


@pytest.mark.parametrize("argv", [
    ["solve"],
    ["verify", "--feeder", FIVE_BUS],
    ["render", "--feeder", FIVE_BUS, "--format", "png"],
    ["simulate", "--feeder", FIVE_BUS, "--trials", "0"],
    ["bogus"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2
    assert "usage" in capsys.readouterr().err


def test_domain_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nodes": [], "edges": []}')
    assert run(["solve", "--feeder", str(bad)]) == 1
    assert "error" in capsys.readouterr().err
    assert run(["solve", "--feeder", str(tmp_path / "missing.json")]) == 1
    pl = tmp_path / "pl.json"
    pl.write_text(json.dumps({"node_sensors": [9], "line_sensors": []}))
    assert run(["verify", "--feeder", FIVE_BUS, "--placement", str(pl)]) == 1


def test_atomic_write_leaves_no_temp_files(tmp_path):
    out = tmp_path / "p.json"
    assert run(["solve", "--feeder", FIVE_BUS, "--out", str(out)]) == 0
    assert [p.name for p in tmp_path.iterdir()] == ["p.json"]


# -- render / case study -----------------------------------------------------


def test_render_dot_colours(five_bus):
    dot = render_dot(five_bus, sample_placement(five_bus))
    assert '  1 [label="1", color=red, penwidth=2];' in dot
    assert "  3 -> 5 [color=green, penwidth=2];" in dot
    assert "  1 -> 2;" in dot
    plain = render_dot(five_bus, Placement())
    assert "color" not in plain
    assert render_dot(five_bus, sample_placement(five_bus)) == dot


def test_render_json(five_bus):
    doc = json.loads(render_json(five_bus, sample_placement(five_bus)))
    assert [n["node_sensor"] for n in doc["nodes"]] == [True, False, False, False, False]


def test_case_study_table(five_bus):
    rows = case_study(five_bus, [2, 3], [[], [3]])
    assert len(rows) == 4
    for r in rows:
        variant = five_bus.with_zero_injection(r.zero_injection).with_costs(r.ratio, 1.0)
        assert check_feasible(build_program(variant), r.placement)
    assert "ratio" in format_table(rows)
    assert case_study(five_bus, []) == []
    with pytest.raises(ValueError):
        case_study(five_bus, [0])


def test_expensive_node_sensors_drop_out():
    f = random_feeder(15, np.random.default_rng(1))
    rows = case_study(f, [0.5, 100.0])
    assert rows[1].node_sensors == 0
    assert rows[1].node_sensors <= rows[0].node_sensors


def test_cli_round_trips_generated_feeder(tmp_path):
    f = random_feeder(12, np.random.default_rng(2))
    path = tmp_path / "f.json"
    path.write_text(dump_feeder(f))
    out = tmp_path / "p.json"
    assert run(["solve", "--feeder", str(path), "--out", str(out)]) == 0
    report = tmp_path / "r.json"
    assert run(["verify", "--feeder", str(path), "--placement", str(out), "--out", str(report)]) == 0
    assert read_json(report)["claim_holds"] is True
