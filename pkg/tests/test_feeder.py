import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sensorplace.feeder import Feeder, FeederError, LoadModel, dump_feeder, feeder_to_dict, parse_feeder
from sensorplace.generate import build_feeder, random_feeder, random_parents

from oracles import parent_chain

DATA = Path(__file__).parent / "data"


def five_bus_text(**node_overrides):
    doc = json.loads((DATA / "five_bus.json").read_text())
    for rec in doc["nodes"]:
        rec.update(node_overrides.get(rec["id"], {}))
    return doc


def test_parse_five_bus():
    f = parse_feeder((DATA / "five_bus.json").read_text())
    assert f.node_count == 5
    assert f.children[3] == (4, 5)
    assert f.parent_of[3] == 1
    assert f.edges == ((1, 2), (1, 3), (3, 4), (3, 5))


def test_single_node_feeder():
    text = json.dumps({"nodes": [{"id": 1, "forecast": 1.0, "sigma": 0.0,
                                  "zero_injection": False, "node_sensor_cost": 1.0}],
                       "edges": []})
    f = parse_feeder(text)
    assert f.node_count == 1
    assert f.edges == ()
    assert f.degree(1) == 1


def test_cycle_rejected():
    doc = five_bus_text()
    doc["edges"] = [
        {"from": 1, "to": 2, "line_sensor_cost": 1},
        {"from": 1, "to": 3, "line_sensor_cost": 1},
        {"from": 5, "to": 4, "line_sensor_cost": 1},
        {"from": 4, "to": 5, "line_sensor_cost": 1},
    ]
    with pytest.raises(FeederError, match="cycle"):
        parse_feeder(json.dumps(doc))


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d["nodes"].append(dict(d["nodes"][0])), "duplicate"),
    (lambda d: d["edges"].append({"from": 9, "to": 2, "line_sensor_cost": 1}), "unknown bus"),
    (lambda d: d["nodes"][2].update(zero_injection=True), "zero-injection"),
    (lambda d: d["nodes"][1].update(forecast=0.0), "forecast"),
    (lambda d: d["nodes"][1].update(node_sensor_cost=-1.0), "negative"),
    (lambda d: d["edges"][0].update(line_sensor_cost=-0.5), "negative"),
    (lambda d: d["edges"].pop(), "disconnected"),
    (lambda d: d["edges"].append({"from": 2, "to": 1, "line_sensor_cost": 1}), "root|cycle"),
    (lambda d: d["edges"].append({"from": 2, "to": 3, "line_sensor_cost": 1}), "more than one parent"),
    (lambda d: d["nodes"][0].update(id=7), "1..5"),
    (lambda d: d["nodes"][0].pop("sigma"), "missing"),
])
def test_parse_errors(mutate, message):
    doc = five_bus_text()
    mutate(doc)
    with pytest.raises(FeederError, match=message):
        parse_feeder(json.dumps(doc))


@pytest.mark.parametrize("literal", ["NaN", "Infinity", "-Infinity"])
def test_non_finite_rejected(literal):
    text = (DATA / "five_bus.json").read_text().replace('"forecast": 1.0', f'"forecast": {literal}', 1)
    with pytest.raises(FeederError):
        parse_feeder(text)


def test_invalid_json():
    with pytest.raises(FeederError):
        parse_feeder("{nodes: ")


def test_degrees(five_bus):
    assert five_bus.degree(3) == 3
    assert five_bus.degree(4) == 1
    assert five_bus.degree(1) == 3
    with pytest.raises(FeederError):
        five_bus.degree(6)


def test_subtrees(five_bus):
    assert five_bus.subtree_nodes(3) == {3, 4, 5}
    assert five_bus.subtree_nodes(4) == {4}
    assert five_bus.subtree_nodes(1) == {1, 2, 3, 4, 5}
    with pytest.raises(FeederError):
        five_bus.subtree_nodes(0)


def test_downstream(five_bus):
    assert five_bus.is_downstream((3, 4), (1, 3))
    assert five_bus.is_downstream((3, 5), (1, 3))
    assert not five_bus.is_downstream((1, 2), (1, 3))
    assert not five_bus.is_downstream((1, 3), (3, 4))
    assert not five_bus.is_downstream((1, 3), (1, 3))
    with pytest.raises(FeederError):
        five_bus.is_downstream((2, 4), (1, 3))


def test_zero_injection_forecast_invariant():
    with pytest.raises(FeederError):
        Feeder(2, {2: 1}, {1: 1.0, 2: 0.5}, {1: 0.0, 2: 0.0}, {2},
               {1: 1.0, 2: 1.0}, {(1, 2): 1.0})


def test_load_model(five_bus):
    lm = LoadModel.from_feeder(build_feeder({2: 1, 3: 2}, forecast={1: 1, 2: 2, 3: 3},
                                            sigma=0.1, zero_injection=[2]))
    assert lm.forecasts.tolist() == [1.0, 0.0, 3.0]
    assert lm.sigmas.tolist() == [0.1, 0.0, 0.1]
    with pytest.raises(ValueError):
        LoadModel([1.0], [-1.0])


def test_with_zero_injection(five_bus):
    z = five_bus.with_zero_injection([3])
    assert z.forecast[3] == 0 and z.zero_injection == {3}
    back = z.with_zero_injection([])
    assert back.forecast[3] == 1.0 and back.zero_injection == frozenset()


tree_sizes = st.integers(1, 8)
seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(tree_sizes, seeds)
def test_structure_properties(n, seed):
    f = random_feeder(n, np.random.default_rng(seed))
    for j in f.nodes:
        expected = {j}.union(*(f.subtree_nodes(c) for c in f.children[j]))
        assert f.subtree_nodes(j) == expected
    # each line is a child edge of exactly one bus
    assert sum(f.degree(k) - 1 for k in f.nodes) == n - 1 == len(f.edges)

    # downstream is a strict partial order; brute force against root paths
    parent_of = dict(f.parent_of)
    for e1 in f.edges:
        assert not f.is_downstream(e1, e1)
        for e2 in f.edges:
            brute = e2[1] in parent_chain(parent_of, e1[1])
            assert f.is_downstream(e1, e2) == brute
            if f.is_downstream(e1, e2):
                assert not f.is_downstream(e2, e1)
                for e3 in f.edges:
                    if f.is_downstream(e2, e3):
                        assert f.is_downstream(e1, e3)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), seeds)
def test_round_trip(n, seed):
    f = random_feeder(n, np.random.default_rng(seed))
    text = dump_feeder(f)
    once = parse_feeder(text)
    assert feeder_to_dict(parse_feeder(dump_feeder(once))) == feeder_to_dict(once) == feeder_to_dict(f)


def test_random_parents_is_tree():
    rng = np.random.default_rng(3)
    for n in range(1, 15):
        parents = random_parents(n, rng)
        assert set(parents) == set(range(2, n + 1))
        for k in parents:
            assert parent_chain(parents, k)[-1] == 1
