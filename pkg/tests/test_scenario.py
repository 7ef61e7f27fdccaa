import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuavplan import scenario as sc_mod
from cuavplan.errors import ConfigError, ScenarioFormatError
from cuavplan.scenario import Scenario, SensorNode


def test_case1_shape():
    sc = sc_mod.generate_random(100, (500, 500), 10, 10 * math.sqrt(2), seed=4)
    assert sc.n == 100
    assert sc.region == (500.0, 500.0)
    assert sc.altitude_h == 10.0
    assert sc.ground_radius == pytest.approx(10.0, rel=1e-12)


def test_single_node_ground_radius():
    sc = sc_mod.generate_random(1, (500, 500), 10, 10 * math.sqrt(2), seed=0)
    assert sc.n == 1
    assert sc.ground_radius == pytest.approx(10.0, rel=1e-12)


def test_same_inputs_serialize_identically(tmp_path):
    a = sc_mod.generate_random(50, seed=9)
    b = sc_mod.generate_random(50, seed=9)
    sc_mod.save(a, tmp_path / "a.json")
    sc_mod.save(b, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_presets():
    for case, n in ((1, 100), (2, 500), (3, 1000)):
        sc = sc_mod.preset(case)
        assert sc.n == n
        assert sc.d_max == pytest.approx(10 * math.sqrt(2))
    assert sc_mod.preset(1) == sc_mod.preset(1)
    with pytest.raises(ConfigError):
        sc_mod.preset(4)


def test_round_trip_case1(tmp_path):
    sc = sc_mod.preset(1)
    path = tmp_path / "case1.json"
    sc_mod.save(sc, path)
    assert sc_mod.load(path) == sc


def _doc(nodes):
    return {"region": [500, 500], "altitude": 10, "d_max": 14.2, "seed": 0, "nodes": nodes}


def test_node_outside_region_rejected():
    with pytest.raises(ScenarioFormatError, match="outside"):
        sc_mod.from_dict(_doc([[-1, 5], [3, 4]]))


def test_duplicated_id_rejected():
    with pytest.raises(ScenarioFormatError, match="duplicated id 1"):
        sc_mod.from_dict(_doc([[0, 1, 1], [1, 2, 2], [1, 3, 3]]))


def test_noncontiguous_id_rejected():
    with pytest.raises(ScenarioFormatError, match="contiguous"):
        sc_mod.from_dict(_doc([{"id": 0, "x": 1, "y": 1}, {"id": 5, "x": 2, "y": 2}]))


def test_node_forms_accepted():
    a = sc_mod.from_dict(_doc([[1, 2], [3, 4]]))
    b = sc_mod.from_dict(_doc([[1, 3, 4], [0, 1, 2]]))
    c = sc_mod.from_dict(_doc([{"x": 1, "y": 2}, {"id": 1, "x": 3, "y": 4}]))
    assert a == b == c


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"region": [1, 1], "altitude": 1', "line 1"),
        ('{"region": [1, 1], "altitude": 1, "d_max": 2}', "missing field 'nodes'"),
        ('{"region": [1], "altitude": 1, "d_max": 2, "nodes": []}', "region"),
        ('{"region": [1, 1], "altitude": "x", "d_max": 2, "nodes": []}', "altitude"),
        ('{"region": [1, 1], "altitude": 1, "d_max": 2, "nodes": [[0.5]]}', "nodes[0]"),
        ('{"region": [1, 1], "altitude": 1, "d_max": 2, "nodes": [{"x": 0.5}]}', "missing key 'y'"),
        ('{"region": [1, 1], "altitude": 1, "d_max": 0.5, "nodes": [[0.5, 0.5]]}', "d_max"),
        ('[1, 2]', "top level"),
    ],
)
def test_malformed_files_name_the_problem(text, fragment):
    with pytest.raises(ScenarioFormatError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
        sc_mod.loads(text, "net.json")


def test_invalid_direct_construction():
    node = (SensorNode(0, 1.0, 1.0),)
    with pytest.raises(ConfigError):
        Scenario(node, (10, 10), 10, 5)
    with pytest.raises(ConfigError):
        Scenario(node, (0, 10), 1, 5)
    with pytest.raises(ConfigError):
        Scenario((), (10, 10), 1, 5)
    with pytest.raises(ConfigError):
        Scenario((SensorNode(1, 1.0, 1.0),), (10, 10), 1, 5)
    with pytest.raises(ConfigError):
        sc_mod.generate_random(0)


def test_xy_is_read_only():
    sc = sc_mod.generate_random(5, seed=1)
    with pytest.raises(ValueError):
        sc.xy[0, 0] = 1.0


@given(
    n=st.integers(1, 60),
    w=st.floats(1, 2000),
    h=st.floats(1, 2000),
    alt=st.floats(1, 50),
    extra=st.floats(0.1, 50),
    seed=st.integers(0, 2**32 - 1),
)
def test_generation_properties(n, w, h, alt, extra, seed):
    a = sc_mod.generate_random(n, (w, h), alt, alt + extra, seed)
    b = sc_mod.generate_random(n, (w, h), alt, alt + extra, seed)
    assert a == b
    xy = a.xy
    assert np.all((xy[:, 0] >= 0) & (xy[:, 0] <= w) & (xy[:, 1] >= 0) & (xy[:, 1] <= h))
    assert sc_mod.loads(json.dumps(a.to_dict())) == a
