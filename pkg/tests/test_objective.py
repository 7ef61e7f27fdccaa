import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuavplan.errors import ContractError, FeasibilityError
from cuavplan.objective import (
    HoverPlan,
    ObjectiveValue,
    Tour,
    compare_feasibility_first,
    csop_value_fast,
    evaluate_coverage,
    f_csop,
    f_ctop,
    f_jstop,
)
from cuavplan.scenario import preset

from helpers import make_scenario, naive_tour_length


def test_double_cover_single_node():
    sc = make_scenario([(100, 100)])
    plan = HoverPlan([(100, 100), (105, 100)])
    rep = evaluate_coverage(plan, sc)
    assert rep.total_cover_incidences == 2
    assert rep.s_rc == 1
    assert rep.feasible
    assert f_csop(plan, sc) == ObjectiveValue(True, 3.0)


def test_plan_covering_nothing():
    sc = make_scenario([(100, 100), (300, 300)])
    rep = evaluate_coverage(HoverPlan([(0, 0)]), sc)
    assert rep.covered_count == 0
    assert not rep.feasible
    assert rep.uncovered_ids == (0, 1)
    val = f_csop(HoverPlan([(0, 0)]), sc)
    assert val == ObjectiveValue(False, 1.0)
    assert ObjectiveValue(True, 1e6) < val


def test_node_positions_as_plan_give_zero_repeat_when_isolated():
    # n nodes each > 2r apart: hovering over each node is feasible with s_rc = 0
    sc = make_scenario([(50 * i + 10, 10) for i in range(8)])
    rep = evaluate_coverage(HoverPlan(sc.xy), sc)
    assert rep.feasible and rep.s_rc == 0
    assert f_csop(HoverPlan(sc.xy), sc).value == 8


def test_weights():
    sc = make_scenario([(100, 100)])
    plan = HoverPlan([(100, 100), (105, 100)])
    assert f_csop(plan, sc, (2.0, 0.5)).value == 4.5


def test_fast_path_matches():
    sc = preset(1)
    rng = np.random.default_rng(1)
    for k in (1, 10, 200):
        pts = rng.random((k, 2)) * 500
        val, s_rc = csop_value_fast(pts, sc)
        assert val == f_csop(pts, sc)
        assert s_rc == evaluate_coverage(pts, sc).s_rc


def test_tour_length_examples():
    tri = [(0, 0), (3, 0), (0, 4)]
    for order in itertools.permutations(range(3)):
        assert f_ctop(Tour(order), tri) == pytest.approx(12.0)
    assert f_ctop(Tour((0, 1)), [(0, 0), (7, 0)]) == pytest.approx(14.0)
    assert f_ctop(Tour((0, 1, 2)), tri, closed=False) == pytest.approx(8.0)


def test_collinear_spatial_order_is_shortest():
    pts = [(float(x), 0.0) for x in (0, 2, 3, 7, 11)]
    ordered = f_ctop(Tour(tuple(range(5))), pts)
    for perm in itertools.permutations(range(5)):
        assert ordered <= f_ctop(Tour(perm), pts) + 1e-9


def test_jstop():
    sc = make_scenario([(100, 100), (120, 100)])
    plan = HoverPlan([(100, 100), (120, 100)])
    assert f_jstop(plan, Tour((0, 1)), sc) == pytest.approx(2 + 0 + 40)
    one = make_scenario([(100, 100)])
    assert f_jstop(HoverPlan([(100, 100)]), Tour((0,)), one) == 1.0
    with pytest.raises(FeasibilityError):
        f_jstop(HoverPlan([(0, 0), (1, 1)]), Tour((0, 1)), sc)


def test_compare_examples():
    assert compare_feasibility_first(ObjectiveValue(True, 1000), ObjectiveValue(False, 1)) == -1
    assert compare_feasibility_first(ObjectiveValue(True, 3), ObjectiveValue(True, 5)) == -1
    assert compare_feasibility_first(ObjectiveValue(True, 3), ObjectiveValue(True, 3)) == 0
    assert compare_feasibility_first(ObjectiveValue(False, 3), ObjectiveValue(False, 3)) == 0


def test_tour_validation():
    with pytest.raises(ContractError):
        Tour((0, 0, 1))
    with pytest.raises(ContractError):
        f_ctop(Tour((0, 1)), [(0, 0), (1, 1), (2, 2)])
    with pytest.raises(ContractError):
        HoverPlan([])


def test_plan_is_immutable():
    plan = HoverPlan([(1, 2), (3, 4)])
    with pytest.raises(ValueError):
        plan.array[0, 0] = 9
    assert plan == HoverPlan([(1, 2), (3, 4)])
    assert plan.within((10, 10)) and not plan.within((2, 2))


values = st.builds(ObjectiveValue, st.booleans(), st.floats(-1e6, 1e6, allow_nan=False))


@given(a=values, b=values, c=values)
def test_total_order_axioms(a, b, c):
    ab, ba = compare_feasibility_first(a, b), compare_feasibility_first(b, a)
    assert ab == -ba
    assert (ab == 0) == (a == b)
    if ab <= 0 and compare_feasibility_first(b, c) <= 0:
        assert compare_feasibility_first(a, c) <= 0
    assert sorted([a, b, c]) == sorted([c, b, a], key=ObjectiveValue.key)


small_pts = st.lists(st.tuples(st.floats(0, 60), st.floats(0, 60)), min_size=1, max_size=3)


@given(nodes=small_pts, plan=st.lists(st.tuples(st.floats(0, 60), st.floats(0, 60)), min_size=1, max_size=4))
def test_coverage_matches_naive_loop(nodes, plan):
    sc = make_scenario(nodes, region=(60, 60))
    covered = [
        any(math.sqrt((px - x) ** 2 + (py - y) ** 2 + sc.altitude_h**2) <= sc.d_max for px, py in plan)
        for x, y in nodes
    ]
    incid = sum(
        math.sqrt((px - x) ** 2 + (py - y) ** 2 + sc.altitude_h**2) <= sc.d_max for px, py in plan for x, y in nodes
    )
    rep = evaluate_coverage(HoverPlan(plan), sc)
    assert rep.feasible == all(covered)
    assert rep.covered_count == sum(covered)
    assert rep.s_rc == incid - sum(covered) >= 0


@given(
    pts=st.lists(st.tuples(st.floats(0, 100), st.floats(0, 100)), min_size=2, max_size=9),
    data=st.data(),
)
def test_tour_length_symmetries(pts, data):
    k = len(pts)
    order = data.draw(st.permutations(range(k)))
    shift = data.draw(st.integers(0, k - 1))
    base = f_ctop(Tour(order), pts)
    assert base == pytest.approx(naive_tour_length(order, pts), rel=1e-9, abs=1e-9)
    rotated = order[shift:] + order[:shift]
    assert f_ctop(Tour(rotated), pts) == pytest.approx(base, rel=1e-9, abs=1e-9)
    assert f_ctop(Tour(order[::-1]), pts) == pytest.approx(base, rel=1e-9, abs=1e-9)
