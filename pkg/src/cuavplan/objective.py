"""Objective functions: hover count, repeated coverage, tour length and their sums.

Plans are compared feasibility-first: any plan that charges every node beats
any plan that does not, whatever their objective values.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError, FeasibilityError
from .geometry import coverage_matrix

# Tolerance used when checking that solver output stays inside the region.
REGION_TOL = 1e-9


class HoverPlan:
    """An ordered set of 2-D hover points (at the scenario's altitude)."""

    __slots__ = ("_points",)

    def __init__(self, points) -> None:
        arr = np.array(points, dtype=float).reshape(-1, 2)
        if len(arr) < 1:
            raise ContractError("a hover plan needs at least one point")
        arr.setflags(write=False)
        self._points = arr

    @property
    def array(self) -> np.ndarray:
        return self._points

    @property
    def points(self) -> list[tuple[float, float]]:
        return [(float(x), float(y)) for x, y in self._points]

    @property
    def k(self) -> int:
        return len(self._points)

    def __len__(self) -> int:
        return self.k

    def __eq__(self, other) -> bool:
        return isinstance(other, HoverPlan) and np.array_equal(self._points, other._points)

    def __hash__(self) -> int:
        return hash(self._points.tobytes())

    def __repr__(self) -> str:
        return f"HoverPlan(k={self.k})"

    def within(self, region: tuple[float, float], tol: float = REGION_TOL) -> bool:
        w, h = region
        p = self._points
        return bool(np.all((p[:, 0] >= -tol) & (p[:, 0] <= w + tol) & (p[:, 1] >= -tol) & (p[:, 1] <= h + tol)))

    def to_dict(self) -> dict:
        return {"k": self.k, "points": [[x, y] for x, y in self.points]}


@dataclass(frozen=True)
class CoverageReport:
    covered_count: int
    total_cover_incidences: int
    s_rc: int
    feasible: bool
    uncovered_ids: tuple[int, ...] = field(default=())


@functools.total_ordering
@dataclass(frozen=True)
class ObjectiveValue:
    """Objective value tagged with feasibility; ordered by :func:`compare_feasibility_first`."""

    feasible: bool
    value: float

    def key(self) -> tuple[bool, float]:
        return (not self.feasible, self.value)

    def __lt__(self, other: "ObjectiveValue") -> bool:
        if not isinstance(other, ObjectiveValue):
            return NotImplemented
        return compare_feasibility_first(self, other) < 0


def compare_feasibility_first(a: ObjectiveValue, b: ObjectiveValue) -> int:
    """-1 if ``a`` is better, 1 if ``b`` is better, 0 if equal."""
    if a.feasible != b.feasible:
        return -1 if a.feasible else 1
    if a.value < b.value:
        return -1
    if a.value > b.value:
        return 1
    return 0


@dataclass(frozen=True)
class Tour:
    """A visiting order over hover points ``0..k-1``."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        order = tuple(int(i) for i in self.order)
        object.__setattr__(self, "order", order)
        if sorted(order) != list(range(len(order))):
            raise ContractError(f"tour order is not a permutation of 0..{len(order) - 1}")

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __getitem__(self, i):
        return self.order[i]


def _as_array(plan) -> np.ndarray:
    if isinstance(plan, HoverPlan):
        return plan.array
    return np.asarray(plan, dtype=float).reshape(-1, 2)


def coverage_from_matrix(u: np.ndarray) -> tuple[int, int, np.ndarray]:
    """(covered_count, incidences, per-node cover counts) from a ``(k, n)`` coverage matrix."""
    per_node = u.sum(axis=0)
    return int(np.count_nonzero(per_node)), int(per_node.sum()), per_node


def evaluate_coverage(plan, scenario) -> CoverageReport:
    """Coverage statistics of a plan.

    For a feasible plan ``s_rc = incidences - n``. For an infeasible one the
    literal formula would go negative, so ``s_rc = incidences - covered``
    (repeat coverage among the nodes that are charged).
    """
    pts = _as_array(plan)
    u = coverage_matrix(pts, scenario)
    covered, incidences, per_node = coverage_from_matrix(u)
    feasible = covered == scenario.n
    uncovered = tuple(int(i) for i in np.flatnonzero(per_node == 0))
    return CoverageReport(covered, incidences, incidences - covered, feasible, uncovered)


def f_csop(plan, scenario, weights: tuple[float, float] = (1.0, 1.0)) -> ObjectiveValue:
    """Weighted hover count plus repeated coverage."""
    rep = evaluate_coverage(plan, scenario)
    k = len(_as_array(plan))
    return ObjectiveValue(rep.feasible, weights[0] * k + weights[1] * rep.s_rc)


def csop_value_fast(points: np.ndarray, scenario, weights: tuple[float, float] = (1.0, 1.0)) -> tuple[ObjectiveValue, int]:
    """Hot-path variant of :func:`f_csop` returning ``(value, s_rc)``."""
    u = coverage_matrix(points, scenario)
    covered, incidences, _ = coverage_from_matrix(u)
    s_rc = incidences - covered
    return ObjectiveValue(covered == scenario.n, weights[0] * len(points) + weights[1] * s_rc), s_rc


def _order(tour, k: int) -> np.ndarray:
    order = np.asarray(tour.order if isinstance(tour, Tour) else list(tour), dtype=np.int64)
    if len(order) != k or not np.array_equal(np.sort(order), np.arange(k)):
        raise ContractError(f"tour must be a permutation of 0..{k - 1}")
    return order


def tour_length(order: Sequence[int], points: np.ndarray, closed: bool = True) -> float:
    """Length of a visiting order, without validation."""
    p = points[np.asarray(order)]
    seg = np.diff(p, axis=0)
    total = float(np.sqrt((seg**2).sum(axis=1)).sum())
    if closed and len(p) > 1:
        total += float(np.hypot(*(p[0] - p[-1])))
    return total


def f_ctop(tour, points, closed: bool = True) -> float:
    """Tour length over hover points; closed (returns to start) by default."""
    pts = _as_array(points)
    return tour_length(_order(tour, len(pts)), pts, closed)


def f_jstop(plan, tour, scenario, closed: bool = True) -> float:
    """Joint objective ``k + s_rc + tour length`` of a feasible plan."""
    rep = evaluate_coverage(plan, scenario)
    if not rep.feasible:
        raise FeasibilityError(f"plan leaves {len(rep.uncovered_ids)} node(s) uncharged")
    pts = _as_array(plan)
    return len(pts) + rep.s_rc + f_ctop(tour, pts, closed)
