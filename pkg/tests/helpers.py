"""Small builders and independent oracles shared by the test modules."""

import functools
import itertools
import math
import operator
from collections import deque

import numpy as np

from cuavplan.scenario import PRESET_ALTITUDE, PRESET_D_MAX, Scenario, SensorNode


def make_scenario(xy, region=(500.0, 500.0), h=PRESET_ALTITUDE, d_max=PRESET_D_MAX):
    nodes = tuple(SensorNode(i, float(x), float(y)) for i, (x, y) in enumerate(xy))
    return Scenario(nodes, region, h, d_max)


def naive_tour_length(order, pts):
    k = len(order)
    return sum(math.dist(pts[order[i]], pts[order[(i + 1) % k]]) for i in range(k))


def factorial_tsp(pts):
    """Shortest closed tour by plain enumeration of every permutation."""
    k = len(pts)
    return min(naive_tour_length(p, pts) for p in itertools.permutations(range(k)))


def bfs_swap_distance(a, b):
    """Minimum number of transpositions from ``a`` to ``b`` by breadth-first search."""
    a, b = tuple(a), tuple(b)
    if a == b:
        return 0
    seen = {a}
    frontier = deque([(a, 0)])
    k = len(a)
    while frontier:
        cur, d = frontier.popleft()
        for i in range(k):
            for j in range(i + 1, k):
                nxt = list(cur)
                nxt[i], nxt[j] = nxt[j], nxt[i]
                nxt = tuple(nxt)
                if nxt == b:
                    return d + 1
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append((nxt, d + 1))
    raise AssertionError("unreachable")


def cycle_count(a, b):
    pos = {v: i for i, v in enumerate(b)}
    sigma = [pos[v] for v in a]
    seen = [False] * len(a)
    cycles = 0
    for i in range(len(a)):
        if not seen[i]:
            cycles += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = sigma[j]
    return cycles


def best_two_partition_sse(x):
    """Exhaustive minimum SSE over all splits of ``x`` into two non-empty groups."""
    n = len(x)
    best = math.inf
    for mask in range(1, 2 ** (n - 1)):
        g = np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
        sse = sum(((x[sel] - x[sel].mean(axis=0)) ** 2).sum() for sel in (g, ~g))
        best = min(best, sse)
    return best


def grid_cover_oracle(scenario, k, step):
    """Can ``k`` hover points on a regular grid of spacing ``step`` cover every node?"""
    w, h = scenario.region
    gx, gy = np.meshgrid(np.arange(0, w + 1e-9, step), np.arange(0, h + 1e-9, step))
    cand = np.column_stack([gx.ravel(), gy.ravel()])
    xy = scenario.xy
    d2 = ((cand[:, None, :] - xy[None]) ** 2).sum(-1) + scenario.altitude_h**2
    cov = np.sqrt(d2) <= scenario.d_max
    masks = {int(sum(1 << j for j in np.flatnonzero(row))) for row in cov}
    masks.discard(0)
    full = (1 << scenario.n) - 1
    return any(
        functools.reduce(operator.or_, combo) == full
        for combo in itertools.combinations_with_replacement(sorted(masks), k)
    )


# one line per acceptance criterion, printed in the pytest terminal summary
ACCEPTANCE_LINES: list[str] = []


def report(criterion: str, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
