"""Reference schedulers, tour heuristics and exact oracles for small instances."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, ContractError
from .geometry import distance_matrix
from .objective import HoverPlan, Tour, evaluate_coverage, tour_length

UNIFORM_GRID_COUNT = 1301
BRUTE_TSP_MAX = 10
BRUTE_COVER_MAX_N = 8
BRUTE_COVER_MAX_K = 3


class BaselineKind(str, Enum):
    UNIFORM_GRID = "uniform_grid"
    RANDOM_SCHEDULE = "random_schedule"
    NEAREST_NEIGHBOR = "nearest_neighbor"
    SIM_ANNEAL = "sim_anneal"
    BRUTE_TSP = "brute_tsp"
    BRUTE_COVER = "brute_cover"


def uniform_grid(scenario, count: int = UNIFORM_GRID_COUNT) -> HoverPlan:
    """``count`` hover points at cell centres of a near-square lattice, row-major."""
    if count < 1:
        raise ContractError("count must be >= 1")
    cols = math.ceil(math.sqrt(count))
    rows = math.ceil(count / cols)
    w, h = scenario.region
    xs = (np.arange(cols) + 0.5) * (w / cols)
    ys = (np.arange(rows) + 0.5) * (h / rows)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])[:count]
    return HoverPlan(pts)


def random_schedule(scenario, k: int, seed: int = 0) -> HoverPlan:
    """``k`` hover points drawn uniformly over the region.

    Points come from one sequential stream, so the plan for ``k`` is a prefix
    of the plan for ``k + 1`` under the same seed.
    """
    if k < 1:
        raise ContractError("k must be >= 1")
    rng = np.random.default_rng(seed)
    w, h = scenario.region
    pts = rng.random((k, 2)) * np.array([w, h])
    return HoverPlan(pts)


def min_feasible_random_k(scenario, seed: int = 0, k_hi: int | None = None) -> int:
    """Smallest k whose random schedule (fixed seed) charges every node, by bisection.

    Feasibility is monotone in k because plans are nested prefixes.
    """
    if k_hi is None:
        k_hi = max(2 * scenario.n, 1024)
    while not evaluate_coverage(random_schedule(scenario, k_hi, seed), scenario).feasible:
        k_hi *= 2
        if k_hi > 10_000_000:
            raise RuntimeError("random schedule never became feasible")
    lo, hi = 0, k_hi  # lo infeasible (or empty), hi feasible
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if evaluate_coverage(random_schedule(scenario, mid, seed), scenario).feasible:
            hi = mid
        else:
            lo = mid
    return hi


def nearest_neighbor_tour(points, start: int = 0) -> Tour:
    """Greedy nearest-unvisited chaining; ties go to the lower index."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    k = len(pts)
    if k < 1:
        raise ContractError("need at least one point")
    if not 0 <= start < k:
        raise ContractError(f"start {start} out of range")
    D = distance_matrix(pts)
    visited = np.zeros(k, dtype=bool)
    order = [start]
    visited[start] = True
    cur = start
    for _ in range(k - 1):
        row = np.where(visited, np.inf, D[cur])
        cur = int(np.argmin(row))  # argmin returns the first minimum
        visited[cur] = True
        order.append(cur)
    return Tour(tuple(order))


@dataclass(frozen=True)
class SAParams:
    t0: float = 500.0
    moves_per_temp: int = 200
    cooling: float = 0.98
    levels: int = 200
    chains: int = 20

    def __post_init__(self) -> None:
        if not self.t0 > 0 or not 0 < self.cooling < 1:
            raise ConfigError("SA needs t0 > 0 and 0 < cooling < 1")
        if self.moves_per_temp < 0 or self.levels < 0:
            raise ConfigError("SA move and level counts must be non-negative")
        if self.chains < 1:
            raise ConfigError("SA needs at least one chain")


def _anneal(seq: list[int], D: list[list[float]], cur: float, params: SAParams, rng) -> tuple[list[int], float, list[float]]:
    k = len(seq)
    best_seq, best = list(seq), cur
    trace = []
    T = params.t0
    n_moves = params.moves_per_temp
    for _ in range(params.levels):
        ij = rng.integers(0, k, size=(n_moves, 2))
        us = rng.random(n_moves)
        for (i, j), u in zip(ij.tolist(), us.tolist()):
            if i == j:
                continue
            if i > j:
                i, j = j, i
            a, b = seq[i], seq[j]
            ip, inx = seq[i - 1], seq[(i + 1) % k]
            jp, jn = seq[j - 1], seq[(j + 1) % k]
            if j == i + 1:
                delta = D[ip][b] + D[a][jn] - D[ip][a] - D[b][jn]
            elif i == 0 and j == k - 1:
                # a and b are neighbours through the closing edge
                delta = D[jp][a] + D[b][inx] - D[jp][b] - D[a][inx]
            else:
                delta = D[ip][b] + D[b][inx] + D[jp][a] + D[a][jn] - D[ip][a] - D[a][inx] - D[jp][b] - D[b][jn]
            if delta <= 0 or u < math.exp(-delta / T):
                seq[i], seq[j] = b, a
                cur += delta
                if cur < best - 1e-12:
                    best_seq, best = list(seq), cur
        T *= params.cooling
        trace.append(best)
    return best_seq, best, trace


def sim_anneal_tour(points, params: SAParams = SAParams(), seed: int = 0, initial=None) -> tuple[Tour, list[float]]:
    """Metropolis annealing on the swap neighbourhood with geometric cooling.

    Runs ``params.chains`` independent chains, each from a random order (or
    all from ``initial``), and returns the best tour seen by any chain plus
    the best-seen length after each temperature level.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    k = len(pts)
    if k < 2:
        raise ContractError("need at least two points")
    rng = np.random.default_rng(seed)
    D = distance_matrix(pts).tolist()
    best_seq: list[int] | None = None
    best = math.inf
    trace = [math.inf] * params.levels
    for _ in range(params.chains):
        if initial is not None:
            seq = list(initial.order if isinstance(initial, Tour) else initial)
        else:
            seq = rng.permutation(k).tolist()
        cur = tour_length(seq, pts)
        if k < 4:
            chain_seq, chain_best, chain_trace = seq, cur, [cur] * params.levels
        else:
            chain_seq, chain_best, chain_trace = _anneal(seq, D, cur, params, rng)
        if chain_best < best:
            best_seq, best = chain_seq, chain_best
        trace = [min(a, b) for a, b in zip(trace, chain_trace)]
    return Tour(tuple(best_seq)), trace


def brute_tsp(points) -> tuple[Tour, float]:
    """Exact shortest closed tour by enumeration with point 0 anchored."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    k = len(pts)
    if k < 1:
        raise ContractError("need at least one point")
    if k > BRUTE_TSP_MAX:
        raise ContractError(f"brute_tsp refuses k={k} > {BRUTE_TSP_MAX}")
    if k <= 3:
        order = tuple(range(k))
        return Tour(order), tour_length(order, pts)
    D = distance_matrix(pts)
    perms = np.array(list(itertools.permutations(range(1, k))), dtype=np.int64)
    full = np.hstack([np.zeros((len(perms), 1), dtype=np.int64), perms])
    lengths = D[full[:, :-1], full[:, 1:]].sum(axis=1) + D[full[:, -1], full[:, 0]]
    best = int(np.argmin(lengths))
    order = tuple(full[best].tolist())
    return Tour(order), tour_length(order, pts)


def _cover_candidates(scenario, grid_step: float) -> np.ndarray:
    r = scenario.ground_radius
    xy = scenario.xy
    cands = [xy]
    n = len(xy)
    rr = r * (1.0 - 1e-9)
    for i in range(n):
        for j in range(i + 1, n):
            p, q = xy[i], xy[j]
            d = float(np.hypot(*(q - p)))
            mid = (p + q) / 2.0
            cands.append(mid[None])
            if 0 < d <= 2 * rr:
                off = math.sqrt(rr * rr - (d / 2.0) ** 2)
                perp = np.array([-(q - p)[1], (q - p)[0]]) / d
                cands.append(np.vstack([mid + off * perp, mid - off * perp]))
    w, h = scenario.region
    gx = np.arange(0.0, w + 1e-12, grid_step)
    gy = np.arange(0.0, h + 1e-12, grid_step)
    if len(gx) * len(gy) <= 250_000:
        mx, my = np.meshgrid(gx, gy)
        cands.append(np.column_stack([mx.ravel(), my.ravel()]))
    pts = np.vstack(cands)
    inside = (pts[:, 0] >= 0) & (pts[:, 0] <= w) & (pts[:, 1] >= 0) & (pts[:, 1] <= h)
    return pts[inside]


def brute_cover(scenario, k: int, grid_step: float | None = None) -> tuple[bool, HoverPlan | None]:
    """Exhaustively decide whether ``k`` hover points can charge every node.

    Candidate centres are the nodes, pairwise midpoints, the two centres of
    radius-r circles through each close node pair, and a regular grid over
    the region. Returns ``(feasible, witness)``.
    """
    if scenario.n > BRUTE_COVER_MAX_N:
        raise ContractError(f"brute_cover refuses n={scenario.n} > {BRUTE_COVER_MAX_N}")
    if not 1 <= k <= BRUTE_COVER_MAX_K:
        raise ContractError(f"brute_cover needs 1 <= k <= {BRUTE_COVER_MAX_K}, got {k}")
    from .geometry import coverage_matrix

    if grid_step is None:
        grid_step = scenario.ground_radius / 4.0
    cands = _cover_candidates(scenario, grid_step)
    u = coverage_matrix(cands, scenario)
    weights = 1 << np.arange(scenario.n, dtype=np.int64)
    masks = (u.astype(np.int64) * weights).sum(axis=1)
    full = (1 << scenario.n) - 1
    # one representative candidate per distinct non-empty mask
    rep: dict[int, int] = {}
    for idx, m in enumerate(masks.tolist()):
        if m and m not in rep:
            rep[m] = idx
    uniq = list(rep)
    for combo in itertools.combinations_with_replacement(range(len(uniq)), k):
        acc = 0
        for c in combo:
            acc |= uniq[c]
        if acc == full:
            return True, HoverPlan(cands[[rep[uniq[c]] for c in combo]])
    return False, None
