"""Discrete PSO for the hover-point visiting order.

Positions are permutations; a velocity is an ordered list of exchange pairs
``(i, j)`` naming *positions* in the sequence. The update merges the inertia
velocity and the simplest velocities towards the personal and global bests,
keeping each pair with a component-specific probability. Every
``local_search_period`` iterations each particle is refined by 2-opt
(accepted only if shorter) followed by crossing removal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, ContractError
from .geometry import distance_matrix, segments_intersect_many
from .objective import Tour, tour_length

# Minimum length decrease (m) for a local-search move to be applied.
MOVE_EPS = 1e-9


@dataclass(frozen=True)
class SwapVelocity:
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple((int(i), int(j)) for i, j in self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


@dataclass(frozen=True)
class Psod2pParams:
    population: int = 20
    iters: int = 200
    c1: float = 0.8
    c2: float = 0.8
    w: float = 1.0
    local_search_period: int = 20
    # 2-opt sweeps per local-search step; 0 repeats until no improving move is left
    two_opt_sweeps: int = 0
    # "scaled": pairs kept with probability c*r; "plain": with probability r
    retention: str = "scaled"

    def __post_init__(self) -> None:
        if self.population < 1:
            raise ConfigError("population must be >= 1")
        if self.iters < 0:
            raise ConfigError("iters must be >= 0")
        for name in ("c1", "c2", "w"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} is a retention probability and must lie in [0, 1], got {v}")
        if self.local_search_period < 1:
            raise ConfigError("local_search_period must be >= 1")
        if self.two_opt_sweeps < 0:
            raise ConfigError("two_opt_sweeps must be >= 0")
        if self.retention not in ("scaled", "plain"):
            raise ConfigError(f"unknown retention mode {self.retention!r}")


def _order_of(tour) -> list[int]:
    return list(tour.order) if isinstance(tour, Tour) else [int(i) for i in tour]


def apply_velocity(tour, v: SwapVelocity | Iterable[tuple[int, int]]) -> Tour:
    """Apply the exchange pairs left to right."""
    seq = _order_of(tour)
    k = len(seq)
    for i, j in v:
        if not (0 <= i < k and 0 <= j < k):
            raise ContractError(f"exchange pair ({i}, {j}) out of range for a tour of {k} points")
        seq[i], seq[j] = seq[j], seq[i]
    return Tour(tuple(seq))


def _apply_inplace(seq: list[int], pairs: Sequence[tuple[int, int]]) -> None:
    for i, j in pairs:
        seq[i], seq[j] = seq[j], seq[i]


def _simplest_pairs(src: Sequence[int], dst: Sequence[int]) -> list[tuple[int, int]]:
    cur = list(src)
    where = {val: pos for pos, val in enumerate(cur)}
    pairs = []
    for i, want in enumerate(dst):
        if cur[i] != want:
            j = where[want]
            pairs.append((i, j))
            where[cur[i]] = j
            where[want] = i
            cur[i], cur[j] = want, cur[i]
    return pairs


def simplest_velocity(src, dst) -> SwapVelocity:
    """Shortest exchange-pair list turning ``src`` into ``dst``.

    Each pair fixes one position, so the list has ``k - cycles`` pairs, the
    swap distance between the two permutations.
    """
    a, b = _order_of(src), _order_of(dst)
    if len(a) != len(b):
        raise ContractError(f"tours differ in length ({len(a)} vs {len(b)})")
    if sorted(a) != sorted(b):
        raise ContractError("tours are not permutations of the same points")
    return SwapVelocity(tuple(_simplest_pairs(a, b)))


def merge_velocities(parts: Iterable[tuple[float, SwapVelocity]], rng: np.random.Generator) -> SwapVelocity:
    """Concatenate components, keeping each pair independently with its component's probability."""
    out: list[tuple[int, int]] = []
    for prob, vel in parts:
        if not 0.0 <= prob <= 1.0:
            raise ContractError(f"retention probability must lie in [0, 1], got {prob}")
        pairs = vel.pairs if isinstance(vel, SwapVelocity) else tuple(vel)
        if not pairs:
            continue
        keep = rng.random(len(pairs)) < prob
        out.extend(p for p, kept in zip(pairs, keep) if kept)
    return SwapVelocity(tuple(out))


def _two_opt_array(seq: np.ndarray, D: np.ndarray) -> np.ndarray:
    """One sweep of 2-opt over a closed tour, position 0 fixed."""
    seq = seq.copy()
    k = len(seq)
    if k < 4:
        return seq
    for j in range(k - 2):
        h0 = j + 2
        while h0 < k:
            hs = np.arange(h0, k)
            if j == 0:
                hs = hs[hs != k - 1]
            if len(hs) == 0:
                break
            a, b = seq[j], seq[j + 1]
            c = seq[hs]
            d = seq[(hs + 1) % k]
            gain = D[a, b] + D[c, d] - D[a, c] - D[b, d]
            hit = np.flatnonzero(gain > MOVE_EPS)
            if len(hit) == 0:
                break
            h = int(hs[hit[0]])
            seq[j + 1 : h + 1] = seq[j + 1 : h + 1][::-1]
            h0 = h + 1
    return seq


def _two_opt_sweeps(seq: np.ndarray, D: np.ndarray, sweeps: int) -> np.ndarray:
    done = 0
    while sweeps == 0 or done < sweeps:
        new = _two_opt_array(seq, D)
        done += 1
        if np.array_equal(new, seq):
            break
        seq = new
    return seq


def two_opt(tour, points, sweeps: int = 1) -> Tour:
    """2-opt: reconnect edges (j, j+1), (h, h+1) as (j, h), (j+1, h+1) whenever that is shorter.

    Performs ``sweeps`` passes over all edge pairs (default one); ``sweeps=0``
    repeats until a pass finds no improving move.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    seq = np.asarray(_order_of(tour), dtype=np.int64)
    if len(seq) != len(pts):
        raise ContractError("tour and point list differ in length")
    return Tour(tuple(_two_opt_sweeps(seq, distance_matrix(pts), sweeps).tolist()))


def _uncross_array(seq: np.ndarray, pts: np.ndarray, D: np.ndarray) -> np.ndarray:
    seq = seq.copy()
    k = len(seq)
    if k < 4:
        return seq
    changed = True
    while changed:
        changed = False
        for j in range(k - 2):
            while True:
                last = k - 2 if j == 0 else k - 1
                if last < j + 2:
                    break
                hs = np.arange(j + 2, last + 1)
                a, b = seq[j], seq[j + 1]
                c = seq[hs]
                d = seq[(hs + 1) % k]
                cross = segments_intersect_many(pts[a], pts[b], pts[c], pts[d])
                gain = D[a, b] + D[c, d] - D[a, c] - D[b, d]
                hit = np.flatnonzero(cross & (gain > MOVE_EPS))
                if len(hit) == 0:
                    break
                h = int(hs[hit[0]])
                seq[j + 1 : h + 1] = seq[j + 1 : h + 1][::-1]
                changed = True
    return seq


def uncross(tour, points) -> Tour:
    """Reverse sub-sequences until no two non-adjacent tour edges cross.

    Every reversal strictly shortens the tour, so the loop terminates.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    seq = np.asarray(_order_of(tour), dtype=np.int64)
    if len(seq) != len(pts):
        raise ContractError("tour and point list differ in length")
    return Tour(tuple(_uncross_array(seq, pts, distance_matrix(pts)).tolist()))


def crossing_pairs(tour, points) -> list[tuple[int, int]]:
    """All pairs of non-adjacent edge indices (j, h) of the closed tour that intersect."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    seq = _order_of(tour)
    k = len(seq)
    out = []
    for j in range(k):
        for h in range(j + 2, k):
            if j == 0 and h == k - 1:
                continue
            a, b = pts[seq[j]], pts[seq[(j + 1) % k]]
            c, d = pts[seq[h]], pts[seq[(h + 1) % k]]
            if segments_intersect_many(a, b, c[None], d[None])[0]:
                out.append((j, h))
    return out


@dataclass
class _Particle:
    pos: list[int]
    vel: list[tuple[int, int]]
    length: float
    best_pos: list[int]
    best_len: float


def run(points, params: Psod2pParams = Psod2pParams(), seed: int = 0) -> tuple[Tour, float, list[float]]:
    """Optimise the closed visiting order over ``points``.

    Returns the best tour, its length, and the global-best length after each
    iteration.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    k = len(pts)
    if k < 1:
        raise ContractError("need at least one hover point")
    rng = np.random.default_rng(seed)
    D = distance_matrix(pts)

    def length(seq) -> float:
        return tour_length(seq, pts)

    swarm: list[_Particle] = []
    for _ in range(params.population):
        pos = rng.permutation(k).tolist()
        n_pairs = int(rng.integers(0, k)) if k > 1 else 0
        vel = [tuple(int(x) for x in rng.integers(0, k, size=2)) for _ in range(n_pairs)]
        L = length(pos)
        swarm.append(_Particle(pos, vel, L, list(pos), L))
    best = min(swarm, key=lambda p: p.best_len)
    g_pos, g_len = list(best.best_pos), best.best_len

    trace: list[float] = []
    for it in range(1, params.iters + 1):
        for p in swarm:
            r1, r2 = rng.random(), rng.random()
            if params.retention == "scaled":
                q1, q2 = params.c1 * r1, params.c2 * r2
            else:
                q1, q2 = r1, r2
            to_pbest = _simplest_pairs(p.pos, p.best_pos)
            to_gbest = _simplest_pairs(p.pos, g_pos)
            vel = merge_velocities(((params.w, p.vel), (q1, to_pbest), (q2, to_gbest)), rng).pairs

            old = p.pos
            new = list(old)
            _apply_inplace(new, vel)
            L = length(new)

            if it % params.local_search_period == 0:
                arr = np.asarray(new, dtype=np.int64)
                cand = _two_opt_sweeps(arr, D, params.two_opt_sweeps)
                cand_len = length(cand)
                if cand_len < L:
                    arr, L = cand, cand_len
                arr = _uncross_array(arr, pts, D)
                new, L = arr.tolist(), length(arr)

            p.pos, p.length = new, L
            if L < p.best_len:
                p.best_pos, p.best_len = list(new), L
                if L < g_len:
                    g_pos, g_len = list(new), L
            p.vel = _simplest_pairs(old, new)
        trace.append(g_len)

    return Tour(tuple(g_pos)), g_len, trace
