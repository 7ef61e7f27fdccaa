"""Flexible-dimension PSO for choosing hover points.

Each particle carries a hover count ``k`` and ``2k`` hover coordinates, padded
with random auxiliary coordinates so the whole swarm shares one vector
length. Hover counts are steered by a stochastic punishment/compensation rule
towards the global best's count; K-means clusterings of the sensor layout
seed the swarm and periodically offer replacement positions. Plans are
compared feasibility-first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ContractError
from .objective import HoverPlan, ObjectiveValue, csop_value_fast

KMEANS_MAX_ITER = 100
KMEANS_N_INIT = 10


@dataclass(frozen=True)
class PsofkpParams:
    population: int = 20
    iters: int = 200
    c1: float = 2.0
    c2: float = 2.0
    w: float = 0.73
    rho_pc: float = 0.5
    kt: int = 20
    k_step: int | None = None  # None: max(1, round(n / 100))
    weights: tuple[float, float] = (1.0, 1.0)
    per_dimension_r: bool = True
    kmeans_n_init: int = 1  # Lloyd restarts per K-means call inside the swarm

    def __post_init__(self) -> None:
        if self.population < 2:
            raise ConfigError("population must be >= 2")
        if self.iters < 0:
            raise ConfigError("iters must be >= 0")
        if not 0.0 <= self.rho_pc <= 1.0:
            raise ConfigError(f"rho_pc must lie in [0, 1], got {self.rho_pc}")
        if self.kt < 1:
            raise ConfigError("kt must be >= 1")
        if self.kmeans_n_init < 1:
            raise ConfigError("kmeans_n_init must be >= 1")
        if self.k_step is not None and self.k_step < 1:
            raise ConfigError("k_step must be >= 1")

    def step_for(self, n: int) -> int:
        if self.k_step is not None:
            return self.k_step
        return max(1, round(n / 100))


@dataclass
class FlexParticle:
    """Swarm member. Only ``coords[:2k]`` is evaluated; the rest is padding."""

    k: int
    coords: np.ndarray
    velocity: np.ndarray
    value: ObjectiveValue
    s_rc: int = 0
    pbest_coords: np.ndarray = field(default=None)
    pbest_k: int = 0
    pbest_value: ObjectiveValue = field(default=None)

    @property
    def hover_points(self) -> np.ndarray:
        return self.coords[: 2 * self.k].reshape(-1, 2)


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    best_value: float
    best_k: int
    feasible: bool


# ---------------------------------------------------------------------------
# K-means operator


def _sq_dists(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    return ((x[:, None, :] - c[None, :, :]) ** 2).sum(axis=-1)


def _kmeanspp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    idx = [int(rng.integers(n))]
    d2 = ((x - x[idx[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            # all remaining points coincide with chosen centres
            rest = np.setdiff1d(np.arange(n), idx)
            nxt = int(rng.choice(rest))
        else:
            nxt = int(rng.choice(n, p=d2 / total))
        idx.append(nxt)
        d2 = np.minimum(d2, ((x - x[nxt]) ** 2).sum(axis=1))
    return x[idx].copy()


def lloyd(
    x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int = KMEANS_MAX_ITER
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """K-means by Lloyd iteration from a k-means++ start.

    An empty cluster is reseeded at the point farthest from its assigned
    centre. Returns centres, labels and the SSE after each assignment step.
    """
    n = len(x)
    if k == n:
        return x.copy(), np.arange(n), [0.0]
    centres = _kmeanspp(x, k, rng)
    labels = None
    history: list[float] = []
    for _ in range(max_iter):
        d2 = _sq_dists(x, centres)
        new_labels = d2.argmin(axis=1)
        history.append(float(d2[np.arange(n), new_labels].sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=k)
        sums = np.zeros((k, 2))
        np.add.at(sums, labels, x)
        nonempty = counts > 0
        centres[nonempty] = sums[nonempty] / counts[nonempty, None]
        for c in np.flatnonzero(~nonempty):
            own = ((x - centres[labels]) ** 2).sum(axis=1)
            far = int(own.argmax())
            centres[c] = x[far]
            labels[far] = c
    return centres, labels, history


def kmeans_hover(scenario, k: int, seed=None, n_init: int = KMEANS_N_INIT) -> np.ndarray:
    """``k`` hover points at K-means centres of the sensor layout, clamped to the region.

    Lloyd is restarted ``n_init`` times and the lowest-SSE clustering kept.
    ``seed`` may be an int or a numpy Generator.
    """
    if not 1 <= k <= scenario.n:
        raise ContractError(f"k must lie in [1, n={scenario.n}], got {k}")
    if n_init < 1:
        raise ContractError("n_init must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    x = np.asarray(scenario.xy)
    centres, best = None, np.inf
    for _ in range(1 if k == scenario.n else n_init):
        c, _, hist = lloyd(x, k, rng)
        if hist[-1] < best:
            centres, best = c, hist[-1]
    w, h = scenario.region
    np.clip(centres[:, 0], 0.0, w, out=centres[:, 0])
    np.clip(centres[:, 1], 0.0, h, out=centres[:, 1])
    return centres


# ---------------------------------------------------------------------------
# Punishment / compensation and flexible dimensions


def punish_compensate(
    particle: FlexParticle, gbest_k: int, feasible: bool, params: PsofkpParams, rng: np.random.Generator, n: int
) -> int:
    """New hover count for ``particle``; applied only with probability ``rho_pc``."""
    step = params.step_for(n)
    k = particle.k
    if rng.random() >= params.rho_pc:
        return k
    if feasible:
        k = k - step if particle.pbest_k >= gbest_k else gbest_k
        if k <= 1:
            k += step
    else:
        k = k + step if particle.pbest_k <= gbest_k else gbest_k
        if k >= n:
            k -= step
    return int(min(max(k, 2), n))


def pad_dimensions(population: list[FlexParticle], region: tuple[float, float], rng: np.random.Generator) -> list[FlexParticle]:
    """Pad every coordinate vector to ``2 * max(k)`` with uniform random auxiliary values.

    Vectors already long enough are left untouched, so repeated padding is
    idempotent. Velocities are padded with zeros.
    """
    if not population:
        raise ContractError("population is empty")
    target = 2 * max(p.k for p in population)
    w, h = region
    for p in population:
        extra = target - len(p.coords)
        if extra > 0:
            aux = rng.random(extra) * np.resize(np.array([w, h]), extra)
            p.coords = np.concatenate([p.coords, aux])
            p.velocity = np.concatenate([p.velocity, np.zeros(extra)])
    return population


def _attractor(own: np.ndarray, best_coords: np.ndarray) -> np.ndarray:
    # dimensions the best snapshot does not define exert no pull
    out = own.copy()
    m = min(len(own), len(best_coords))
    out[:m] = best_coords[:m]
    return out


def keep_better(particle: FlexParticle, lam: np.ndarray, value: ObjectiveValue, s_rc: int) -> bool:
    """Replace the particle's hover points by the K-means offspring ``lam`` if that is better.

    Ties keep the particle. Returns True when the offspring was adopted.
    """
    if len(lam) != 2 * particle.k:
        raise ContractError("offspring size does not match the particle's hover count")
    if not value < particle.value:
        return False
    particle.coords[: len(lam)] = lam
    particle.value, particle.s_rc = value, s_rc
    return True


# ---------------------------------------------------------------------------
# Main loop


def run(scenario, params: PsofkpParams = PsofkpParams(), seed: int = 0) -> tuple[HoverPlan, ObjectiveValue, list[TraceRow]]:
    """Search for a feasible plan minimising ``k + s_rc``.

    Returns the global-best plan, its objective value, and one trace row per
    iteration.
    """
    n = scenario.n
    if n < 2:
        raise ContractError("at least two sensor nodes are needed (hover count is bounded below by 2)")
    rng = np.random.default_rng(seed)
    w, h = scenario.region
    lo = np.zeros(2)
    hi = np.array([w, h])

    def evaluate(points: np.ndarray) -> tuple[ObjectiveValue, int]:
        return csop_value_fast(points.reshape(-1, 2), scenario, params.weights)

    swarm: list[FlexParticle] = []
    for _ in range(params.population):
        k = int(rng.integers(2, n + 1))
        coords = kmeans_hover(scenario, k, rng, params.kmeans_n_init).ravel()
        span = np.resize(hi - lo, len(coords))
        vel = (rng.random(len(coords)) * 2.0 - 1.0) * 0.1 * span
        val, s_rc = evaluate(coords)
        swarm.append(FlexParticle(k, coords, vel, val, s_rc, coords.copy(), k, val))
    pad_dimensions(swarm, scenario.region, rng)

    g = min(range(len(swarm)), key=lambda m: swarm[m].pbest_value.key())
    g_coords, g_k, g_value = swarm[g].pbest_coords.copy(), swarm[g].pbest_k, swarm[g].pbest_value

    trace: list[TraceRow] = []
    for it in range(1, params.iters + 1):
        refresh = it % params.kt == 0
        offspring: list[tuple[np.ndarray, ObjectiveValue, int] | None] = []
        for p in swarm:
            p.k = punish_compensate(p, g_k, p.value.feasible, params, rng, n)
            if 2 * p.k > len(p.coords):
                pad_dimensions(swarm, scenario.region, rng)
            if refresh:
                lam = kmeans_hover(scenario, p.k, rng, params.kmeans_n_init).ravel()
                offspring.append((lam, *evaluate(lam)))
            else:
                offspring.append(None)

            dim = len(p.coords)
            shape = dim if params.per_dimension_r else 1
            r1, r2 = rng.random(shape), rng.random(shape)
            pb = _attractor(p.coords, p.pbest_coords)
            gb = _attractor(p.coords, g_coords)
            p.velocity = params.w * p.velocity + params.c1 * r1 * (pb - p.coords) + params.c2 * r2 * (gb - p.coords)
            p.coords = np.clip(p.coords + p.velocity, np.resize(lo, dim), np.resize(hi, dim))
            p.value, p.s_rc = evaluate(p.hover_points)

        for p, off in zip(swarm, offspring):
            if off is not None:
                keep_better(p, *off)

        for p in swarm:
            if p.value < p.pbest_value:
                p.pbest_coords, p.pbest_k, p.pbest_value = p.hover_points.ravel().copy(), p.k, p.value
            if p.pbest_value < g_value:
                g_coords, g_k, g_value = p.pbest_coords.copy(), p.pbest_k, p.pbest_value
        trace.append(TraceRow(it, g_value.value, g_k, g_value.feasible))

    return HoverPlan(g_coords[: 2 * g_k].reshape(-1, 2)), g_value, trace
