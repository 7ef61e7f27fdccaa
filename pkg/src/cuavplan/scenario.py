"""Problem instances: sensor layouts, region, flight altitude and charging range.

Scenario files are JSON documents::

    {"region": [w, h], "altitude": 10.0, "d_max": 14.142..., "seed": 1,
     "nodes": [[x, y], ...]}

Node ids are implicit (list position). On load, nodes may also be given as
``[id, x, y]`` triples or ``{"id": .., "x": .., "y": ..}`` objects; the ids
must then be unique and contiguous from 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError, ScenarioFormatError

CASE1_SEED = 20211
CASE2_SEED = 20212
CASE3_SEED = 20213

# (n, seed) for the three benchmark layouts; all share a 500 m x 500 m region,
# h = 10 m and d_max = 10*sqrt(2) m.
PRESETS: dict[int, tuple[int, int]] = {
    1: (100, CASE1_SEED),
    2: (500, CASE2_SEED),
    3: (1000, CASE3_SEED),
}
PRESET_REGION = (500.0, 500.0)
PRESET_ALTITUDE = 10.0
PRESET_D_MAX = 10.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class SensorNode:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class Scenario:
    """An immutable problem instance.

    ``nodes`` is a tuple of :class:`SensorNode` with ids ``0..n-1`` in order.
    """

    nodes: tuple[SensorNode, ...]
    region: tuple[float, float]
    altitude_h: float
    d_max: float
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "region", (float(self.region[0]), float(self.region[1])))
        _validate(self)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def width(self) -> float:
        return self.region[0]

    @property
    def height(self) -> float:
        return self.region[1]

    @property
    def ground_radius(self) -> float:
        """Planar radius of the disk charged from one hover point."""
        return math.sqrt(self.d_max**2 - self.altitude_h**2)

    @cached_property
    def xy(self) -> np.ndarray:
        """Node coordinates as a read-only ``(n, 2)`` array."""
        arr = np.array([[s.x, s.y] for s in self.nodes], dtype=float)
        arr.setflags(write=False)
        return arr

    def to_dict(self) -> dict[str, Any]:
        return {
            "region": [self.region[0], self.region[1]],
            "altitude": self.altitude_h,
            "d_max": self.d_max,
            "seed": self.seed,
            "nodes": [[s.x, s.y] for s in self.nodes],
        }


def _validate(sc: Scenario) -> None:
    w, h = sc.region
    if not (w > 0 and h > 0):
        raise ConfigError(f"region dimensions must be positive, got {sc.region}")
    if not sc.altitude_h > 0:
        raise ConfigError(f"altitude must be positive, got {sc.altitude_h}")
    if not sc.d_max > sc.altitude_h:
        raise ConfigError(
            f"d_max ({sc.d_max}) must exceed the altitude ({sc.altitude_h}); "
            "otherwise no node can ever be charged"
        )
    if len(sc.nodes) < 1:
        raise ConfigError("a scenario needs at least one sensor node")
    for i, s in enumerate(sc.nodes):
        if s.id != i:
            raise ConfigError(f"node ids must be contiguous from 0; position {i} holds id {s.id}")
        if not (0.0 <= s.x <= w and 0.0 <= s.y <= h):
            raise ConfigError(f"node {s.id} at ({s.x}, {s.y}) lies outside region {w} x {h}")


def generate_random(
    n: int,
    region: tuple[float, float] = PRESET_REGION,
    altitude: float = PRESET_ALTITUDE,
    d_max: float = PRESET_D_MAX,
    seed: int = 0,
) -> Scenario:
    """Place ``n`` nodes i.i.d. uniformly over ``region``.

    Identical arguments always give an identical scenario.
    """
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    if not d_max > altitude:
        raise ConfigError(f"d_max ({d_max}) must exceed the altitude ({altitude})")
    w, h = float(region[0]), float(region[1])
    if not (w > 0 and h > 0):
        raise ConfigError(f"region dimensions must be positive, got {region}")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, w, size=n)
    ys = rng.uniform(0.0, h, size=n)
    nodes = tuple(SensorNode(i, float(x), float(y)) for i, (x, y) in enumerate(zip(xs, ys)))
    return Scenario(nodes=nodes, region=(w, h), altitude_h=float(altitude), d_max=float(d_max), seed=int(seed))


def preset(case: int) -> Scenario:
    """Benchmark layout for case 1 (100 nodes), 2 (500) or 3 (1000)."""
    try:
        n, seed = PRESETS[int(case)]
    except (KeyError, ValueError):
        raise ConfigError(f"unknown preset case {case!r}; expected 1, 2 or 3") from None
    return generate_random(n, PRESET_REGION, PRESET_ALTITUDE, PRESET_D_MAX, seed)


def save(scenario: Scenario, path: str | Path) -> None:
    # json writes floats with repr(), which round-trips doubles exactly
    Path(path).write_text(json.dumps(scenario.to_dict(), indent=1) + "\n")


def loads(text: str, source: str = "<string>") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return from_dict(doc, source)


def load(path: str | Path) -> Scenario:
    path = Path(path)
    return loads(path.read_text(), str(path))


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFormatError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ScenarioFormatError(f"{where}: value must be finite, got {value!r}")
    return float(value)


def _parse_node(entry: Any, pos: int, source: str) -> SensorNode:
    where = f"{source}: field 'nodes[{pos}]'"
    if isinstance(entry, dict):
        missing = [k for k in ("x", "y") if k not in entry]
        if missing:
            raise ScenarioFormatError(f"{where}: missing key {missing[0]!r}")
        nid = entry.get("id", pos)
        x, y = entry["x"], entry["y"]
    elif isinstance(entry, (list, tuple)) and len(entry) == 2:
        nid, (x, y) = pos, entry
    elif isinstance(entry, (list, tuple)) and len(entry) == 3:
        nid, x, y = entry
    else:
        raise ScenarioFormatError(f"{where}: expected [x, y], [id, x, y] or an object, got {entry!r}")
    if isinstance(nid, bool) or not isinstance(nid, int):
        raise ScenarioFormatError(f"{where}: id must be an integer, got {nid!r}")
    return SensorNode(nid, _number(x, where + ".x"), _number(y, where + ".y"))


def from_dict(doc: Any, source: str = "<dict>") -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioFormatError(f"{source}: top level must be a JSON object")
    for key in ("region", "altitude", "d_max", "nodes"):
        if key not in doc:
            raise ScenarioFormatError(f"{source}: missing field {key!r}")
    region = doc["region"]
    if not isinstance(region, (list, tuple)) or len(region) != 2:
        raise ScenarioFormatError(f"{source}: field 'region' must be [width, height]")
    w = _number(region[0], f"{source}: field 'region[0]'")
    h = _number(region[1], f"{source}: field 'region[1]'")
    altitude = _number(doc["altitude"], f"{source}: field 'altitude'")
    d_max = _number(doc["d_max"], f"{source}: field 'd_max'")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ScenarioFormatError(f"{source}: field 'seed' must be an integer")
    raw_nodes = doc["nodes"]
    if not isinstance(raw_nodes, list):
        raise ScenarioFormatError(f"{source}: field 'nodes' must be a list")
    nodes = [_parse_node(e, i, source) for i, e in enumerate(raw_nodes)]

    ids = [s.id for s in nodes]
    if len(set(ids)) != len(ids):
        dup = next(i for i in ids if ids.count(i) > 1)
        raise ScenarioFormatError(f"{source}: field 'nodes': duplicated id {dup}")
    if sorted(ids) != list(range(len(ids))):
        raise ScenarioFormatError(f"{source}: field 'nodes': ids must be contiguous from 0")
    nodes.sort(key=lambda s: s.id)
    try:
        return Scenario(tuple(nodes), (w, h), altitude, d_max, seed)
    except ConfigError as exc:
        raise ScenarioFormatError(f"{source}: {exc}") from exc
