"""Charging-efficiency and rotary-wing propulsion energy models."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, fields
from typing import Any

from .errors import ConfigError, ContractError


@dataclass(frozen=True)
class ChargingParams:
    """Constants of the resonant charging-efficiency curve ``a / (b d^6 + c)``."""

    a: float = 1.0
    b: float = 1.0
    c: float = 1.0

    def __post_init__(self) -> None:
        if self.b < 0 or not self.c > 0:
            raise ConfigError(f"charging params need b >= 0 and c > 0, got b={self.b}, c={self.c}")


@dataclass(frozen=True)
class PropulsionParams:
    """Rotary-wing power model constants.

    Defaults are the commonly used rotary-wing profile (Zeng, Xu & Zhang,
    IEEE TWC 2019); ``Ps`` and ``v_move`` are mission settings of this
    package. They only affect energy reports, never optimisation results.
    """

    P0: float = 79.86  # W, blade profile power
    Pi: float = 88.63  # W, induced power at hover
    U_tip: float = 120.0  # m/s
    v0: float = 4.03  # m/s, mean rotor induced velocity at hover
    d0: float = 0.6  # fuselage drag ratio
    s: float = 0.05  # rotor solidity
    rho_air: float = 1.225  # kg/m^3
    A: float = 0.503  # m^2, rotor disc area
    Ps: float = 10.0  # W, charging transmit power
    v_move: float = 10.0  # m/s, cruise speed

    def __post_init__(self) -> None:
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ConfigError(f"propulsion parameter {f.name} must be positive, got {getattr(self, f.name)}")

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "PropulsionParams":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown propulsion parameters: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in doc.items()})


@dataclass(frozen=True)
class EnergyBreakdown:
    t_move: float
    t_hover: float
    e_move: float
    e_hover: float
    e_charge: float
    e_total: float
    hover_mode: str = "per_stop"

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def charging_efficiency(d: float, params: ChargingParams = ChargingParams()) -> float:
    if d < 0:
        raise ContractError(f"distance must be non-negative, got {d}")
    return params.a / (params.b * d**6 + params.c)


def propulsion_power(v: float, params: PropulsionParams = PropulsionParams()) -> float:
    """Propulsion power (W) at horizontal speed ``v`` (m/s).

    The induced-power radicand is ``1 + 4 v^4 / (4 v0^4)``. A negative inner
    term (only reachable numerically at absurd speeds) is clamped to zero
    with a RuntimeWarning.
    """
    if v < 0:
        raise ContractError(f"speed must be non-negative, got {v}")
    p = params
    blade = p.P0 * (1.0 + 3.0 * v**2 / p.U_tip**2)
    inner = math.sqrt(1.0 + 4.0 * v**4 / (4.0 * p.v0**4)) - v**2 / (2.0 * p.v0**2)
    if inner < 0:
        warnings.warn(f"induced-power radicand {inner:g} < 0 at v={v}; clamped to 0", RuntimeWarning, stacklevel=2)
        inner = 0.0
    induced = p.Pi * math.sqrt(inner)
    parasite = 0.5 * p.d0 * p.rho_air * p.s * p.A * v**3
    return blade + induced + parasite


def hover_power(params: PropulsionParams = PropulsionParams()) -> float:
    return propulsion_power(0.0, params)


def mission_energy(
    plan,
    tour,
    per_node_charge_time: float,
    params: PropulsionParams = PropulsionParams(),
    *,
    hover_mode: str = "per_stop",
    n_nodes: int | None = None,
    closed: bool = True,
) -> EnergyBreakdown:
    """Energy budget of flying ``tour`` over ``plan`` and charging at each stop.

    ``hover_mode="per_stop"`` charges ``per_node_charge_time`` once per hover
    point (t_hover = k * t); ``"per_node"`` charges it once per sensor node
    (t_hover = n * t, requires ``n_nodes``).
    """
    from .objective import f_ctop

    k = plan.k
    if len(tour) != k:
        raise ContractError(f"tour visits {len(tour)} points but the plan has {k}")
    if per_node_charge_time < 0:
        raise ContractError("per-node charge time must be non-negative")
    if hover_mode == "per_stop":
        t_hover = k * per_node_charge_time
    elif hover_mode == "per_node":
        if n_nodes is None:
            raise ContractError("per_node hover accounting needs n_nodes")
        t_hover = n_nodes * per_node_charge_time
    else:
        raise ConfigError(f"unknown hover_mode {hover_mode!r}")

    length = f_ctop(tour, plan.array, closed=closed)
    t_move = length / params.v_move
    e_move = propulsion_power(params.v_move, params) * t_move
    e_hover = hover_power(params) * t_hover
    e_charge = params.Ps * t_hover
    return EnergyBreakdown(t_move, t_hover, e_move, e_hover, e_charge, e_move + e_hover + e_charge, hover_mode)
