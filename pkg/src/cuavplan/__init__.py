"""Charging-UAV mission planning over a wireless rechargeable sensor network.

Hover points are chosen by a flexible-dimension PSO (:mod:`cuavplan.psofkp`),
the visiting order by a discrete PSO (:mod:`cuavplan.psod2p`); baselines,
objectives, an energy model and an experiment harness complete the package.
"""

from .errors import ConfigError, ContractError, CuavPlanError, FeasibilityError, ScenarioFormatError
from .objective import (
    CoverageReport,
    HoverPlan,
    ObjectiveValue,
    Tour,
    compare_feasibility_first,
    evaluate_coverage,
    f_csop,
    f_ctop,
    f_jstop,
)
from .scenario import Scenario, SensorNode

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ContractError",
    "CoverageReport",
    "CuavPlanError",
    "FeasibilityError",
    "HoverPlan",
    "ObjectiveValue",
    "Scenario",
    "ScenarioFormatError",
    "SensorNode",
    "Tour",
    "compare_feasibility_first",
    "evaluate_coverage",
    "f_csop",
    "f_ctop",
    "f_jstop",
]
