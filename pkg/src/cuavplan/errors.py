"""Exception types shared across the package."""


class CuavPlanError(Exception):
    """Base class for all errors raised by cuavplan."""


class ConfigError(CuavPlanError, ValueError):
    """Invalid scenario, solver, or experiment configuration."""


class ScenarioFormatError(CuavPlanError, ValueError):
    """A scenario file could not be parsed or failed validation."""


class ContractError(CuavPlanError, ValueError):
    """An argument violates an operation's precondition."""


class FeasibilityError(CuavPlanError, ValueError):
    """An operation that requires a feasible hover plan received an infeasible one."""
