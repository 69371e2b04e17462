"""Exception hierarchy shared across the package."""


class PreflightError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(PreflightError):
    """An operation was called outside its documented preconditions."""


class ScenarioError(PreflightError):
    """A scenario, map, or solution file is malformed or inconsistent."""


class PlanTimeout(PreflightError):
    """A search exceeded its wall-clock deadline."""
