"""Exception hierarchy shared by all erwmx modules."""

from __future__ import annotations


class ErwmxError(Exception):
    """Base class for all erwmx errors."""


class DomainError(ErwmxError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(ErwmxError):
    """A function value leaves its declared range (detected at validation time)."""


class RegularityError(ErwmxError):
    """A derivative or smoothness requirement exceeds the declared continuity class."""


class DegreeError(ErwmxError):
    """A polynomial-degree restriction was violated."""


class NumericalError(ErwmxError):
    """A numerical result left its certified band (beyond clamping tolerance)."""


class ScheduleError(ErwmxError):
    """A sample-size schedule cannot produce a value (e.g. exhausted table)."""


class ConfigError(ErwmxError):
    """A model or run configuration is invalid."""


class BudgetError(ErwmxError):
    """A request exceeds a documented computational budget."""


class PlanError(ErwmxError):
    """An experiment plan is invalid."""


class DegenerateError(ErwmxError):
    """A statistic is degenerate (e.g. non-positive variance for a KS test)."""


class RegimeError(ErwmxError):
    """An operation was invoked for the wrong asymptotic regime."""


class NonUniqueFixedPointError(ErwmxError):
    """The drift has zero or several fixed points; prediction is indeterminate.

    Carries ``roots`` (all roots found, sorted ascending) so callers can report them.
    """

    def __init__(self, roots: list[float], message: str | None = None):
        self.roots = list(roots)
        super().__init__(message or f"fixed point not unique: {self.roots}")


class TauNonpositiveError(ErwmxError):
    """tau = 1 - drift'(x*) is non-positive; the limit theorems do not apply."""

    def __init__(self, tau: float):
        self.tau = tau
        super().__init__(f"tau = {tau} is not positive")
