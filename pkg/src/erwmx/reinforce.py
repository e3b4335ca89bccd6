"""Catalog and validation of reinforcement functions f: [0,1] -> [0,1].

A reinforcement function maps the sampled fraction of +1 steps to a propensity.
Each spec carries the regularity metadata (continuity class, Hoelder/Lipschitz
data, monotonicity and convexity tags, analytic derivatives) that the
condition checker and regime analysis consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, RangeError, RegularityError

# kind tags
CONSTANT = "constant"
LINEAR = "linear"
AFFINE_DECREASING = "affine_decreasing"
EXPONENTIAL = "exponential"
QUADRATIC = "quadratic"
MAJORITY = "majority"
TABLE = "table"
CUSTOM = "custom"

KINDS = (CONSTANT, LINEAR, AFFINE_DECREASING, EXPONENTIAL, QUADRATIC, MAJORITY, TABLE, CUSTOM)

# continuity classes
C0, C1, C2, DISCONTINUOUS = "C0", "C1", "C2", "discontinuous"

# monotonicity tags ("non_monotone" covers anything that is not *strictly* monotone)
STRICTLY_INCREASING = "strictly_increasing"
STRICTLY_DECREASING = "strictly_decreasing"
NON_MONOTONE = "non_monotone"
MONO_CONSTANT = "constant"

# convexity tags
STRICTLY_CONVEX = "strictly_convex"
STRICTLY_CONCAVE = "strictly_concave"
AFFINE = "affine"
NEITHER = "neither"

_VALIDATION_POINTS = 10_001  # grid-scan resolution used at construction
_FD_STEP = 1e-6  # finite-difference step (one-sided at the endpoints)


@dataclass(frozen=True)
class ReinforcementSpec:
    """A reinforcement function together with its regularity metadata.

    Immutable after validation; safe to share across workers.  ``params`` holds
    the kind's coefficients (slope c, table values, ...).  ``extended_range``
    admits families whose values leave [0,1] (e.g. f(x)=cx with c up to
    p/(2p-1), the largest slope keeping the step law a probability);
    validity is then re-checked against g at DriftContext construction.
    """

    kind: str
    params: tuple[float, ...]
    continuity_class: str
    monotonicity: str
    convexity: str
    holder: tuple[float, float] | None = None  # (exponent alpha_f, constant L)
    lipschitz_constant: float | None = None
    analytic_d1: Callable[[float], float] | None = field(default=None, compare=False)
    analytic_d2: Callable[[float], float] | None = field(default=None, compare=False)
    modulus_bound: Callable[[float], float] | None = field(default=None, compare=False)
    table_k: int | None = None
    fn: Callable[[float], float] | None = field(default=None, compare=False)
    extended_range: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RangeError(f"unknown reinforcement kind {self.kind!r}")
        if self.kind == TABLE:
            if self.table_k is None or self.table_k < 1:
                raise RangeError("table spec requires a declared k >= 1")
            if len(self.params) != self.table_k + 1:
                raise RangeError(
                    f"table spec needs k+1={self.table_k + 1} grid values, got {len(self.params)}"
                )
        if self.kind == CUSTOM and self.fn is None:
            raise RangeError("custom spec requires an evaluator")
        if self.holder is not None:
            alpha, const = self.holder
            if not (0.0 < alpha <= 1.0) or const < 0.0:
                raise RangeError(f"invalid Hoelder data (alpha={alpha}, L={const})")
        if self.lipschitz_constant is not None and self.lipschitz_constant < 0.0:
            raise RangeError("Lipschitz constant must be >= 0")
        values = f_values(self, self.validation_grid())
        if not np.all(np.isfinite(values)):
            raise RangeError(f"{self.kind} spec produced non-finite values")
        if not self.extended_range:
            if values.min() < -1e-12 or values.max() > 1.0 + 1e-12:
                raise RangeError(
                    f"{self.kind} spec leaves [0,1]: range [{values.min():.6g}, {values.max():.6g}]"
                )

    def validation_grid(self) -> np.ndarray:
        """Points where the spec is defined: the dense grid, or the table's own grid."""
        if self.kind == TABLE:
            return np.arange(self.table_k + 1) / self.table_k
        return np.linspace(0.0, 1.0, _VALIDATION_POINTS)


def evaluate_f(spec: ReinforcementSpec, x: float) -> float:
    """Evaluate f at a single point of [0,1]."""
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"f is defined on [0,1]; got x={x}")
    return _eval_scalar(spec, float(x))


def f_values(spec: ReinforcementSpec, xs: np.ndarray) -> np.ndarray:
    """Vectorised evaluation of f on points of [0,1]."""
    xs = np.asarray(xs, dtype=float)
    if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
        raise DomainError("f is defined on [0,1]")
    kind = spec.kind
    if kind == CONSTANT:
        return np.full_like(xs, spec.params[0])
    if kind == LINEAR:
        return spec.params[0] * xs
    if kind == AFFINE_DECREASING:
        return spec.params[0] * (1.0 - xs)
    if kind == EXPONENTIAL:
        return spec.params[0] * np.exp(xs)
    if kind == QUADRATIC:
        return xs * xs
    if kind == MAJORITY:
        return np.where(xs > 0.5, 1.0, np.where(xs < 0.5, 0.0, 0.5))
    if kind == TABLE:
        scaled = xs * spec.table_k
        idx = np.rint(scaled).astype(int)
        if np.any(np.abs(scaled - idx) > 1e-9 * max(1, spec.table_k)):
            raise DomainError("table spec refuses off-grid queries (x must be i/k)")
        return np.asarray(spec.params, dtype=float)[idx]
    return np.array([spec.fn(float(x)) for x in xs])


def _eval_scalar(spec: ReinforcementSpec, x: float) -> float:
    kind = spec.kind
    if kind == CONSTANT:
        return spec.params[0]
    if kind == LINEAR:
        return spec.params[0] * x
    if kind == AFFINE_DECREASING:
        return spec.params[0] * (1.0 - x)
    if kind == EXPONENTIAL:
        return spec.params[0] * math.exp(x)
    if kind == QUADRATIC:
        return x * x
    if kind == MAJORITY:
        if x > 0.5:
            return 1.0
        if x < 0.5:
            return 0.0
        return 0.5  # symmetric tie rule keeps H odd for symmetric models
    if kind == TABLE:
        scaled = x * spec.table_k
        idx = int(round(scaled))
        if abs(scaled - idx) > 1e-9 * max(1, spec.table_k):
            raise DomainError("table spec refuses off-grid queries (x must be i/k)")
        return spec.params[idx]
    return float(spec.fn(x))


def derivative_f(spec: ReinforcementSpec, x: float, order: int) -> float:
    """First or second derivative of f, analytic if declared, else finite differences.

    Finite differences use step 1e-6, one-sided at the endpoints.  Raises
    RegularityError when the declared continuity class does not admit the order.
    """
    if order not in (1, 2):
        raise DomainError(f"derivative order must be 1 or 2, got {order}")
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"f is defined on [0,1]; got x={x}")
    admits = {C1: 1, C2: 2}.get(spec.continuity_class, 0)
    if order > admits:
        raise RegularityError(
            f"order-{order} derivative requested but f is {spec.continuity_class}"
        )
    if order == 1 and spec.analytic_d1 is not None:
        return float(spec.analytic_d1(x))
    if order == 2 and spec.analytic_d2 is not None:
        return float(spec.analytic_d2(x))
    h = _FD_STEP
    f = lambda t: _eval_scalar(spec, t)
    if order == 1:
        if x < h:
            return (f(x + h) - f(x)) / h
        if x > 1.0 - h:
            return (f(x) - f(x - h)) / h
        return (f(x + h) - f(x - h)) / (2.0 * h)
    if x < h:
        return (f(x + 2 * h) - 2.0 * f(x + h) + f(x)) / (h * h)
    if x > 1.0 - h:
        return (f(x) - 2.0 * f(x - h) + f(x - 2 * h)) / (h * h)
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def modulus_of_continuity_bound(spec: ReinforcementSpec, delta: float) -> float | None:
    """Upper bound on sup{|f(x)-f(y)| : |x-y| < delta}, or None if undeclared."""
    if delta <= 0.0:
        raise DomainError("delta must be > 0")
    if spec.modulus_bound is not None:
        return float(spec.modulus_bound(delta))
    if spec.holder is not None:
        alpha, const = spec.holder
        return const * delta**alpha
    if spec.lipschitz_constant is not None:
        return spec.lipschitz_constant * delta
    return None


# ---------------------------------------------------------------------------
# catalog constructors
# ---------------------------------------------------------------------------


def constant(c: float) -> ReinforcementSpec:
    """f(x) = c."""
    return ReinforcementSpec(
        kind=CONSTANT,
        params=(float(c),),
        continuity_class=C2,
        monotonicity=MONO_CONSTANT,
        convexity=AFFINE,
        lipschitz_constant=0.0,
        holder=(1.0, 0.0),
        analytic_d1=lambda x: 0.0,
        analytic_d2=lambda x: 0.0,
        modulus_bound=lambda d: 0.0,
    )


def linear(c: float, extended_range: bool = False) -> ReinforcementSpec:
    """f(x) = c x (increasing affine family; c > 1 needs extended_range)."""
    c = float(c)
    return ReinforcementSpec(
        kind=LINEAR,
        params=(c,),
        continuity_class=C2,
        monotonicity=STRICTLY_INCREASING if c > 0 else MONO_CONSTANT,
        convexity=AFFINE,
        lipschitz_constant=abs(c),
        holder=(1.0, abs(c)),
        analytic_d1=lambda x: c,
        analytic_d2=lambda x: 0.0,
        extended_range=extended_range,
    )


def affine_decreasing(c: float, extended_range: bool = False) -> ReinforcementSpec:
    """f(x) = c (1 - x) (decreasing affine family)."""
    c = float(c)
    return ReinforcementSpec(
        kind=AFFINE_DECREASING,
        params=(c,),
        continuity_class=C2,
        monotonicity=STRICTLY_DECREASING if c > 0 else MONO_CONSTANT,
        convexity=AFFINE,
        lipschitz_constant=abs(c),
        holder=(1.0, abs(c)),
        analytic_d1=lambda x: -c,
        analytic_d2=lambda x: 0.0,
        extended_range=extended_range,
    )


def exponential(c: float, extended_range: bool = False) -> ReinforcementSpec:
    """f(x) = c e^x (strictly convex; Lipschitz constant c e)."""
    c = float(c)
    return ReinforcementSpec(
        kind=EXPONENTIAL,
        params=(c,),
        continuity_class=C2,
        monotonicity=STRICTLY_INCREASING if c > 0 else MONO_CONSTANT,
        convexity=STRICTLY_CONVEX if c > 0 else AFFINE,
        lipschitz_constant=c * math.e,
        holder=(1.0, c * math.e),
        analytic_d1=lambda x: c * math.exp(x),
        analytic_d2=lambda x: c * math.exp(x),
        extended_range=extended_range,
    )


def quadratic() -> ReinforcementSpec:
    """f(x) = x^2."""
    return ReinforcementSpec(
        kind=QUADRATIC,
        params=(),
        continuity_class=C2,
        monotonicity=STRICTLY_INCREASING,
        convexity=STRICTLY_CONVEX,
        lipschitz_constant=2.0,
        holder=(1.0, 2.0),
        analytic_d1=lambda x: 2.0 * x,
        analytic_d2=lambda x: 2.0,
    )


def majority() -> ReinforcementSpec:
    """Majority rule: 1 above 1/2, 0 below, 1/2 at the tie."""
    return ReinforcementSpec(
        kind=MAJORITY,
        params=(),
        continuity_class=DISCONTINUOUS,
        monotonicity=NON_MONOTONE,  # monotone but not strictly; excluded from G1
        convexity=NEITHER,
    )


def table(values, k: int) -> ReinforcementSpec:
    """Grid values f(i/k), i = 0..k; refuses off-grid queries."""
    vals = tuple(float(v) for v in values)
    return ReinforcementSpec(
        kind=TABLE,
        params=vals,
        continuity_class=DISCONTINUOUS,
        monotonicity=_table_monotonicity(vals),
        convexity=NEITHER,
        table_k=int(k),
    )


def custom(
    fn: Callable[[float], float],
    continuity_class: str = C0,
    monotonicity: str = NON_MONOTONE,
    convexity: str = NEITHER,
    holder: tuple[float, float] | None = None,
    lipschitz_constant: float | None = None,
    analytic_d1: Callable[[float], float] | None = None,
    analytic_d2: Callable[[float], float] | None = None,
    modulus_bound: Callable[[float], float] | None = None,
    extended_range: bool = False,
) -> ReinforcementSpec:
    """Compiled-in extension point for reinforcement functions outside the catalog."""
    return ReinforcementSpec(
        kind=CUSTOM,
        params=(),
        continuity_class=continuity_class,
        monotonicity=monotonicity,
        convexity=convexity,
        holder=holder,
        lipschitz_constant=lipschitz_constant,
        analytic_d1=analytic_d1,
        analytic_d2=analytic_d2,
        modulus_bound=modulus_bound,
        fn=fn,
        extended_range=extended_range,
    )


def _table_monotonicity(vals: tuple[float, ...]) -> str:
    diffs = np.diff(vals)
    if np.all(diffs == 0):
        return MONO_CONSTANT
    if np.all(diffs > 0):
        return STRICTLY_INCREASING
    if np.all(diffs < 0):
        return STRICTLY_DECREASING
    return NON_MONOTONE
