"""Fixed points, tau, regime classification, and hypothesis checking.

The drift whose fixed points matter depends on the sample-size schedule:
constant k uses h(x) = H(x) - x on [-1,1]; a growing schedule uses the limit
drift g(x) - x on [0,1].  tau = 1 - (drift derivative at the fixed point)
selects the regime: diffusive (tau > 1/2, Gaussian sqrt(n) fluctuations),
critical (tau = 1/2, sqrt(n / ln n) scaling), superdiffusive (tau < 1/2,
n^tau-scaled almost-sure random limit).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import reinforce as _reinforce
from .drift import DriftContext, eval_H, eval_H_prime, eval_H_second, eval_g
from .errors import (
    DomainError,
    NonUniqueFixedPointError,
    RegularityError,
    TauNonpositiveError,
)
from .reinforce import derivative_f, evaluate_f

CRIT_TOL = 1e-9  # half-width of the critical band around tau = 1/2
NEAR_CRIT_WARN = 1e-3  # warn when finite-n Monte Carlo cannot separate regimes
_RESIDUAL_TOL = 1e-9  # |h(x*)| accepted for a fixed point
_SIGN_MARGIN = 1e-12  # uniform-sign margin for H'/H'' scans


@dataclass(frozen=True)
class ConstantK:
    k: int


@dataclass(frozen=True)
class GrowingLimit:
    pass


GROWING_LIMIT = GrowingLimit()


class Regime(str, enum.Enum):
    DIFFUSIVE = "diffusive"
    CRITICAL = "critical"
    SUPERDIFFUSIVE = "superdiffusive"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class FixedPointScan:
    """All drift roots found on the scan grid, plus tangential near-roots.

    ``roots`` is sorted ascending and already includes the tangential entries;
    ``tangential`` lists the appended near-roots (|h| < 1e-9 with no sign
    change), each of which also produced a warning.
    """

    roots: tuple[float, ...]
    tangential: tuple[float, ...]
    warnings: tuple[str, ...]


def _drift_fn(ctx: DriftContext, k_or_limit):
    if isinstance(k_or_limit, ConstantK):
        k = k_or_limit.k
        return (lambda x: eval_H(ctx, k, x) - x), (-1.0, 1.0)
    if isinstance(k_or_limit, GrowingLimit):
        return (lambda x: eval_g(ctx, x) - x), (0.0, 1.0)
    raise DomainError(f"k_or_limit must be ConstantK or GrowingLimit, got {k_or_limit!r}")


def find_fixed_points(
    ctx: DriftContext,
    k_or_limit,
    grid_size: int = 4096,
    tol: float = 1e-12,
) -> FixedPointScan:
    """Bracket-and-bisect every sign change of the drift; report tangential near-roots.

    Each sign-change bracket is bisected until its width is at most ``tol``.
    Grid points where the drift vanishes exactly count as roots.  Local minima
    of |h| below 1e-9 without a sign change are appended with a warning.
    """
    h, (lo, hi) = _drift_fn(ctx, k_or_limit)
    xs = np.linspace(lo, hi, grid_size + 1)
    hs = np.array([h(x) for x in xs])
    roots: list[float] = []
    warnings: list[str] = []
    for i, (x, v) in enumerate(zip(xs, hs)):
        if v == 0.0:
            roots.append(float(x))
    for i in range(grid_size):
        a, b = xs[i], xs[i + 1]
        fa, fb = hs[i], hs[i + 1]
        if fa == 0.0 or fb == 0.0:
            continue
        if fa * fb < 0.0:
            while b - a > tol:
                mid = 0.5 * (a + b)
                fm = h(mid)
                if fm == 0.0:
                    a = b = mid
                    break
                if fa * fm < 0.0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
            roots.append(float(0.5 * (a + b)))
    roots = _dedupe(sorted(roots), 10.0 * max(tol, 1e-15))
    tangential: list[float] = []
    step = (hi - lo) / grid_size
    for i in range(1, grid_size):
        if abs(hs[i]) < _RESIDUAL_TOL and abs(hs[i]) <= abs(hs[i - 1]) and abs(hs[i]) <= abs(hs[i + 1]):
            if hs[i - 1] * hs[i + 1] > 0.0 and all(abs(xs[i] - r) > step for r in roots):
                tangential.append(float(xs[i]))
                warnings.append(
                    f"tangential near-root at x={xs[i]:.9g} (|h|={abs(hs[i]):.3g}, no sign change)"
                )
    all_roots = _dedupe(sorted(roots + tangential), 10.0 * max(tol, 1e-15))
    return FixedPointScan(tuple(all_roots), tuple(tangential), tuple(warnings))


def _dedupe(sorted_vals: list[float], eps: float) -> list[float]:
    out: list[float] = []
    for v in sorted_vals:
        if not out or v - out[-1] > eps:
            out.append(v)
    return out


def compute_tau(ctx: DriftContext, k_or_limit, x_star: float) -> float:
    """tau = 1 - H'(x*) for constant k, or 1 - (2p-1) f'(x*) for the growing limit."""
    h, _ = _drift_fn(ctx, k_or_limit)
    if abs(h(x_star)) > _RESIDUAL_TOL:
        raise DomainError(f"x*={x_star} is not a fixed point (residual {h(x_star):.3g})")
    if isinstance(k_or_limit, ConstantK):
        return 1.0 - eval_H_prime(ctx, k_or_limit.k, x_star)
    return 1.0 - (2.0 * ctx.p - 1.0) * derivative_f(ctx.spec, x_star, 1)


@dataclass(frozen=True)
class RegimeClassification:
    regime: Regime
    scaling: str
    warnings: tuple[str, ...] = ()


def classify_regime(tau: float, crit_tol: float = CRIT_TOL) -> RegimeClassification:
    """Pure classification of tau into the three regimes (Indeterminate if tau <= 0)."""
    warnings: list[str] = []
    if tau <= 0.0:
        return RegimeClassification(
            Regime.INDETERMINATE,
            "none (tau <= 0 outside the theorems' hypotheses)",
            ("tau <= 0: no regime claim",),
        )
    if 0.0 < abs(tau - 0.5) < NEAR_CRIT_WARN:
        warnings.append(
            f"tau={tau:.6g} is within {NEAR_CRIT_WARN} of 1/2; finite-n Monte Carlo "
            "cannot separate regimes here"
        )
    if tau > 0.5 + crit_tol:
        return RegimeClassification(
            Regime.DIFFUSIVE, "sqrt(n): Gaussian fluctuations", tuple(warnings)
        )
    if abs(tau - 0.5) <= crit_tol:
        return RegimeClassification(
            Regime.CRITICAL, "sqrt(n / ln n): Gaussian fluctuations", tuple(warnings)
        )
    return RegimeClassification(
        Regime.SUPERDIFFUSIVE,
        "n^tau: almost-sure convergence to a finite random limit",
        tuple(warnings),
    )


@dataclass(frozen=True)
class RegimeReport:
    """Prediction bundle for a model: fixed points, tau, regime, centering, variance."""

    fixed_points: tuple[float, ...]
    unique: bool
    x_star: float | None
    tau: float | None
    regime: Regime
    centering: float | None
    scaling_exponent: str
    predicted_variance: float | None
    warnings: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "fixed_points": list(self.fixed_points),
            "unique": self.unique,
            "x_star": self.x_star,
            "tau": self.tau,
            "regime": self.regime.value,
            "centering": self.centering,
            "scaling_exponent": self.scaling_exponent,
            "predicted_variance": self.predicted_variance,
            "warnings": list(self.warnings),
        }


def predicted_clt(model, allow_indeterminate: bool = False) -> RegimeReport:
    """Full regime prediction for a model (Theorems on both sampling schemes agree).

    Raises NonUniqueFixedPointError when the drift has zero or several roots,
    unless ``allow_indeterminate`` asks for an Indeterminate report instead.
    Endpoint fixed points are reported with a warning and no regime claim.
    """
    ctx = model.drift_context()
    k_or_limit = model.k_or_limit()
    scan = find_fixed_points(ctx, k_or_limit)
    warnings = list(scan.warnings)
    lo, hi = (-1.0, 1.0) if isinstance(k_or_limit, ConstantK) else (0.0, 1.0)

    def indeterminate(extra: list[str]) -> RegimeReport:
        return RegimeReport(
            fixed_points=scan.roots,
            unique=len(scan.roots) == 1,
            x_star=scan.roots[0] if len(scan.roots) == 1 else None,
            tau=None,
            regime=Regime.INDETERMINATE,
            centering=None,
            scaling_exponent="none",
            predicted_variance=None,
            warnings=tuple(warnings + extra),
        )

    if len(scan.roots) != 1:
        if allow_indeterminate:
            return indeterminate([f"fixed point not unique: {list(scan.roots)}"])
        raise NonUniqueFixedPointError(list(scan.roots))
    x_star = scan.roots[0]
    if min(abs(x_star - lo), abs(x_star - hi)) <= _RESIDUAL_TOL:
        return indeterminate(
            [f"fixed point x*={x_star:.9g} sits on the domain boundary; no regime claim"]
        )
    try:
        tau = compute_tau(ctx, k_or_limit, x_star)
    except RegularityError as exc:
        return indeterminate([f"tau unavailable: {exc}"])
    if tau <= 0.0:
        if allow_indeterminate:
            return indeterminate([f"tau={tau:.6g} <= 0"])
        raise TauNonpositiveError(tau)
    cls = classify_regime(tau)
    warnings.extend(cls.warnings)
    if isinstance(k_or_limit, ConstantK):
        centering = x_star
        base_var = 1.0 - x_star * x_star
    else:
        centering = 2.0 * x_star - 1.0
        base_var = 4.0 * x_star * (1.0 - x_star)
    if cls.regime is Regime.DIFFUSIVE:
        variance = base_var / (2.0 * tau - 1.0)
    elif cls.regime is Regime.CRITICAL:
        variance = base_var
    else:
        variance = None
    return RegimeReport(
        fixed_points=scan.roots,
        unique=True,
        x_star=x_star,
        tau=tau,
        regime=cls.regime,
        centering=centering,
        scaling_exponent=cls.scaling,
        predicted_variance=variance,
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# condition checker
# ---------------------------------------------------------------------------

HOLDS, FAILS, UNKNOWN = "holds", "fails", "unknown"

CONDITION_IDS = (
    "A1", "A2", "B1", "B2", "B3", "C1", "C2", "D1", "D2", "E1", "E2",
    "F1", "F2", "F3", "F4", "G1", "G2", "G3", "S5", "S6", "S7", "S8", "Cor1",
)


@dataclass(frozen=True)
class ConditionReport:
    statuses: dict[str, tuple[str, str]] = field(default_factory=dict)

    def status(self, cid: str) -> str:
        return self.statuses[cid][0]

    def evidence(self, cid: str) -> str:
        return self.statuses[cid][1]

    def to_json_dict(self) -> dict:
        return {
            cid: {"status": st, "evidence": ev}
            for cid, (st, ev) in self.statuses.items()
        }


def check_conditions(model) -> ConditionReport:
    """Evaluate every hypothesis block (A through G, series criteria, corollary rule).

    Constant-k-only conditions report Unknown under growing schedules and vice
    versa where a condition is undecidable; series criteria are decided
    analytically for power schedules (and for constant schedules, whose series
    provably diverge) and by a partial-sum trend heuristic otherwise, which
    never reports Holds.
    """
    spec = model.spec
    p = model.p
    sched = model.schedule
    statuses: dict[str, tuple[str, str]] = {}

    f0 = evaluate_f(spec, 0.0) if spec.kind != _reinforce.TABLE else spec.params[0]
    f1 = evaluate_f(spec, 1.0) if spec.kind != _reinforce.TABLE else spec.params[-1]

    # A1/A2: endpoint conditions keeping g strictly inside [0,1]
    if p > 0.5:
        bound = p / (2.0 * p - 1.0)
        ok = f1 < bound
        statuses["A1"] = (
            HOLDS if ok else FAILS,
            f"p={p} > 1/2 and f(1)={f1:.6g} {'<' if ok else '>='} p/(2p-1)={bound:.6g}",
        )
        statuses["A2"] = (FAILS, f"requires p < 1/2 (p={p})")
    elif p < 0.5:
        bound = (1.0 - p) / (1.0 - 2.0 * p)
        ok = f0 < bound
        statuses["A1"] = (FAILS, f"requires p > 1/2 (p={p})")
        statuses["A2"] = (
            HOLDS if ok else FAILS,
            f"p={p} < 1/2 and f(0)={f0:.6g} {'<' if ok else '>='} (1-p)/(1-2p)={bound:.6g}",
        )
    else:
        statuses["A1"] = (FAILS, "p = 1/2 is excluded")
        statuses["A2"] = (FAILS, "p = 1/2 is excluded")

    is_constant_k = sched.kind == "constant"
    ctx = model.drift_context()

    if is_constant_k:
        k = sched.k
        _constant_k_conditions(statuses, ctx, spec, p, k)
    else:
        for cid in ("B1", "B2", "B3", "C1", "C2", "D1", "D2", "E1", "E2"):
            statuses[cid] = (UNKNOWN, "condition requires a constant sample size")

    _g_conditions(statuses, spec, p)

    tau = _tau_or_none(model)
    _series_conditions(statuses, model, tau)

    missing = [cid for cid in CONDITION_IDS if cid not in statuses]
    if missing:  # implementation invariant: every id present
        raise AssertionError(f"condition ids missing: {missing}")
    return ConditionReport({cid: statuses[cid] for cid in CONDITION_IDS})


def _tau_or_none(model) -> float | None:
    try:
        report = predicted_clt(model, allow_indeterminate=True)
    except (RegularityError, TauNonpositiveError):
        return None
    return report.tau


def _constant_k_conditions(statuses, ctx, spec, p, k) -> None:
    xs = -1.0 + 2.0 * (np.arange(4096) + 0.5) / 4096  # interior scan points
    hp = np.array([eval_H_prime(ctx, k, x) for x in xs])
    if np.all(hp < -_SIGN_MARGIN):
        statuses["B1"] = (HOLDS, f"H' < 0 on a 4096-point interior grid (max {hp.max():.3g})")
    else:
        statuses["B1"] = (
            FAILS,
            f"H' is not uniformly negative (max {hp.max():.3g}, min {hp.min():.3g})",
        )
    if k >= 2:
        hs = np.array([eval_H_second(ctx, k, x) for x in xs])
        if np.all(hs > _SIGN_MARGIN):
            statuses["B2"] = (HOLDS, f"H'' > 0 on the grid: strictly convex (min {hs.min():.3g})")
        elif np.all(hs < -_SIGN_MARGIN):
            statuses["B2"] = (HOLDS, f"H'' < 0 on the grid: strictly concave (max {hs.max():.3g})")
        else:
            statuses["B2"] = (
                FAILS,
                f"H'' changes sign or vanishes (range [{hs.min():.3g}, {hs.max():.3g}])",
            )
    else:
        statuses["B2"] = (FAILS, "k = 1 makes H affine: neither strictly convex nor concave")
    analytic = k * abs(2.0 * p - 1.0)
    sup_grid = float(np.max(np.abs(hp)))
    if analytic < 1.0:
        statuses["B3"] = (HOLDS, f"analytic bound k|2p-1| = {analytic:.6g} < 1")
    elif sup_grid < 1.0 - _RESIDUAL_TOL:
        statuses["B3"] = (
            HOLDS,
            f"grid sup|H'| = {sup_grid:.6g} < 1 (analytic bound {analytic:.6g} inconclusive)",
        )
    elif sup_grid >= 1.0:
        statuses["B3"] = (FAILS, f"grid sup|H'| = {sup_grid:.6g} >= 1: not a contraction")
    else:
        statuses["B3"] = (UNKNOWN, f"grid sup|H'| = {sup_grid:.6g} within 1e-9 of 1")

    fk = f_values_on_grid(spec, k)
    diffs = np.diff(fk)
    # strictness up to floating crumbs: grid values like 1.2 * (i/3) carry
    # O(eps) residue in exact-zero differences
    crumb = 1e-12 * max(1.0, float(np.max(np.abs(fk))))
    a1 = statuses["A1"][0] == HOLDS
    a2 = statuses["A2"][0] == HOLDS
    dec = bool(np.all(diffs <= crumb) and np.any(diffs < -crumb))
    inc = bool(np.all(diffs >= -crumb) and np.any(diffs > crumb))
    statuses["C1"] = (
        HOLDS if (a1 and dec) else FAILS,
        f"A1 {'holds' if a1 else 'fails'}; f grid values "
        f"{'non-increasing with a strict drop' if dec else 'not non-increasing with a strict drop'}",
    )
    statuses["C2"] = (
        HOLDS if (a2 and inc) else FAILS,
        f"A2 {'holds' if a2 else 'fails'}; f grid values "
        f"{'non-decreasing with a strict rise' if inc else 'not non-decreasing with a strict rise'}",
    )

    # second differences f((j+2)/k) - 2 f((j+1)/k) + f(j/k), j = 0..k-2
    if k >= 2:
        d2 = fk[2:] - 2.0 * fk[1:-1] + fk[:-2]
        cvx = bool(np.all(d2 >= -crumb) and np.any(d2 > crumb))
        ccv = bool(np.all(d2 <= crumb) and np.any(d2 < -crumb))
        statuses["D1"] = (
            HOLDS if cvx else FAILS,
            f"grid second differences {'all >= 0 with one strict' if cvx else 'not all >= 0 with one strict'}",
        )
        statuses["D2"] = (
            HOLDS if ccv else FAILS,
            f"grid second differences {'all <= 0 with one strict' if ccv else 'not all <= 0 with one strict'}",
        )
    else:
        statuses["D1"] = (FAILS, "k = 1 admits no second differences")
        statuses["D2"] = (FAILS, "k = 1 admits no second differences")

    lo_w, hi_w = 0.5, 0.5 + 1.0 / (2.0 * k)
    if lo_w < p < hi_w and statuses["A1"][0] == HOLDS:
        statuses["E1"] = (HOLDS, f"p={p} in ({lo_w}, {hi_w:.6g}) and f(1) < p/(2p-1)")
    else:
        statuses["E1"] = (
            FAILS,
            f"needs p in ({lo_w}, {hi_w:.6g}) with f(1) < p/(2p-1); p={p}",
        )
    lo_w2, hi_w2 = 0.5 - 1.0 / (2.0 * k), 0.5
    if lo_w2 < p < hi_w2 and statuses["A2"][0] == HOLDS:
        statuses["E2"] = (HOLDS, f"p={p} in ({lo_w2:.6g}, {hi_w2}) and f(0) < (1-p)/(1-2p)")
    else:
        statuses["E2"] = (
            FAILS,
            f"needs p in ({lo_w2:.6g}, {hi_w2}) with f(0) < (1-p)/(1-2p); p={p}",
        )


def f_values_on_grid(spec, k: int) -> np.ndarray:
    from .reinforce import f_values

    return f_values(spec, np.arange(k + 1) / k)


def _g_conditions(statuses, spec, p) -> None:
    smooth1 = spec.continuity_class in (_reinforce.C1, _reinforce.C2)
    smooth2 = spec.continuity_class == _reinforce.C2
    if not smooth1:
        statuses["G1"] = (FAILS, f"f is {spec.continuity_class}, not C1")
    elif p > 0.5 and spec.monotonicity == _reinforce.STRICTLY_DECREASING:
        statuses["G1"] = (HOLDS, "p > 1/2 and f strictly decreasing")
    elif p < 0.5 and spec.monotonicity == _reinforce.STRICTLY_INCREASING:
        statuses["G1"] = (HOLDS, "p < 1/2 and f strictly increasing")
    else:
        statuses["G1"] = (
            FAILS,
            f"monotonicity {spec.monotonicity!r} does not oppose p={p}",
        )
    if not smooth2:
        statuses["G2"] = (FAILS, f"f is {spec.continuity_class}, not C2")
    elif spec.convexity in (_reinforce.STRICTLY_CONVEX, _reinforce.STRICTLY_CONCAVE):
        statuses["G2"] = (HOLDS, f"f is {spec.convexity.replace('_', ' ')}")
    else:
        statuses["G2"] = (FAILS, f"convexity tag is {spec.convexity!r}")
    lip = spec.lipschitz_constant
    if lip is None and spec.holder is not None and spec.holder[0] == 1.0:
        lip = spec.holder[1]
    if spec.continuity_class == _reinforce.DISCONTINUOUS:
        statuses["G3"] = (FAILS, "a discontinuous f is not Lipschitz")
    elif lip is None:
        statuses["G3"] = (UNKNOWN, "no Lipschitz constant declared")
    else:
        prod = lip * abs(2.0 * p - 1.0)
        statuses["G3"] = (
            HOLDS if prod < 1.0 else FAILS,
            f"c |2p-1| = {prod:.6g} {'<' if prod < 1.0 else '>='} 1",
        )


# --- series criteria ---------------------------------------------------------

_HEURISTIC_N = 10**6
_DECADES = (10**3, 10**4, 10**5, 10**6)


def _series_conditions(statuses, model, tau: float | None) -> None:
    spec = model.spec
    sched = model.schedule
    kind = sched.kind
    cls = spec.continuity_class
    smooth1 = cls in (_reinforce.C1, _reinforce.C2)
    smooth2 = cls == _reinforce.C2
    affine_f = spec.convexity == _reinforce.AFFINE
    alpha_f = None
    if spec.holder is not None:
        alpha_f = spec.holder[0]
    elif spec.lipschitz_constant is not None:
        alpha_f = 1.0
    has_modulus = (
        spec.modulus_bound is not None
        or spec.holder is not None
        or spec.lipschitz_constant is not None
    )
    f_is_constant = spec.monotonicity == _reinforce.MONO_CONSTANT

    if kind == "power":
        a = sched.alpha
        # F1: continuity plus summable modulus decay; any declared decay rate
        # beats the n^{-1-a*beta} threshold for a > 0
        if cls == _reinforce.DISCONTINUOUS:
            statuses["F1"] = (FAILS, "f is not continuous")
        elif smooth1 or has_modulus:
            statuses["F1"] = (
                HOLDS,
                f"power schedule (alpha={a}): modulus decay makes the series Sum n^(-1-a*beta) converge",
            )
        else:
            statuses["F1"] = (UNKNOWN, "continuous f without modulus decay metadata")
        if alpha_f is not None:
            statuses["F2"] = (
                HOLDS,
                f"Hoelder exponent {alpha_f}: Sum (n+1)^-1 k(n)^(-{alpha_f}/2) converges for alpha={a} > 0",
            )
        else:
            statuses["F2"] = (UNKNOWN, "no Hoelder certificate declared")
        if smooth1:
            statuses["F3"] = (
                HOLDS,
                f"f in C1 and Sum (n+1)^-1 k(n)^(-1/2) omega(f', .) converges for alpha={a} > 0",
            )
        else:
            statuses["F3"] = (FAILS, f"f is {cls}, not C1")
        if smooth2:
            statuses["F4"] = (HOLDS, f"f in C2 and Sum n^(-1-{a}) converges")
        else:
            statuses["F4"] = (FAILS, f"f is {cls}, not C2")
    elif kind == "constant":
        k = sched.k
        # constant k: the series have constant positive terms unless the
        # relevant modulus vanishes identically, so divergence is provable
        if cls == _reinforce.DISCONTINUOUS:
            statuses["F1"] = (FAILS, "f is not continuous")
        elif f_is_constant:
            statuses["F1"] = (HOLDS, "f constant: modulus is identically zero")
        else:
            statuses["F1"] = (
                FAILS,
                f"constant k={k}: positive constant terms give a divergent harmonic series",
            )
        statuses["F2"] = (
            FAILS,
            f"constant k={k}: Sum (n+1)^-1 k^(-beta/2) diverges for every exponent",
        )
        if not smooth1:
            statuses["F3"] = (FAILS, f"f is {cls}, not C1")
        elif affine_f:
            statuses["F3"] = (HOLDS, "f affine: omega(f', .) is identically zero")
        else:
            statuses["F3"] = (FAILS, f"constant k={k}: positive constant terms diverge")
        if not smooth2:
            statuses["F4"] = (FAILS, f"f is {cls}, not C2")
        else:
            statuses["F4"] = (FAILS, f"constant k={k}: Sum (n+1)^-1 k^-1 diverges")
    else:
        # log / table schedules: partial-sum trend heuristic, never Holds
        if cls == _reinforce.DISCONTINUOUS:
            statuses["F1"] = (FAILS, "f is not continuous")
        elif f_is_constant:
            statuses["F1"] = (HOLDS, "f constant: modulus is identically zero")
        elif alpha_f is not None:
            # trend of the bound series (n+1)^-1 k(n)^(-alpha_f/2); the
            # Hoelder constant scales every term and cannot change the verdict
            statuses["F1"] = _trend_series(
                model, lambda n, kn: (n + 1.0) ** -1 * kn ** (-alpha_f / 2.0)
            )
        else:
            statuses["F1"] = (UNKNOWN, "no modulus decay metadata for the heuristic")
        if alpha_f is not None:
            statuses["F2"] = _trend_series(
                model, lambda n, kn: (n + 1.0) ** -1 * kn ** (-alpha_f / 2.0)
            )
        else:
            statuses["F2"] = (UNKNOWN, "no Hoelder certificate declared")
        if not smooth1:
            statuses["F3"] = (FAILS, f"f is {cls}, not C1")
        elif affine_f:
            statuses["F3"] = (HOLDS, "f affine: omega(f', .) is identically zero")
        else:
            statuses["F3"] = _trend_series(
                model, lambda n, kn: (n + 1.0) ** -1 * kn ** -1.0
            )
        if not smooth2:
            statuses["F4"] = (FAILS, f"f is {cls}, not C2")
        else:
            statuses["F4"] = _trend_series(
                model, lambda n, kn: (n + 1.0) ** -1 * kn ** -1.0
            )

    _s_conditions(statuses, model, tau)

    statuses["S8"] = (
        HOLDS,
        "k(n) >= 1 dominates the series by Sum (n+1)^-2, which converges (unconditional)",
    )

    # corollary rule for k(n) = Theta(n^alpha) schedules
    if kind == "power":
        a = sched.alpha
        if tau is None:
            statuses["Cor1"] = (UNKNOWN, "tau unavailable (no unique fixed point)")
        elif tau > 0.5:
            ok = a > 0.5
            statuses["Cor1"] = (
                HOLDS if ok else FAILS,
                f"tau={tau:.6g} > 1/2 requires alpha > 1/2; alpha={a}",
            )
        else:
            ok = a > tau
            statuses["Cor1"] = (
                HOLDS if ok else FAILS,
                f"tau={tau:.6g} <= 1/2 requires alpha > tau; alpha={a}",
            )
    elif kind == "constant":
        statuses["Cor1"] = (FAILS, "constant schedule is Theta(n^0); no alpha > 0 applies")
    elif kind == "log":
        statuses["Cor1"] = (FAILS, "k(n) = Theta(ln n) is not Theta(n^alpha) for any alpha > 0")
    else:
        statuses["Cor1"] = (UNKNOWN, "table schedule growth is unclassified")


def _s_conditions(statuses, model, tau: float | None) -> None:
    sched = model.schedule
    kind = sched.kind
    if kind == "power":
        a = sched.alpha
        if tau is None:
            statuses["S5"] = (UNKNOWN, "tau unavailable (no unique fixed point)")
            statuses["S7"] = (UNKNOWN, "tau unavailable (no unique fixed point)")
        else:
            # analytic rule for Theta(n^alpha) schedules (the stated double
            # series is decided through the corollary's alpha > tau rule)
            ok5 = a > tau
            statuses["S5"] = (
                HOLDS if ok5 else FAILS,
                f"power schedule rule: requires alpha > tau; alpha={a}, tau={tau:.6g}",
            )
            ok7 = tau > 0.5 and a > 0.5
            statuses["S7"] = (
                HOLDS if ok7 else FAILS,
                f"n^(1/2-tau) Sum (i+1)^(tau-1) k(i)^-1 -> 0 iff tau > 1/2 and alpha > 1/2; "
                f"alpha={a}, tau={tau:.6g}",
            )
        ok6 = a > 0.5
        statuses["S6"] = (
            HOLDS if ok6 else FAILS,
            f"(ln n)^(-1/2) Sum (i+1)^(-1/2) k(i)^-1 -> 0 iff alpha > 1/2; alpha={a}",
        )
    elif kind == "constant":
        k = sched.k
        statuses["S5"] = (FAILS, f"constant k={k}: Sum (i+1)^(tau-1) k^-1 diverges for tau > 0")
        statuses["S6"] = (
            FAILS,
            f"constant k={k}: partial sums grow like sqrt(n), not o(sqrt(ln n))",
        )
        statuses["S7"] = (
            FAILS,
            f"constant k={k}: n^(1/2-tau) Sum (i+1)^(tau-1) k^-1 grows like sqrt(n)",
        )
    else:
        if tau is None:
            statuses["S5"] = (UNKNOWN, "tau unavailable (no unique fixed point)")
            statuses["S7"] = (UNKNOWN, "tau unavailable (no unique fixed point)")
        else:
            statuses["S5"] = _trend_double_series(model, tau)
            statuses["S7"] = _trend_normalized(
                model,
                lambda n, kn: (n + 1.0) ** (tau - 1.0) / kn,
                lambda n: n ** (0.5 - tau),
            )
        statuses["S6"] = _trend_normalized(
            model,
            lambda n, kn: (n + 1.0) ** -0.5 / kn,
            lambda n: (math.log(n)) ** -0.5,
        )


def _schedule_values(model, nmax: int) -> np.ndarray:
    sched = model.schedule
    n = np.arange(1, nmax + 1, dtype=float)
    if sched.kind == "power":
        kn = np.ceil(sched.c * n**sched.alpha - 1e-9)
    elif sched.kind == "log":
        kn = np.ceil(sched.c * np.log(n) - 1e-9)
    elif sched.kind == "table":
        vals = np.asarray(sched.values, dtype=float)
        reps = int(math.ceil(nmax / len(vals)))
        kn = np.tile(vals, reps)[:nmax]  # heuristic extension past the table
    else:
        kn = np.full(nmax, float(sched.k))
    return np.clip(kn, 1.0, n)


def _decade_trend(partial_sums: np.ndarray) -> tuple[str, str]:
    """Classify a series from its decade increments: Fails on divergence, else Unknown."""
    d = np.array(
        [partial_sums[b - 1] - partial_sums[a - 1] for a, b in zip(_DECADES[:-1], _DECADES[1:])]
    )
    if not np.all(np.isfinite(d)):
        return (UNKNOWN, "heuristic increments not finite")
    if np.any(d <= 0.0):
        return (UNKNOWN, "heuristic increments vanished; nothing to extrapolate")
    ratios = d[1:] / d[:-1]
    if np.all(ratios >= 0.95):
        return (
            FAILS,
            f"partial sums to 1e6 show a divergence trend (decade ratios {np.round(ratios, 3).tolist()})",
        )
    return (
        UNKNOWN,
        f"partial sums to 1e6 are inconclusive (decade ratios {np.round(ratios, 3).tolist()}); "
        "a convergence claim from finitely many terms is unsound",
    )


def _trend_series(model, term) -> tuple[str, str]:
    """Partial-sum heuristic for a single series with terms term(n, k(n))."""
    kn = _schedule_values(model, _HEURISTIC_N)
    n = np.arange(1, _HEURISTIC_N + 1, dtype=float)
    t = term(n, kn)
    if not np.all(np.isfinite(t)):
        return (UNKNOWN, "heuristic terms not finite")
    return _decade_trend(np.cumsum(t))


def _trend_double_series(model, tau: float) -> tuple[str, str]:
    """Heuristic for the paired tau < 1/2 criteria: both the series
    Sum (i+1)^(tau-1) k(i)^-1 and Sum (i+1)^(tau-1) Sum_{t<i} (t+1)^-1 k(t)^-1
    must look convergent; a divergence trend in either fails the pair."""
    kn = _schedule_values(model, _HEURISTIC_N)
    n = np.arange(1, _HEURISTIC_N + 1, dtype=float)
    w = (n + 1.0) ** (tau - 1.0)
    first = _decade_trend(np.cumsum(w / kn))
    inner = np.concatenate([[0.0], np.cumsum(1.0 / ((n + 1.0) * kn))[:-1]])
    second = _decade_trend(np.cumsum(w * inner))
    if FAILS in (first[0], second[0]):
        which = "first" if first[0] == FAILS else "second"
        detail = first[1] if first[0] == FAILS else second[1]
        return (FAILS, f"{which} series of the pair diverges: {detail}")
    return (UNKNOWN, f"pair inconclusive: {first[1]}")


def _trend_normalized(model, term, normalizer) -> tuple[str, str]:
    """Heuristic for 'normalized partial sums -> 0' criteria."""
    kn = _schedule_values(model, _HEURISTIC_N)
    n = np.arange(1, _HEURISTIC_N + 1, dtype=float)
    s = np.cumsum(term(n, kn))
    vals = np.array([normalizer(d) * s[d - 1] for d in _DECADES])
    if not np.all(np.isfinite(vals)):
        return (UNKNOWN, "heuristic values not finite")
    if vals[-1] > vals[0] * 1.05 and vals[-1] >= vals[-2]:
        return (
            FAILS,
            f"normalized partial sums increase ({np.round(vals, 4).tolist()}): no decay to 0",
        )
    return (
        UNKNOWN,
        f"normalized partial sums {np.round(vals, 4).tolist()} do not certify a limit of 0",
    )
