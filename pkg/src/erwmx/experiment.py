"""Parallel Monte Carlo harness for the limit theorems.

Runs R replicates on independent substreams, records S_n at geometric
checkpoints, and tests the predicted limits: law-of-large-numbers targets
(tolerances derived from the exact oracle, scaled to the horizon when it
exceeds the DP budget), Kolmogorov-Smirnov normality of the regime-scaled
statistic, and superdiffusive almost-sure stabilization of W_n = n^tau
(S_n/n - centering).  Identical plans produce bit-identical results
regardless of the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analysis import Regime, RegimeReport, predicted_clt
from .errors import DegenerateError, PlanError, RegimeError
from .oracle import DP_BUDGET, exact_moments
from .walk import COLLAPSED, ModelConfig, Trajectory, simulate

KS_MIN_SAMPLES = 100


def dyadic_checkpoints(horizon: int) -> list[int]:
    """{2^j : 2^j <= horizon} plus the horizon itself."""
    cps = []
    v = 1
    while v <= horizon:
        cps.append(v)
        v *= 2
    if cps[-1] != horizon:
        cps.append(horizon)
    return cps


@dataclass(frozen=True)
class ExperimentPlan:
    model: ModelConfig
    replicates: int
    horizon: int
    master_seed: int
    checkpoints: tuple[int, ...] | None = None
    alpha: float = 0.01
    workers: int | None = None
    mode: str = COLLAPSED
    allow_indeterminate: bool = False

    def __post_init__(self):
        if self.replicates < KS_MIN_SAMPLES:
            raise PlanError(
                f"statistical verdicts need at least {KS_MIN_SAMPLES} replicates, got {self.replicates}"
            )
        if self.horizon < 1:
            raise PlanError(f"horizon must be >= 1, got {self.horizon}")
        if not (0.0 < self.alpha < 1.0):
            raise PlanError(f"significance alpha must lie in (0,1), got {self.alpha}")
        cps = self.resolved_checkpoints()
        if cps != sorted(set(cps)) or cps[0] < 1 or cps[-1] > self.horizon:
            raise PlanError(f"checkpoints must be sorted, unique, within [1, horizon]; got {cps}")

    def resolved_checkpoints(self) -> list[int]:
        if self.checkpoints is None:
            return dyadic_checkpoints(self.horizon)
        return [int(c) for c in self.checkpoints]


@dataclass(frozen=True)
class KsResult:
    statistic: float
    scaled: float  # sqrt(R) * D
    threshold: float  # K_alpha = sqrt(-ln(alpha/2) / 2)
    alpha: float
    mu: float
    sigma2: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "scaled": self.scaled,
            "threshold": self.threshold,
            "alpha": self.alpha,
            "mu": self.mu,
            "sigma2": self.sigma2,
            "passed": self.passed,
        }


def ks_test_normal(samples, mu: float, sigma2: float, alpha: float) -> KsResult:
    """One-sample Kolmogorov-Smirnov test against Normal(mu, sigma2).

    Accepts iff sqrt(R) D <= K_alpha with K_alpha = sqrt(-ln(alpha/2)/2)
    (the asymptotic Kolmogorov quantile).
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    if n < KS_MIN_SAMPLES:
        raise PlanError(f"KS test needs at least {KS_MIN_SAMPLES} samples, got {n}")
    if sigma2 <= 0.0:
        raise DegenerateError(f"KS reference variance must be positive, got {sigma2}")
    sigma = math.sqrt(sigma2)
    z = (x - mu) / (sigma * math.sqrt(2.0))
    cdf = 0.5 * (1.0 + np.array([math.erf(v) for v in z]))
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf)
    d_minus = np.max(cdf - (i - 1) / n)
    d = float(max(d_plus, d_minus))
    k_alpha = math.sqrt(-math.log(alpha / 2.0) / 2.0)
    scaled = math.sqrt(n) * d
    return KsResult(d, scaled, k_alpha, alpha, mu, sigma2, scaled <= k_alpha)


@dataclass(frozen=True)
class StabilizationTable:
    """Dyadic stabilization diagnostics of W_n = n^tau (S_n/n - centering)."""

    ns: tuple[int, ...]
    mean_abs_increment: tuple[float, ...]  # mean_r |W(next) - W(this)|, length len(ns)-1
    var_w: tuple[float, ...]  # across-replicate variance at each checkpoint

    def decreasing_tail(self, count: int = 3) -> bool:
        """Strictly decreasing mean increments over the last ``count`` dyads."""
        tail = self.mean_abs_increment[-count:]
        return len(tail) == count and all(b < a for a, b in zip(tail, tail[1:]))

    def to_json_dict(self) -> dict:
        return {
            "ns": list(self.ns),
            "mean_abs_increment": list(self.mean_abs_increment),
            "var_w": list(self.var_w),
        }


def superdiffusive_stability(
    trajectories: list[Trajectory], tau: float, centering: float
) -> StabilizationTable:
    """Per-dyad mean |W_{next} - W_{this}| and across-replicate variance of W."""
    if tau >= 0.5:
        raise RegimeError(f"stabilization analysis requires tau < 1/2, got {tau}")
    ns = trajectories[0].ns
    if any(t.ns != ns for t in trajectories):
        raise PlanError("all trajectories must share the checkpoint grid")
    s = np.array([t.ss for t in trajectories], dtype=float)
    narr = np.asarray(ns, dtype=float)
    w = narr**tau * (s / narr - centering)
    incr = np.mean(np.abs(np.diff(w, axis=1)), axis=0)
    var_w = np.var(w, axis=0, ddof=1)
    return StabilizationTable(tuple(ns), tuple(map(float, incr)), tuple(map(float, var_w)))


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    variance: float
    skewness: float
    kurtosis_excess: float
    se_mean: float
    se_variance: float
    se_skewness: float
    se_kurtosis: float
    flags: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        def clean(v):
            return None if (isinstance(v, float) and not math.isfinite(v)) else v

        return {
            "mean": clean(self.mean),
            "variance": clean(self.variance),
            "skewness": clean(self.skewness),
            "kurtosis_excess": clean(self.kurtosis_excess),
            "se_mean": clean(self.se_mean),
            "se_variance": clean(self.se_variance),
            "se_skewness": clean(self.se_skewness),
            "se_kurtosis": clean(self.se_kurtosis),
            "flags": list(self.flags),
        }


def moment_summary(samples) -> MomentSummary:
    """Mean, unbiased variance, moment skewness/excess kurtosis, jackknife SEs."""
    x = np.asarray(samples, dtype=float)
    n = len(x)
    if n < KS_MIN_SAMPLES:
        raise PlanError(f"moment summary needs at least {KS_MIN_SAMPLES} samples, got {n}")
    flags: list[str] = []
    mean = float(np.mean(x))
    m2 = float(np.mean((x - mean) ** 2))
    variance = m2 * n / (n - 1)
    if m2 <= 0.0:
        flags.append("degenerate: zero variance; skewness and kurtosis undefined")
        return MomentSummary(mean, 0.0, math.nan, math.nan, 0.0, 0.0, math.nan, math.nan, tuple(flags))
    m3 = float(np.mean((x - mean) ** 3))
    m4 = float(np.mean((x - mean) ** 4))
    skew = m3 / m2**1.5
    kurt = m4 / m2**2 - 3.0

    # delete-one jackknife through power sums
    s1, s2, s3, s4 = (float(np.sum(x**j)) for j in range(1, 5))
    n1 = n - 1
    s1d = s1 - x
    s2d = s2 - x**2
    s3d = s3 - x**3
    s4d = s4 - x**4
    mu_i = s1d / n1
    m2_i = s2d / n1 - mu_i**2
    m3_i = s3d / n1 - 3.0 * mu_i * s2d / n1 + 2.0 * mu_i**3
    m4_i = s4d / n1 - 4.0 * mu_i * s3d / n1 + 6.0 * mu_i**2 * s2d / n1 - 3.0 * mu_i**4
    var_i = m2_i * n1 / (n1 - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        skew_i = m3_i / m2_i**1.5
        kurt_i = m4_i / m2_i**2 - 3.0

    def se(theta_i: np.ndarray) -> float:
        if not np.all(np.isfinite(theta_i)):
            return math.nan
        return float(math.sqrt((n - 1) / n * np.sum((theta_i - np.mean(theta_i)) ** 2)))

    return MomentSummary(
        mean, variance, skew, kurt, se(mu_i), se(var_i), se(skew_i), se(kurt_i), tuple(flags)
    )


# ---------------------------------------------------------------------------
# the harness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckpointStat:
    n: int
    mean_s_over_n: float
    var_s_over_n: float
    mean_w: float
    var_w: float
    mean_z: float | None = None  # z = W / sqrt(predicted variance)
    var_z: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "mean_s_over_n": self.mean_s_over_n,
            "var_s_over_n": self.var_s_over_n,
            "mean_w": self.mean_w,
            "var_w": self.var_w,
            "mean_z": self.mean_z,
            "var_z": self.var_z,
        }


@dataclass(frozen=True)
class ExperimentResult:
    plan_echo: dict
    regime_report: RegimeReport
    checkpoint_ns: tuple[int, ...]
    samples: np.ndarray = field(repr=False)  # (R, n_checkpoints) S values
    checkpoint_stats: tuple[CheckpointStat, ...]
    final_w: np.ndarray = field(repr=False)
    ks: KsResult | None
    stabilization: StabilizationTable | None
    moments: MomentSummary
    lln: dict | None
    verdicts: dict[str, bool]
    warnings: tuple[str, ...] = ()

    def all_pass(self) -> bool:
        return all(self.verdicts.values())

    def to_json_dict(self) -> dict:
        return {
            "plan": self.plan_echo,
            "regime_report": self.regime_report.to_json_dict(),
            "checkpoints": [cs.to_json_dict() for cs in self.checkpoint_stats],
            "ks": self.ks.to_json_dict() if self.ks else None,
            "stabilization": self.stabilization.to_json_dict() if self.stabilization else None,
            "moments": self.moments.to_json_dict(),
            "lln": self.lln,
            "verdicts": self.verdicts,
            "warnings": list(self.warnings),
        }


def resolve_workers(plan_workers: int | None) -> int:
    env = os.environ.get("ERW_THREADS")
    if env:
        return max(1, int(env))
    if plan_workers:
        return max(1, plan_workers)
    return os.cpu_count() or 1


def _scaling_factor(regime: Regime, tau: float | None, n: np.ndarray) -> np.ndarray:
    if regime is Regime.DIFFUSIVE:
        return np.sqrt(n)
    if regime is Regime.CRITICAL:
        return np.sqrt(n / np.log(np.maximum(n, 2)))
    if regime is Regime.SUPERDIFFUSIVE:
        return n**tau
    return np.ones_like(n)


def oracle_sd(model: ModelConfig, horizon: int, regime: Regime, tau: float | None) -> tuple[float, str]:
    """SD of S_N/N from the exact oracle, scaled past the DP budget by the regime rate."""
    n0 = min(horizon, DP_BUDGET)
    _, var0 = exact_moments(model, n0)
    if n0 == horizon:
        return math.sqrt(var0), "oracle"
    ratio = n0 / horizon
    if regime is Regime.CRITICAL:
        var = var0 * ratio * (math.log(horizon) / math.log(n0))
    elif regime is Regime.SUPERDIFFUSIVE and tau is not None:
        var = var0 * ratio ** (2.0 * tau)
    else:
        var = var0 * ratio
    return math.sqrt(var), f"oracle (variance scaled from n={n0} by the {regime.value} rate)"


def run_experiment(plan: ExperimentPlan) -> ExperimentResult:
    """Simulate the plan and test the regime's predicted limits."""
    report = predicted_clt(plan.model, allow_indeterminate=plan.allow_indeterminate)
    cps = plan.resolved_checkpoints()
    warnings = list(report.warnings)

    workers = resolve_workers(plan.workers)

    def one(r: int) -> Trajectory:
        return simulate(
            plan.model,
            plan.horizon,
            plan.master_seed,
            mode=plan.mode,
            checkpoints=cps,
            replicate_id=r,
        )

    replicate_ids = range(1, plan.replicates + 1)
    if workers == 1:
        trajectories = [one(r) for r in replicate_ids]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trajectories = list(pool.map(one, replicate_ids))
    # deterministic aggregation order by construction: index r is the substream id
    samples = np.array([t.ss for t in trajectories], dtype=np.int64)

    narr = np.asarray(cps, dtype=float)
    regime = report.regime
    tau = report.tau
    centering = report.centering if report.centering is not None else 0.0
    scale = _scaling_factor(regime, tau, narr)
    w = scale[None, :] * (samples / narr[None, :] - centering)
    sigma = math.sqrt(report.predicted_variance) if report.predicted_variance else None
    stats = tuple(
        CheckpointStat(
            n=int(cps[j]),
            mean_s_over_n=float(np.mean(samples[:, j] / cps[j])),
            var_s_over_n=float(np.var(samples[:, j] / cps[j], ddof=1)),
            mean_w=float(np.mean(w[:, j])),
            var_w=float(np.var(w[:, j], ddof=1)),
            mean_z=float(np.mean(w[:, j]) / sigma) if sigma else None,
            var_z=float(np.var(w[:, j], ddof=1) / report.predicted_variance) if sigma else None,
        )
        for j in range(len(cps))
    )
    final_w = w[:, -1]
    moments = moment_summary(final_w)

    verdicts: dict[str, bool] = {}
    ks = None
    stab = None
    lln = None
    if regime is Regime.INDETERMINATE:
        warnings.append("indeterminate regime: no statistical verdicts computed")
    else:
        sd, provenance = oracle_sd(plan.model, plan.horizon, regime, tau)
        tol = 4.0 * sd / math.sqrt(plan.replicates)
        mean_final = float(np.mean(samples[:, -1] / plan.horizon))
        lln = {
            "mean": mean_final,
            "target": float(report.centering),
            "tolerance": tol,
            "tolerance_provenance": provenance,
            "passed": bool(abs(mean_final - report.centering) <= tol),
        }
        verdicts["lln"] = bool(lln["passed"])
        if regime in (Regime.DIFFUSIVE, Regime.CRITICAL):
            if regime is Regime.DIFFUSIVE and tau is not None and tau < 0.6:
                warnings.append(
                    f"tau={tau:.4g} in (1/2, 0.6): diffusive convergence is slow; "
                    "the finite-n CLT test carries a bias at this horizon"
                )
            ks = ks_test_normal(final_w, 0.0, report.predicted_variance, plan.alpha)
            verdicts["clt_ks"] = ks.passed
        else:
            stab = superdiffusive_stability(trajectories, tau, centering)
            verdicts["stabilization_decreasing"] = stab.decreasing_tail(3)
            if len(stab.var_w) >= 2 and stab.var_w[-2] > 0:
                change = abs(stab.var_w[-1] - stab.var_w[-2]) / stab.var_w[-2]
                verdicts["w_variance_stable"] = bool(change < 0.2)

    plan_echo = {
        "master_seed": plan.master_seed,
        "replicates": plan.replicates,
        "horizon": plan.horizon,
        "checkpoints": cps,
        "alpha": plan.alpha,
        "mode": plan.mode,
    }
    return ExperimentResult(
        plan_echo=plan_echo,
        regime_report=report,
        checkpoint_ns=tuple(cps),
        samples=samples,
        checkpoint_stats=stats,
        final_w=final_w,
        ks=ks,
        stabilization=stab,
        moments=moments,
        lln=lln,
        verdicts=verdicts,
        warnings=tuple(warnings),
    )
