"""Exact finite-n distribution of S_n by dynamic programming on the plus-count.

The step law depends on the past only through the plus-count m (S_n = 2m - n),
so the forward recursion P_{n+1}(m) = P_n(m-1) up(n, m-1) + P_n(m) down(n, m)
is exact.  Serves as ground truth for Monte Carlo and transition-law tests.
O(n^2 k) cost; budget n_max <= 2000 (n_max <= 30 in exact-rational mode).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from .drift import SamplingMode, _g_grid, binom_row
from .errors import BudgetError, DomainError
from .reinforce import evaluate_f
from .walk import ModelConfig, k_schedule_eval, step_probability

DP_BUDGET = 2000
RATIONAL_BUDGET = 30


@dataclass(frozen=True)
class ExactPmf:
    """Law of the plus-count m = 0..n (equivalently S = 2m - n) after n steps."""

    n: int
    probs: np.ndarray  # float probabilities, index m
    exact: tuple[Fraction, ...] | None = None  # rational mode only

    def s_values(self) -> np.ndarray:
        return 2 * np.arange(self.n + 1) - self.n

    def prob_of_s(self, s: int) -> float:
        if (s + self.n) % 2 != 0 or abs(s) > self.n:
            return 0.0
        return float(self.probs[(s + self.n) // 2])

    def mean_s_over_n(self) -> float:
        return float(np.dot(self.probs, self.s_values())) / self.n

    def var_s_over_n(self) -> float:
        x = self.s_values() / self.n
        mu = float(np.dot(self.probs, x))
        return float(np.dot(self.probs, (x - mu) ** 2))


def transition_row(model: ModelConfig, n: int, plus_count: int) -> tuple[float, float]:
    """(prob_up, prob_down) from the state (n, plus_count)."""
    up = step_probability(model, n, plus_count)
    return up, 1.0 - up


def exact_distribution(
    model: ModelConfig, n_max: int, rational: bool = False
) -> list[ExactPmf]:
    """Laws of S_n for n = warm-up .. n_max (inclusive)."""
    if rational:
        return _exact_distribution_rational(model, n_max)
    if n_max > DP_BUDGET:
        raise BudgetError(f"DP budget is n_max <= {DP_BUDGET}, got {n_max}")
    w = model.warmup()
    if n_max < w:
        raise DomainError(f"n_max={n_max} precedes the warm-up ({w})")
    ctx = model.drift_context()
    without = model.sampling_mode is SamplingMode.WITHOUT_REPLACEMENT
    probs = _init_row(w, model.q)
    out = [ExactPmf(w, probs.copy())]
    lf = gammaln(np.arange(n_max + 2) + 1.0)  # lf[j] = log j!
    for n in range(w, n_max):
        k = k_schedule_eval(model.schedule, n)
        g = _g_grid(ctx, k)
        up = _up_vector(n, k, g, without, lf)
        nxt = np.zeros(n + 2)
        nxt[: n + 1] += probs * (1.0 - up)
        nxt[1 : n + 2] += probs * up
        probs = nxt
        out.append(ExactPmf(n + 1, probs.copy()))
    return out


def _init_row(w: int, q: float) -> np.ndarray:
    if w == 1:
        return np.array([1.0 - q, q])
    return binom_row(w, q)


def _up_vector(n: int, k: int, g: np.ndarray, without: bool, lf: np.ndarray) -> np.ndarray:
    """P[X_{n+1} = +1 | m] for all m = 0..n, vectorised."""
    m = np.arange(n + 1)
    if not without:
        y = m / n
        rows = _binom_rows(k, y)
        return rows @ g
    i = np.arange(k + 1)
    mi = m[:, None]
    ii = i[None, :]
    valid = (ii <= mi) & (k - ii <= n - mi)
    lg = np.where(
        valid,
        _lch(lf, mi, ii) + _lch(lf, n - mi, k - ii) - _lch(lf, n, k),
        -np.inf,
    )
    rows = np.exp(lg)
    return rows @ g


def _lch(lf: np.ndarray, a, b):
    return lf[a] - lf[b] - lf[a - b]


def _binom_rows(k: int, y: np.ndarray) -> np.ndarray:
    """Binomial(k, y_m) pmf rows for a vector of success probabilities."""
    i = np.arange(k + 1)
    logc = gammaln(k + 1) - gammaln(i + 1) - gammaln(k - i + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = logc[None, :] + i[None, :] * np.log(y[:, None]) + (k - i)[None, :] * np.log1p(
            -y[:, None]
        )
        rows = np.exp(lg)
    rows[y == 0.0] = 0.0
    rows[y == 0.0, 0] = 1.0
    rows[y == 1.0] = 0.0
    rows[y == 1.0, k] = 1.0
    return rows


def _exact_distribution_rational(model: ModelConfig, n_max: int) -> list[ExactPmf]:
    """Bit-exact DP with Fraction arithmetic (p, q, f-grid values taken exactly
    from their binary floats); n_max <= 30."""
    if n_max > RATIONAL_BUDGET:
        raise BudgetError(f"rational mode budget is n_max <= {RATIONAL_BUDGET}, got {n_max}")
    w = model.warmup()
    if n_max < w:
        raise DomainError(f"n_max={n_max} precedes the warm-up ({w})")
    p = Fraction(model.p)
    q = Fraction(model.q)
    without = model.sampling_mode is SamplingMode.WITHOUT_REPLACEMENT
    if w == 1:
        row = [1 - q, q]
    else:
        row = [Fraction(math.comb(w, m)) * q**m * (1 - q) ** (w - m) for m in range(w + 1)]
    out = [_wrap_rational(w, row)]
    for n in range(w, n_max):
        k = k_schedule_eval(model.schedule, n)
        gfrac = [
            p * Fraction(evaluate_f(model.spec, i / k))
            + (1 - p) * (1 - Fraction(evaluate_f(model.spec, i / k)))
            for i in range(k + 1)
        ]
        nxt = [Fraction(0)] * (n + 2)
        for m, pm in enumerate(row):
            if pm == 0:
                continue
            up = _up_rational(n, m, k, gfrac, without)
            nxt[m] += pm * (1 - up)
            nxt[m + 1] += pm * up
        row = nxt
        out.append(_wrap_rational(n + 1, row))
    return out


def _up_rational(n: int, m: int, k: int, gfrac, without: bool) -> Fraction:
    total = Fraction(0)
    if without:
        denom = math.comb(n, k)
        lo = max(0, k - (n - m))
        hi = min(k, m)
        for i in range(lo, hi + 1):
            total += gfrac[i] * Fraction(math.comb(m, i) * math.comb(n - m, k - i), denom)
    else:
        y = Fraction(m, n)
        for i in range(k + 1):
            total += gfrac[i] * Fraction(math.comb(k, i)) * y**i * (1 - y) ** (k - i)
    return total


def _wrap_rational(n: int, row) -> ExactPmf:
    return ExactPmf(n, np.array([float(v) for v in row]), exact=tuple(row))


def exact_moments(model: ModelConfig, n: int) -> tuple[float, float]:
    """(mean, variance) of S_n/n from the exact law."""
    pmf = exact_distribution(model, n)[-1]
    return pmf.mean_s_over_n(), pmf.var_s_over_n()


def write_pmf_csv(pmfs: list[ExactPmf], path) -> None:
    """Export columns n, s, prob for every law in the list."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "s", "prob"])
        for pmf in pmfs:
            for m, pr in enumerate(pmf.probs):
                writer.writerow([pmf.n, 2 * m - pmf.n, repr(float(pr))])
