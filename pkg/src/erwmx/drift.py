"""Mean-field drift functions and the underlying probability kernels.

Implements the exact evaluation chain used everywhere else in the package:

* g(x)   = p f(x) + (1-p)(1-f(x)), the one-step conformity propensity;
* H(x)   = 2 sum_i g(i/k) Binom(k, (1+x)/2)(i) - 1, the conditional mean step
  for a size-k sample drawn with replacement (the same routine evaluates the
  growing-sample drift by passing k = k(n));
* H'(x), H''(x) in closed form through lower-order binomial kernels;
* the polynomial coefficients of h(x) = H(x) - x (cross-check tool, k <= 30);
* hhat(x) = 2 g((1+x)/2) - x - 1, the growing-sample drift limit;
* F_n(x), the without-replacement drift built from generalized binomial
  coefficients with sign-tracked log-magnitude products.

Binomial kernels use a mode-anchored multiplicative recurrence for k <= 64 and
log-gamma above; signed sums are accumulated with exact (Shewchuk) summation
via math.fsum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import DegreeError, DomainError, NumericalError, RangeError
from .reinforce import ReinforcementSpec, f_values

_RECURRENCE_MAX_K = 64  # direct multiplicative recurrence below, log-gamma above
_FSUM_MAX_K = 10_000  # exact summation below, pairwise numpy summation above
_CLAMP_BAND = 1e-9  # |value| may exceed 1 by at most this before NumericalError


class SamplingMode(str, enum.Enum):
    WITH_REPLACEMENT = "with"
    WITHOUT_REPLACEMENT = "without"


@dataclass(frozen=True)
class DriftContext:
    """Immutable bundle (f, p, sampling mode) consumed by every drift evaluation.

    Validates that p is an admissible memory parameter and that the induced
    g stays in [0,1] on the reinforcement function's validation grid (the probability
    constraint, which extended-range reinforcement functions must still meet).
    """

    spec: ReinforcementSpec
    p: float
    sampling_mode: SamplingMode = SamplingMode.WITH_REPLACEMENT
    allow_half: bool = False

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise DomainError(f"memory parameter p must lie in (0,1); got {self.p}")
        if self.p == 0.5 and not self.allow_half:
            raise DomainError(
                "p = 1/2 reduces the walk to a simple symmetric random walk and is "
                "excluded; pass allow_half=True to override"
            )
        grid = self.spec.validation_grid()
        g = g_values(self, grid)
        if g.min() < -1e-12 or g.max() > 1.0 + 1e-12:
            raise RangeError(
                f"g = p f + (1-p)(1-f) leaves [0,1] (range [{g.min():.6g}, {g.max():.6g}]); "
                "the step law is not a probability"
            )


def eval_g(ctx: DriftContext, x: float) -> float:
    """g(x) = p f(x) + (1-p)(1-f(x)); always within [min(p,1-p), max(p,1-p)] for f in [0,1]."""
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"g is defined on [0,1]; got x={x}")
    from .reinforce import evaluate_f

    fx = evaluate_f(ctx.spec, x)
    return ctx.p * fx + (1.0 - ctx.p) * (1.0 - fx)


def g_values(ctx: DriftContext, xs: np.ndarray) -> np.ndarray:
    fx = f_values(ctx.spec, xs)
    return ctx.p * fx + (1.0 - ctx.p) * (1.0 - fx)


@lru_cache(maxsize=128)
def _g_grid(ctx: DriftContext, k: int) -> np.ndarray:
    """g(i/k) for i = 0..k, cached per (context, k)."""
    vals = g_values(ctx, np.arange(k + 1) / k)
    vals.flags.writeable = False
    return vals


# ---------------------------------------------------------------------------
# binomial kernel
# ---------------------------------------------------------------------------


def binom_row(k: int, y: float) -> np.ndarray:
    """The full Binomial(k, y) pmf as an array indexed by i = 0..k."""
    if k < 1:
        raise DomainError(f"binomial kernel needs k >= 1, got {k}")
    if not (0.0 <= y <= 1.0):
        raise DomainError(f"binomial success probability must lie in [0,1]; got {y}")
    row = np.zeros(k + 1)
    if y == 0.0:
        row[0] = 1.0
        return row
    if y == 1.0:
        row[k] = 1.0
        return row
    if k <= _RECURRENCE_MAX_K:
        # mode-anchored multiplicative recurrence, normalised at the end:
        # stable for all y, no special-function calls
        m0 = min(int((k + 1) * y), k)
        u = np.zeros(k + 1)
        u[m0] = 1.0
        r = y / (1.0 - y)
        for i in range(m0, 0, -1):  # downward: pmf(i-1)/pmf(i) = i (1-y) / ((k-i+1) y)
            u[i - 1] = u[i] * i / ((k - i + 1) * r)
        for i in range(m0, k):  # upward: pmf(i+1)/pmf(i) = (k-i) y / ((i+1)(1-y))
            u[i + 1] = u[i] * (k - i) * r / (i + 1)
        return u / math.fsum(u)
    # log space anchored at the mode: the log-gamma anchor's absolute error is
    # common to every entry and cancels in the final normalisation
    m0 = min(int((k + 1) * y), k)
    i = np.arange(k + 1)
    anchor = (
        math.lgamma(k + 1)
        - math.lgamma(m0 + 1)
        - math.lgamma(k - m0 + 1)
        + m0 * math.log(y)
        + (k - m0) * math.log1p(-y)
    )
    lr = np.log((k - i[:-1]) / (i[:-1] + 1.0)) + (math.log(y) - math.log1p(-y))
    lp = np.empty(k + 1)
    lp[m0] = anchor
    if m0 < k:
        lp[m0 + 1 :] = anchor + np.cumsum(lr[m0:])
    if m0 > 0:
        lp[:m0] = anchor - np.cumsum(lr[:m0][::-1])[::-1]
    row = np.exp(lp)
    return row / row.sum()


def binom_pmf(k: int, y: float, i: int) -> float:
    """P[Binomial(k, y) = i]; consistent with binom_row by construction."""
    if not (0 <= i <= k):
        raise DomainError(f"binomial index i must lie in 0..k; got i={i}, k={k}")
    return float(binom_row(k, y)[i])


# ---------------------------------------------------------------------------
# hypergeometric kernel
# ---------------------------------------------------------------------------


def hypergeom_support(n: int, m: int, k: int) -> tuple[int, int]:
    """Inclusive support [i_lo, i_hi] of the Hypergeometric(n, m, k) law."""
    return max(0, k - (n - m)), min(k, m)


def hypergeom_row(n: int, m: int, k: int) -> np.ndarray:
    """Hypergeometric pmf over i = 0..k for drawing k of n items, m marked."""
    _check_hypergeom_args(n, m, k)
    lo, hi = hypergeom_support(n, m, k)
    row = np.zeros(k + 1)
    i = np.arange(lo, hi + 1)
    lg = (
        _lchoose(m, i)
        + _lchoose(n - m, k - i)
        - (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))
    )
    row[lo : hi + 1] = np.exp(lg)
    return row


def hypergeom_pmf(n: int, m: int, k: int, i: int) -> float:
    """P[Hypergeometric(n, m, k) = i]; zero outside the support."""
    _check_hypergeom_args(n, m, k)
    lo, hi = hypergeom_support(n, m, k)
    if i < lo or i > hi:
        return 0.0
    lg = (
        float(_lchoose(m, np.array([i]))[0])
        + float(_lchoose(n - m, np.array([k - i]))[0])
        - (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))
    )
    return math.exp(lg)


def _check_hypergeom_args(n: int, m: int, k: int) -> None:
    if n < 1:
        raise DomainError(f"population size must be >= 1, got {n}")
    if k > n:
        raise DomainError(f"sample size k={k} exceeds population n={n}")
    if k < 1:
        raise DomainError(f"sample size must be >= 1, got {k}")
    if not (0 <= m <= n):
        raise DomainError(f"marked count m={m} outside 0..{n}")


def _lchoose(a: int, i: np.ndarray) -> np.ndarray:
    return gammaln(a + 1) - gammaln(i + 1) - gammaln(a - i + 1)


# ---------------------------------------------------------------------------
# H and its derivatives
# ---------------------------------------------------------------------------


def _mix(weights: np.ndarray, row: np.ndarray) -> float:
    if len(row) <= _FSUM_MAX_K:
        return math.fsum(weights * row)
    return float(np.dot(weights, row))


def eval_H(ctx: DriftContext, k: int, x: float) -> float:
    """Conditional mean step 2 sum_i g(i/k) Binom(k,(1+x)/2)(i) - 1, bounded in [-1,1].

    Passing k = k(n) evaluates the growing-sample drift H_n at the same cost.
    """
    if not (-1.0 <= x <= 1.0):
        raise DomainError(f"H is defined on [-1,1]; got x={x}")
    row = binom_row(k, (1.0 + x) / 2.0)
    val = 2.0 * _mix(_g_grid(ctx, k), row) - 1.0
    return min(1.0, max(-1.0, val))


def eval_H_prime(ctx: DriftContext, k: int, x: float) -> float:
    """H'(x) = k (2p-1) sum_i {f((i+1)/k)-f(i/k)} Binom(k-1,(1+x)/2)(i); |H'| <= k|2p-1|."""
    if k < 1:
        raise DomainError(f"H' needs k >= 1, got {k}")
    if not (-1.0 <= x <= 1.0):
        raise DomainError(f"H' is defined on [-1,1]; got x={x}")
    df = np.diff(f_values(ctx.spec, np.arange(k + 1) / k))
    if k == 1:
        return (2.0 * ctx.p - 1.0) * float(df[0])
    row = binom_row(k - 1, (1.0 + x) / 2.0)
    return k * (2.0 * ctx.p - 1.0) * _mix(df, row)


def eval_H_second(ctx: DriftContext, k: int, x: float) -> float:
    """H''(x) = (2p-1) k(k-1)/2 sum_j {f((j+2)/k)-2f((j+1)/k)+f(j/k)} Binom(k-2,(1+x)/2)(j)."""
    if k < 2:
        raise DegreeError(f"H'' needs k >= 2, got {k}")
    if not (-1.0 <= x <= 1.0):
        raise DomainError(f"H'' is defined on [-1,1]; got x={x}")
    fk = f_values(ctx.spec, np.arange(k + 1) / k)
    d2 = fk[2:] - 2.0 * fk[1:-1] + fk[:-2]
    if k == 2:
        return (2.0 * ctx.p - 1.0) * float(d2[0])
    row = binom_row(k - 2, (1.0 + x) / 2.0)
    return (2.0 * ctx.p - 1.0) * (k * (k - 1) / 2.0) * _mix(d2, row)


# ---------------------------------------------------------------------------
# polynomial form of h(x) = H(x) - x
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialForm:
    """Power-basis coefficients a_0..a_k of h(x) = H(x) - x (cross-check tool).

    The power basis is catastrophically ill-conditioned for k beyond ~20, so
    this form is never the evaluation path; drift values always come from the
    probability kernels.
    """

    degree: int
    coefficients: tuple[float, ...]

    def evaluate(self, x: float) -> float:
        acc = 0.0
        for a in reversed(self.coefficients):
            acc = acc * x + a
        return acc


def h_coefficients(ctx: DriftContext, k: int) -> PolynomialForm:
    """Exact expansion of h: a_0, a_1 and a_j (j >= 2) from integer binomials, k <= 30."""
    if k < 1:
        raise DegreeError(f"need k >= 1, got {k}")
    if k > 30:
        raise DegreeError(f"coefficient form is limited to k <= 30, got {k}")
    g = _g_grid(ctx, k)
    scale = 2.0 ** (1 - k)
    coeffs = []
    for j in range(k + 1):
        if j == 0:
            total = math.fsum(g[i] * math.comb(k, i) for i in range(k + 1))
            coeffs.append(scale * total - 1.0)
        elif j == 1:
            total = math.fsum(g[i] * math.comb(k, i) * (2 * i - k) for i in range(k + 1))
            coeffs.append(scale * total - 1.0)
        else:
            terms = []
            for i in range(k + 1):
                inner = sum(
                    (-1) ** (j - ell) * math.comb(i, ell) * math.comb(k - i, j - ell)
                    for ell in range(j + 1)
                )
                terms.append(g[i] * math.comb(k, i) * inner)
            coeffs.append(scale * math.fsum(terms))
    return PolynomialForm(degree=k, coefficients=tuple(coeffs))


# ---------------------------------------------------------------------------
# growing-sample limit drift
# ---------------------------------------------------------------------------


def eval_ghat(ctx: DriftContext, y: float) -> float:
    """ghat(y) = 2 g(y) - 1, the uniform limit of H_{k}(2y-1) as k grows."""
    return 2.0 * eval_g(ctx, y) - 1.0


def eval_hhat(ctx: DriftContext, x: float) -> float:
    """hhat(x) = 2 g((1+x)/2) - x - 1, the growing-sample drift on [-1,1]."""
    if not (-1.0 <= x <= 1.0):
        raise DomainError(f"hhat is defined on [-1,1]; got x={x}")
    return 2.0 * eval_g(ctx, (1.0 + x) / 2.0) - x - 1.0


# ---------------------------------------------------------------------------
# without-replacement drift F_n
# ---------------------------------------------------------------------------


def _gen_binom_logs(a: float, imax: int) -> tuple[np.ndarray, np.ndarray]:
    """Generalized binomial coefficients C(a, i) for i = 0..imax, real a >= 0.

    Returns (sign, log magnitude); an exactly-zero factor yields sign 0.  The
    product form Prod_{j<i} (a-j)/i! is accumulated in log magnitude with sign
    tracking, never through gamma of negative arguments.
    """
    signs = np.empty(imax + 1)
    logs = np.empty(imax + 1)
    signs[0] = 1.0
    logs[0] = 0.0
    s, lg = 1.0, 0.0
    for i in range(1, imax + 1):
        factor = a - (i - 1)
        if factor == 0.0 or s == 0.0:
            s = 0.0
            lg = -math.inf
        else:
            if factor < 0.0:
                s = -s
            lg += math.log(abs(factor)) - math.log(i)
        signs[i] = s
        logs[i] = lg
    return signs, logs


def eval_F_n(ctx: DriftContext, k: int, n: int, x: float) -> float:
    """Without-replacement drift 2 C(n,k)^-1 sum_i g(i/k) C(ny,i) C(n(1-y),k-i) - 1.

    At integer lattice points n(1+x)/2 the sum reduces exactly to the
    hypergeometric mixture.  Non-lattice sign cancellation may push the value
    marginally outside [-1,1]; excursions within 1e-9 clamp, larger ones raise
    NumericalError.
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if k > n:
        raise DomainError(f"sample size k={k} exceeds n={n}")
    if k < 1:
        raise DomainError(f"need k >= 1, got {k}")
    if not (-1.0 <= x <= 1.0):
        raise DomainError(f"F_n is defined on [-1,1]; got x={x}")
    a = n * (1.0 + x) / 2.0
    b = n * (1.0 - x) / 2.0
    sa, la = _gen_binom_logs(a, k)
    sb, lb = _gen_binom_logs(b, k)
    log_cnk = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    g = _g_grid(ctx, k)
    terms = []
    for i in range(k + 1):
        s = sa[i] * sb[k - i]
        if s == 0.0:
            continue
        terms.append(g[i] * s * math.exp(la[i] + lb[k - i] - log_cnk))
    val = 2.0 * math.fsum(terms) - 1.0
    if val > 1.0 + _CLAMP_BAND or val < -1.0 - _CLAMP_BAND:
        raise NumericalError(f"F_n left [-1,1] beyond tolerance: {val}")
    return min(1.0, max(-1.0, val))
