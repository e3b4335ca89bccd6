"""Simulation engine for all four model variants.

Modes:

* ``collapsed`` (default): the sampled plus-count C is drawn directly from its
  binomial / hypergeometric conditional law, exploiting the Markov collapse of
  the step law onto the plus-count.  O(k) memory-free stepping.
* ``literal``: the full +/-1 history is stored and k indices are drawn
  explicitly (with replacement: k independent uniforms on the past; without:
  k sequential uniform draws from the remaining indices).  Exists for
  validation and memory-profiling honesty; distributionally identical.

RNG contract: replicate r uses ``numpy.random.Generator(PCG64(SeedSequence([
master_seed, r])))``.  The per-step uniform consumption order is fixed (one
uniform per warm-up step; one uniform for a collapsed binomial draw when
k <= 1000, k uniforms above or for hypergeometric draws; one uniform for the
step emission), so trajectories are bit-reproducible across runs, thread
counts, and the optional compiled fast path.
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass

import numpy as np

from .drift import DriftContext, SamplingMode, binom_row, hypergeom_row, _g_grid
from .errors import ConfigError, DomainError, ScheduleError
from .reinforce import ReinforcementSpec, TABLE, _eval_scalar

BINOM_INVERSION_MAX_K = 1000  # inversion-by-summation below, Bernoulli sum above

LITERAL = "literal"
COLLAPSED = "collapsed"


@dataclass(frozen=True)
class KSchedule:
    """Sample-size schedule k(n); growing kinds evaluate as clamp(ceil(formula(n)), 1, n)."""

    kind: str  # "constant" | "power" | "log" | "table"
    k: int = 0
    c: float = 0.0
    alpha: float = 0.0
    values: tuple[int, ...] = ()

    @staticmethod
    def constant(k: int) -> "KSchedule":
        if k < 1:
            raise ConfigError(f"constant schedule needs k >= 1, got {k}")
        return KSchedule(kind="constant", k=int(k))

    @staticmethod
    def power(c: float, alpha: float) -> "KSchedule":
        if c <= 0 or alpha <= 0:
            raise ConfigError(f"power schedule needs c > 0 and alpha > 0, got c={c}, alpha={alpha}")
        return KSchedule(kind="power", c=float(c), alpha=float(alpha))

    @staticmethod
    def log(c: float) -> "KSchedule":
        if c <= 0:
            raise ConfigError(f"log schedule needs c > 0, got {c}")
        return KSchedule(kind="log", c=float(c))

    @staticmethod
    def table(values) -> "KSchedule":
        vals = tuple(int(v) for v in values)
        if not vals or any(v < 1 for v in vals):
            raise ConfigError("table schedule needs at least one value, all >= 1")
        return KSchedule(kind="table", values=vals)

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"


def k_schedule_eval(schedule: KSchedule, n: int) -> int:
    """k(n); constant schedules are never clamped (warm-up handles n < k)."""
    if n < 1:
        raise DomainError(f"schedule is defined for n >= 1, got {n}")
    if schedule.kind == "constant":
        return schedule.k
    if schedule.kind == "power":
        # the 1e-9 guard keeps ceil stable when c * n^alpha is mathematically integral
        v = int(math.ceil(schedule.c * float(n) ** schedule.alpha - 1e-9))
    elif schedule.kind == "log":
        v = int(math.ceil(schedule.c * math.log(n) - 1e-9))
    elif schedule.kind == "table":
        if n > len(schedule.values):
            raise ScheduleError(f"table schedule exhausted at n={n} (length {len(schedule.values)})")
        v = schedule.values[n - 1]
    else:
        raise ConfigError(f"unknown schedule kind {schedule.kind!r}")
    return max(1, min(v, n))


@dataclass(frozen=True)
class ModelConfig:
    """Full walk specification: memory parameter, initial law, sampling scheme, f."""

    p: float
    q: float
    sampling_mode: SamplingMode
    schedule: KSchedule
    spec: ReinforcementSpec
    allow_half: bool = False

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise ConfigError(f"p must lie in (0,1), got {self.p}")
        if self.p == 0.5:
            if not self.allow_half:
                raise ConfigError(
                    "p = 1/2 reduces to the simple symmetric walk, which the limit "
                    "theory excludes; set allow_half=True to simulate it anyway"
                )
            _warnings.warn("p = 1/2: all limit theorems exclude this value", stacklevel=2)
        if not (0.0 <= self.q <= 1.0):
            raise ConfigError(f"q must lie in [0,1], got {self.q}")
        self.drift_context()  # validates the induced g-range eagerly

    def drift_context(self) -> DriftContext:
        return DriftContext(
            spec=self.spec, p=self.p, sampling_mode=self.sampling_mode, allow_half=self.allow_half
        )

    def k_or_limit(self):
        from .analysis import GROWING_LIMIT, ConstantK

        if self.schedule.is_constant:
            return ConstantK(self.schedule.k)
        return GROWING_LIMIT

    def warmup(self) -> int:
        """Steps drawn i.i.d. Rademacher(q) before the sampler engages."""
        if self.schedule.is_constant and self.sampling_mode is SamplingMode.WITHOUT_REPLACEMENT:
            return self.schedule.k
        return 1


@dataclass(frozen=True)
class Trajectory:
    """Checkpointed replicate: (n, S_n) records plus provenance."""

    replicate_id: int
    ns: tuple[int, ...]
    ss: tuple[int, ...]
    terminal_n: int
    terminal_s: int
    master_seed: int
    substream_id: int
    mode: str

    def checkpoints(self) -> list[tuple[int, int]]:
        return list(zip(self.ns, self.ss))


def substream(master_seed: int, replicate: int) -> np.random.Generator:
    """The documented substream derivation: PCG64(SeedSequence([master_seed, replicate]))."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([master_seed, replicate])))


def step_probability(model: ModelConfig, n: int, plus_count: int) -> float:
    """Exact P[X_{n+1} = +1 | n steps taken, plus_count of them +1]."""
    if n < model.warmup():
        raise DomainError(f"state n={n} precedes the warm-up ({model.warmup()})")
    if not (0 <= plus_count <= n):
        raise DomainError(f"plus_count={plus_count} outside 0..{n}")
    k = k_schedule_eval(model.schedule, n)
    ctx = model.drift_context()
    g = _g_grid(ctx, k)
    if model.sampling_mode is SamplingMode.WITH_REPLACEMENT:
        row = binom_row(k, plus_count / n)
    else:
        row = hypergeom_row(n, plus_count, k)
    return float(math.fsum(g * row))


# ---------------------------------------------------------------------------
# exact samplers (uniform-consumption order is part of the RNG contract)
# ---------------------------------------------------------------------------


def _binom_inversion(u: float, k: int, y: float) -> int:
    """Inversion by summation from the mode; consumes the provided uniform only."""
    m0 = int((k + 1) * y)
    if m0 > k:
        m0 = k
    pm = math.exp(
        math.lgamma(k + 1)
        - math.lgamma(m0 + 1)
        - math.lgamma(k - m0 + 1)
        + m0 * math.log(y)
        + (k - m0) * math.log1p(-y)
    )
    cum = pm
    if u < cum:
        return m0
    lo = m0
    hi = m0
    plo = pm
    phi = pm
    while lo > 0 or hi < k:
        if lo > 0:
            plo = plo * lo * (1.0 - y) / ((k - lo + 1) * y)
            lo -= 1
            cum += plo
            if u < cum:
                return lo
        if hi < k:
            phi = phi * (k - hi) * y / ((hi + 1) * (1.0 - y))
            hi += 1
            cum += phi
            if u < cum:
                return hi
    return m0  # residual rounding mass (< 1e-12): return the mode


def draw_binomial(rng: np.random.Generator, k: int, y: float) -> int:
    """Exact Binomial(k, y) draw: mode inversion for k <= 1000, Bernoulli sum above."""
    if k <= BINOM_INVERSION_MAX_K:
        u = rng.random()
        if y <= 0.0:
            return 0
        if y >= 1.0:
            return k
        return _binom_inversion(u, k, y)
    c = 0
    for _ in range(k):
        if rng.random() < y:
            c += 1
    return c


def draw_hypergeometric(rng: np.random.Generator, n: int, m: int, k: int) -> int:
    """Exact Hypergeometric(n, m, k) draw via k sequential uniform draws without replacement."""
    c = 0
    rem_n = n
    rem_m = m
    for _ in range(k):
        u = rng.random()
        if u * rem_n < rem_m:
            c += 1
            rem_m -= 1
        rem_n -= 1
    return c


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def simulate(
    model: ModelConfig,
    horizon: int,
    seed: int,
    mode: str = COLLAPSED,
    checkpoints: list[int] | None = None,
    replicate_id: int = 0,
    engine: str = "auto",
) -> Trajectory:
    """Run one trajectory to ``horizon`` and record S_n at the checkpoints.

    ``engine`` selects the stepping implementation: "python" is the reference;
    "auto" uses the compiled fast path for collapsed mode when the model is
    expressible there (bit-identical trajectories either way, which the test
    suite asserts); "numba" forces it.
    """
    if horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {horizon}")
    if mode not in (LITERAL, COLLAPSED):
        raise ConfigError(f"mode must be literal|collapsed, got {mode!r}")
    cps = sorted(set(int(c) for c in (checkpoints if checkpoints is not None else [horizon])))
    if cps and (cps[0] < 1 or cps[-1] > horizon):
        raise ConfigError(f"checkpoints must lie in [1, horizon]; got {cps}")
    if model.spec.kind == TABLE and not model.schedule.is_constant:
        raise ConfigError("table reinforcement requires a constant schedule matching its grid")
    if model.spec.kind == TABLE and model.schedule.k != model.spec.table_k:
        raise ConfigError(
            f"table reinforcement declared k={model.spec.table_k}; schedule uses k={model.schedule.k}"
        )

    if model.schedule.kind == "table" and len(model.schedule.values) < horizon - 1:
        raise ScheduleError(
            f"table schedule (length {len(model.schedule.values)}) exhausted before horizon {horizon}"
        )

    rng = substream(seed, replicate_id)
    cps_internal = sorted(set(cps) | {horizon})  # terminal state is always tracked
    use_kernel = False
    if mode == COLLAPSED and engine in ("auto", "numba"):
        from . import _kernels

        use_kernel = _kernels.supports(model)
        if engine == "numba" and not use_kernel:
            raise ConfigError("compiled path cannot express this model (custom f?)")
    if use_kernel:
        from . import _kernels

        ss = _kernels.run_collapsed(model, horizon, np.asarray(cps_internal, dtype=np.int64), rng)
        ss_internal = [int(s) for s in ss]
    else:
        ss_internal = _simulate_python(model, horizon, cps_internal, rng, mode)
    by_n = dict(zip(cps_internal, ss_internal))
    return Trajectory(
        replicate_id=replicate_id,
        ns=tuple(cps),
        ss=tuple(by_n[c] for c in cps),
        terminal_n=horizon,
        terminal_s=by_n[horizon],
        master_seed=seed,
        substream_id=replicate_id,
        mode=mode,
    )


def _simulate_python(model, horizon, cps, rng, mode) -> list[int]:
    spec = model.spec
    p = model.p
    q = model.q
    without = model.sampling_mode is SamplingMode.WITHOUT_REPLACEMENT
    warm = min(model.warmup(), horizon)
    cp_iter = iter(cps)
    next_cp = next(cp_iter, None)
    out: list[int] = []
    history = np.zeros(horizon, dtype=np.int8) if mode == LITERAL else None
    m = 0
    n = 0
    while n < warm:
        u = rng.random()
        step_up = u < q
        if step_up:
            m += 1
        if history is not None:
            history[n] = 1 if step_up else -1
        n += 1
        if next_cp == n:
            out.append(2 * m - n)
            next_cp = next(cp_iter, None)
    while n < horizon:
        k = k_schedule_eval(model.schedule, n)
        if mode == COLLAPSED:
            if without:
                c = draw_hypergeometric(rng, n, m, k)
            else:
                c = draw_binomial(rng, k, m / n)
        else:
            if without:
                pool = np.arange(n)
                for j in range(k):
                    r = int(rng.integers(j, n))
                    pool[j], pool[r] = pool[r], pool[j]
                c = int(np.sum(history[pool[:k]] == 1))
            else:
                idx = rng.integers(0, n, size=k)
                c = int(np.sum(history[idx] == 1))
        fx = _eval_scalar(spec, c / k)
        gup = p * fx + (1.0 - p) * (1.0 - fx)
        u = rng.random()
        step_up = u < gup
        if step_up:
            m += 1
        if history is not None:
            history[n] = 1 if step_up else -1
        n += 1
        if next_cp == n:
            out.append(2 * m - n)
            next_cp = next(cp_iter, None)
    return out
