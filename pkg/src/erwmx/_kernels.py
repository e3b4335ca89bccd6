"""Compiled fast path for collapsed-mode simulation.

The kernel mirrors the pure-Python stepping in walk.py expression for
expression (same uniform-consumption order, same float arithmetic), so the
two paths produce bit-identical trajectories; the test suite asserts this.
Models with a custom (non-catalog) reinforcement function fall back to the
Python path.
"""

from __future__ import annotations

import math

import numpy as np

from .drift import SamplingMode
from .reinforce import (
    AFFINE_DECREASING,
    CONSTANT,
    EXPONENTIAL,
    LINEAR,
    MAJORITY,
    QUADRATIC,
    TABLE,
)

try:  # pragma: no cover - exercised implicitly by engine dispatch
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


_F_CODES = {
    CONSTANT: 0,
    LINEAR: 1,
    AFFINE_DECREASING: 2,
    EXPONENTIAL: 3,
    QUADRATIC: 4,
    MAJORITY: 5,
    TABLE: 6,
}
_S_CODES = {"constant": 0, "power": 1, "log": 2, "table": 3}


def supports(model) -> bool:
    """True when the model is expressible in the compiled kernel."""
    return NUMBA_AVAILABLE and model.spec.kind in _F_CODES and model.schedule.kind in _S_CODES


def run_collapsed(model, horizon: int, checkpoint_ns: np.ndarray, rng) -> np.ndarray:
    spec = model.spec
    sched = model.schedule
    f_params = np.asarray(spec.params, dtype=np.float64)
    if f_params.size == 0:
        f_params = np.zeros(1)
    s_table = (
        np.asarray(sched.values, dtype=np.int64) if sched.kind == "table" else np.zeros(1, np.int64)
    )
    warm = min(model.warmup(), horizon)
    return _collapsed_kernel(
        _F_CODES[spec.kind],
        f_params,
        float(model.p),
        float(model.q),
        model.sampling_mode is SamplingMode.WITHOUT_REPLACEMENT,
        _S_CODES[sched.kind],
        float(sched.c),
        float(sched.alpha),
        int(sched.k),
        s_table,
        int(horizon),
        int(warm),
        checkpoint_ns,
        rng,
    )


@njit(cache=True, nogil=True)
def _f_eval(code, params, x):
    if code == 0:
        return params[0]
    if code == 1:
        return params[0] * x
    if code == 2:
        return params[0] * (1.0 - x)
    if code == 3:
        return params[0] * math.exp(x)
    if code == 4:
        return x * x
    if code == 5:
        if x > 0.5:
            return 1.0
        if x < 0.5:
            return 0.0
        return 0.5
    idx = int(round(x * (params.shape[0] - 1)))
    return params[idx]


@njit(cache=True, nogil=True)
def _binom_inversion(u, k, y):
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
    return m0


@njit(cache=True, nogil=True)
def _collapsed_kernel(
    f_code,
    f_params,
    p,
    q,
    without,
    s_code,
    s_c,
    s_alpha,
    s_k,
    s_table,
    horizon,
    warm,
    checkpoint_ns,
    rng,
):
    out = np.empty(checkpoint_ns.shape[0], np.int64)
    ci = 0
    m = 0
    n = 0
    while n < warm:
        u = rng.random()
        if u < q:
            m += 1
        n += 1
        if ci < checkpoint_ns.shape[0] and checkpoint_ns[ci] == n:
            out[ci] = 2 * m - n
            ci += 1
    while n < horizon:
        if s_code == 0:
            k = s_k
        else:
            if s_code == 1:
                v = int(math.ceil(s_c * float(n) ** s_alpha - 1e-9))
            elif s_code == 2:
                v = int(math.ceil(s_c * math.log(n) - 1e-9))
            else:
                v = int(s_table[n - 1])
            k = v
            if k < 1:
                k = 1
            if k > n:
                k = n
        if without:
            c = 0
            rem_n = n
            rem_m = m
            for _ in range(k):
                u = rng.random()
                if u * rem_n < rem_m:
                    c += 1
                    rem_m -= 1
                rem_n -= 1
        else:
            y = m / n
            if k <= 1000:
                u = rng.random()
                if y <= 0.0:
                    c = 0
                elif y >= 1.0:
                    c = k
                else:
                    c = _binom_inversion(u, k, y)
            else:
                c = 0
                for _ in range(k):
                    if rng.random() < y:
                        c += 1
        fx = _f_eval(f_code, f_params, c / k)
        gup = p * fx + (1.0 - p) * (1.0 - fx)
        u = rng.random()
        if u < gup:
            m += 1
        n += 1
        if ci < checkpoint_ns.shape[0] and checkpoint_ns[ci] == n:
            out[ci] = 2 * m - n
            ci += 1
    return out
