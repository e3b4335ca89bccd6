from __future__ import annotations

import math
from fractions import Fraction
from itertools import permutations, product

import numpy as np
import pytest

import erwmx as e
from erwmx.drift import SamplingMode
from erwmx.errors import ConfigError, DomainError, ScheduleError
from erwmx.reinforce import evaluate_f

from conftest import WITH, WITHOUT, model


# --- schedules -------------------------------------------------------------------


def test_k_schedule_examples():
    assert e.k_schedule_eval(e.KSchedule.power(1, 0.5), 100) == 10
    assert e.k_schedule_eval(e.KSchedule.power(2, 0.5), 10) == 7
    assert e.k_schedule_eval(e.KSchedule.power(1, 0.9), 2) == 2  # clamp to n
    assert e.k_schedule_eval(e.KSchedule.constant(7), 3) == 7  # never clamped
    assert e.k_schedule_eval(e.KSchedule.log(2.0), 1) == 1
    assert e.k_schedule_eval(e.KSchedule.table([1, 2, 2, 3]), 4) == 3


def test_k_schedule_monotone_on_prefix():
    for sched in (e.KSchedule.power(1, 0.6), e.KSchedule.log(3.0)):
        ks = [e.k_schedule_eval(sched, n) for n in range(1, 2000)]
        assert all(b >= a for a, b in zip(ks, ks[1:]))
        assert min(ks) >= 1


def test_k_schedule_errors():
    with pytest.raises(ScheduleError):
        e.k_schedule_eval(e.KSchedule.table([1, 2]), 3)
    with pytest.raises(DomainError):
        e.k_schedule_eval(e.KSchedule.constant(2), 0)
    with pytest.raises(ConfigError):
        e.KSchedule.power(0.0, 0.5)


# --- step probability ---------------------------------------------------------------


def test_step_probability_examples():
    m1 = model(0.75, 0.5, WITH, e.KSchedule.constant(1), e.linear(1.0))
    assert e.step_probability(m1, 1, 1) == pytest.approx(0.75)
    assert e.step_probability(m1, 2, 1) == pytest.approx(0.5)
    m2 = model(0.75, 0.5, WITHOUT, e.KSchedule.constant(2), e.linear(1.0))
    assert e.step_probability(m2, 4, 2) == pytest.approx(0.5)
    assert e.step_probability(m1, 5, 3) == pytest.approx(0.55)


def test_step_probability_validates_state():
    m2 = model(0.75, 0.5, WITHOUT, e.KSchedule.constant(4), e.linear(1.0))
    with pytest.raises(DomainError):
        e.step_probability(m2, 3, 1)  # before warm-up
    m1 = model(0.75, 0.5, WITH, e.KSchedule.constant(1), e.linear(1.0))
    with pytest.raises(DomainError):
        e.step_probability(m1, 4, 5)


# --- simulate ------------------------------------------------------------------------


def test_degenerate_first_step():
    m = model(0.75, 1.0, WITH, e.KSchedule.constant(1), e.linear(1.0))
    for mode in ("collapsed", "literal"):
        traj = e.simulate(m, 1, seed=5, mode=mode)
        assert traj.checkpoints() == [(1, 1)]


@pytest.mark.parametrize("mode", ["collapsed", "literal"])
@pytest.mark.parametrize(
    "m",
    [
        model(0.75, 0.5, WITH, e.KSchedule.constant(3), e.majority()),
        model(0.6, 0.5, WITHOUT, e.KSchedule.constant(4), e.linear(1.0)),
        model(0.8, 0.5, WITH, e.KSchedule.power(1, 0.6), e.quadratic()),
        model(0.8, 0.3, WITHOUT, e.KSchedule.power(1, 0.5), e.quadratic()),
    ],
    ids=["maj3", "wo-k4", "grow", "grow-wo"],
)
def test_lattice_invariant(mode, m):
    cps = list(range(1, 41))
    traj = e.simulate(m, 40, seed=123, mode=mode, checkpoints=cps, engine="python")
    prev = 0
    for n, s in traj.checkpoints():
        assert abs(s) <= n and (s + n) % 2 == 0
        assert abs(s - prev) == 1
        prev = s


def test_determinism_same_seed():
    m = model(0.75, 0.5, WITH, e.KSchedule.constant(3), e.majority())
    a = e.simulate(m, 500, seed=7, replicate_id=4)
    b = e.simulate(m, 500, seed=7, replicate_id=4)
    assert a.ss == b.ss
    c = e.simulate(m, 500, seed=7, replicate_id=5)
    assert a.ss != c.ss  # different substream


@pytest.mark.parametrize(
    "m",
    [
        model(0.75, 0.5, WITH, e.KSchedule.constant(1), e.linear(1.0)),
        model(0.75, 0.5, WITH, e.KSchedule.constant(3), e.majority()),
        model(0.6, 0.5, WITHOUT, e.KSchedule.constant(4), e.linear(1.0)),
        model(0.8, 0.5, WITH, e.KSchedule.power(1, 0.6), e.quadratic()),
        model(0.8, 0.5, WITHOUT, e.KSchedule.power(1, 0.6), e.quadratic()),
        model(0.7, 0.7, WITH, e.KSchedule.constant(5), e.constant(1.0)),
        model(0.7, 0.5, WITH, e.KSchedule.constant(2), e.table([0.1, 0.4, 0.9], k=2)),
        model(0.55, 0.5, WITH, e.KSchedule.log(2.0), e.exponential(0.3)),
    ],
    ids=["classical", "maj3", "wo-k4", "grow", "grow-wo", "iid", "table", "log-exp"],
)
def test_python_and_compiled_paths_identical(m):
    cps = [1, 2, 4, 8, 16, 500, 1000]
    a = e.simulate(m, 1000, seed=42, checkpoints=cps, replicate_id=2, engine="python")
    b = e.simulate(m, 1000, seed=42, checkpoints=cps, replicate_id=2, engine="numba")
    assert a.ss == b.ss


def test_custom_f_falls_back_to_python():
    spec = e.custom(lambda x: 0.5 * x + 0.1, continuity_class="C2")
    m = model(0.7, 0.5, WITH, e.KSchedule.constant(2), spec)
    traj = e.simulate(m, 50, seed=3)
    assert traj.terminal_n == 50
    with pytest.raises(ConfigError):
        e.simulate(m, 50, seed=3, engine="numba")


# --- warm-up -------------------------------------------------------------------------


def test_without_replacement_warmup_law():
    # plus_count at n = k must be Binomial(k, q): compare to the oracle's
    # initialisation row by a chi-square-style band
    k, q, reps = 4, 0.3, 20000
    m = model(0.6, q, WITHOUT, e.KSchedule.constant(k), e.linear(1.0))
    counts = np.zeros(k + 1)
    for r in range(reps):
        traj = e.simulate(m, k, seed=11, checkpoints=[k], replicate_id=r)
        counts[(traj.ss[0] + k) // 2] += 1
    expected = reps * e.exact_distribution(m, k)[0].probs
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    assert chi2 < 20.5  # P(chi2_4 > 20.5) ~ 4e-4


# --- mode equivalence by exhaustive enumeration ----------------------------------------


def _literal_law_with(n, m_plus, k, gfrac):
    """One-step +1 law by enumerating all n^k index tuples (rational)."""
    total = Fraction(0)
    for tup in product(range(n), repeat=k):
        c = sum(1 for i in tup if i < m_plus)
        total += gfrac[c]
    return total / n**k


def _literal_law_without(n, m_plus, k, gfrac):
    """One-step +1 law by enumerating ordered distinct index tuples (rational)."""
    total = Fraction(0)
    count = 0
    for tup in permutations(range(n), k):
        c = sum(1 for i in tup if i < m_plus)
        total += gfrac[c]
        count += 1
    return total / count


@pytest.mark.parametrize("spec", [e.linear(1.0), e.majority()], ids=["linear", "majority"])
@pytest.mark.parametrize("sampling", [WITH, WITHOUT], ids=["with", "without"])
def test_mode_equivalence_exhaustive(spec, sampling):
    p = Fraction(3, 4)
    for k in (1, 2, 3):
        mdl = model(0.75, 0.5, sampling, e.KSchedule.constant(k), spec)
        gfrac = [
            p * Fraction(evaluate_f(spec, i / k)) + (1 - p) * (1 - Fraction(evaluate_f(spec, i / k)))
            for i in range(k + 1)
        ]
        for n in range(max(k, 1), 9):
            for m_plus in range(n + 1):
                if sampling is WITH:
                    exact = _literal_law_with(n, m_plus, k, gfrac)
                else:
                    exact = _literal_law_without(n, m_plus, k, gfrac)
                assert abs(e.step_probability(mdl, n, m_plus) - float(exact)) < 1e-12


# --- one-step replay ---------------------------------------------------------------------


def test_chi_square_replay_from_state():
    # state (n=5, plus_count=3), classical model: P[+1] = (1 + 0.5*0.2)/2 = 0.55
    m = model(0.75, 0.5, WITH, e.KSchedule.constant(1), e.linear(1.0))
    p_up = e.step_probability(m, 5, 3)
    assert p_up == pytest.approx(0.55)
    reps = 10**5
    rng = e.substream(2024, 0)
    history = np.array([1, 1, 1, -1, -1])
    hits_literal = 0
    hits_collapsed = 0
    for _ in range(reps):
        idx = int(rng.integers(0, 5))
        c = 1 if history[idx] == 1 else 0
        fx = evaluate_f(m.spec, c / 1)
        if rng.random() < m.p * fx + (1 - m.p) * (1 - fx):
            hits_literal += 1
        c2 = e.draw_binomial(rng, 1, 3 / 5)
        fx2 = evaluate_f(m.spec, c2 / 1)
        if rng.random() < m.p * fx2 + (1 - m.p) * (1 - fx2):
            hits_collapsed += 1
    band = 4 * math.sqrt(0.55 * 0.45 / reps)
    assert abs(hits_literal / reps - 0.55) < band
    assert abs(hits_collapsed / reps - 0.55) < band


# --- samplers -----------------------------------------------------------------------------


def test_draw_binomial_exactness():
    rng = e.substream(5, 1)
    reps = 200000
    counts = np.zeros(4)
    for _ in range(reps):
        counts[e.draw_binomial(rng, 3, 0.3)] += 1
    from erwmx.drift import binom_row

    expected = reps * binom_row(3, 0.3)
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    assert chi2 < 16.3  # P(chi2_3 > 16.3) ~ 1e-3
    assert e.draw_binomial(rng, 5, 0.0) == 0
    assert e.draw_binomial(rng, 5, 1.0) == 5


def test_draw_hypergeometric_exactness():
    rng = e.substream(6, 1)
    reps = 200000
    n, mm, k = 10, 4, 3
    counts = np.zeros(k + 1)
    for _ in range(reps):
        counts[e.draw_hypergeometric(rng, n, mm, k)] += 1
    from erwmx.drift import hypergeom_row

    expected = reps * hypergeom_row(n, mm, k)
    chi2 = float(((counts - expected) ** 2 / expected[expected > 0]).sum())
    assert chi2 < 16.3


def test_model_config_validation():
    with pytest.raises(ConfigError):
        model(0.5, 0.5, WITH, e.KSchedule.constant(1), e.linear(1.0))
    with pytest.raises(ConfigError):
        model(0.6, 1.5, WITH, e.KSchedule.constant(1), e.linear(1.0))
    with pytest.warns(UserWarning):
        model(0.5, 0.5, WITH, e.KSchedule.constant(1), e.linear(1.0), allow_half=True)
