from __future__ import annotations

import pytest

import erwmx as e
from erwmx.drift import SamplingMode

WITH = SamplingMode.WITH_REPLACEMENT
WITHOUT = SamplingMode.WITHOUT_REPLACEMENT


def model(p, q, sampling, schedule, spec, **kw) -> e.ModelConfig:
    return e.ModelConfig(p=p, q=q, sampling_mode=sampling, schedule=schedule, spec=spec, **kw)


@pytest.fixture
def classical_p06():
    """Classical ERW: f(x)=x, k=1, p=0.6 (diffusive, tau=0.8)."""
    return model(0.6, 0.5, WITH, e.KSchedule.constant(1), e.linear(1.0))


@pytest.fixture
def classical_p075():
    """Classical ERW at the critical point p=3/4 (tau=1/2)."""
    return model(0.75, 0.5, WITH, e.KSchedule.constant(1), e.linear(1.0))


@pytest.fixture
def majority_k3():
    """Majority rule, k=3, p=0.75 (superdiffusive, tau=0.25)."""
    return model(0.75, 0.5, WITH, e.KSchedule.constant(3), e.majority())


@pytest.fixture
def iid_p07():
    """f identically 1: i.i.d. Rademacher(0.7) steps."""
    return model(0.7, 0.7, WITH, e.KSchedule.constant(5), e.constant(1.0))
