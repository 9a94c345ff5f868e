"""Decision procedures for embeddings between the weighted scales."""

import pytest
from hypothesis import given, settings, strategies as st

from klab.embeddings import (FAILS, HOLDS, UNDETERMINED, adaptivity_scale,
                             decide_embedding, decide_embedding_holder_route,
                             decide_reverse_embedding, pde_regularity_tau,
                             sigma, technical_threshold_a)
from klab.errors import InvalidParams


# --- forward embedding K^m_{a,p} -> F^{m,rloc}_{tau,2} ---

@pytest.mark.parametrize("m,a,p,tau,d,delta,outcome", [
    (2, 2, 2.0, 2.0, 2, 0, HOLDS),     # tau = p and m <= a
    (2, 1, 2.0, 2.0, 2, 0, FAILS),     # tau = p and m > a
    (1, 0, 2.0, 1.0, 2, 0, FAILS),     # m - a = 1 = (d-delta)(1/tau-1/p)
    (1, 0.5, 2.0, 1.0, 2, 0, HOLDS),   # 0.5 < 1
    (2, 1, 2.0, 0.9, 2, 0, HOLDS),     # 1 < 2(1/0.9 - 1/2) = 1.22
    (1, 0, 2.0, 3.0, 2, 0, FAILS),     # tau > p is never sufficient
    (2, 0, 2.0, 1.0, 3, 1, FAILS),     # 2 = (3-1)(1 - 1/2) * 2
    (2, 1.5, 2.0, 1.0, 3, 1, HOLDS),   # 0.5 < 1
])
def test_truth_table_examples(m, a, p, tau, d, delta, outcome):
    assert decide_embedding(m, a, p, tau, d, delta).outcome == outcome


def test_smoothness_guard():
    # m must exceed sigma_{tau,2} = d(1/min(1,tau) - 1): guard decides Fails
    v = decide_embedding(1, 0, 2.0, 0.5, 2, 0)   # sigma = 2 >= m
    assert v.outcome == FAILS
    assert "sigma" in v.trigger


def test_verdict_carries_condition_values():
    v = decide_embedding(1, 0.5, 2.0, 1.0, 2, 0)
    cv = v.condition_values
    assert cv["m_minus_a"] == 0.5
    assert cv["bound"] == pytest.approx(1.0)


@given(m=st.integers(1, 3), a=st.floats(-1, 3), p=st.floats(1.1, 4),
       tau=st.floats(0.8, 4), d=st.sampled_from([2, 3]),
       delta=st.sampled_from([0, 1]))
@settings(max_examples=120, deadline=None)
def test_monotone_in_a(m, a, p, tau, d, delta):
    # increasing the weight parameter a can only help the embedding
    if m <= sigma(tau, 2.0, d):
        return
    if decide_embedding(m, a, p, tau, d, delta).outcome == HOLDS:
        assert decide_embedding(m, a + 0.5, p, tau, d,
                                delta).outcome == HOLDS


@given(m=st.integers(1, 3), a=st.floats(-1, 3), p=st.floats(1.1, 4),
       d=st.sampled_from([2, 3]), delta=st.sampled_from([0, 1]))
@settings(max_examples=80, deadline=None)
def test_tau_above_p_always_fails(m, a, p, d, delta):
    tau = p + 0.3
    if m <= sigma(tau, 2.0, d):
        return
    assert decide_embedding(m, a, p, tau, d, delta).outcome == FAILS


# --- Hoelder route ---

def test_holder_route_holds_inside_the_window():
    # m/d = 1/3 sits in (1/tau - 1, 1/p) and the weight gap closes
    v, route = decide_embedding_holder_route(1, 0.5, 2.5, 1.0, 3, 0)
    assert v.outcome == HOLDS
    assert route.applies
    assert route.r > 0


def test_holder_route_window_failure_is_undetermined():
    # printed inapplicable case: window 0.5 < 1/4 is false
    v, route = decide_embedding_holder_route(1, 0.5, 4.0, 1.5, 2, 0)
    assert v.outcome == UNDETERMINED


def test_holder_route_rejects_tau_ge_p():
    with pytest.raises(InvalidParams):
        decide_embedding_holder_route(2, 2, 2.0, 3.0, 2, 0)


# --- reverse embedding ---

@pytest.mark.parametrize("m,a,p,tau,d,delta,outcome", [
    (1, 1, 2.0, 2.0, 2, 0, HOLDS),     # tau = p and a <= m
    (1, 0, 2.0, 3.0, 2, 0, HOLDS),     # tau > p and m - a > bound
    (1, 2, 2.0, 3.0, 2, 0, FAILS),     # weight too strong
])
def test_reverse_examples(m, a, p, tau, d, delta, outcome):
    assert decide_reverse_embedding(m, a, p, tau, d,
                                    delta).outcome == outcome


# --- PDE regularity scale and adaptivity ---

def test_pde_tau_printed_example():
    assert pde_regularity_tau(1, 0, 2, 0) == pytest.approx(1.0)


def test_pde_tau_formula():
    # tau* = ((m - a)/(d - delta) + 1/2)^-1
    assert pde_regularity_tau(2, 0.5, 2, 0) == pytest.approx(
        1.0 / (1.5 / 2 + 0.5))


def test_adaptivity_scale():
    # tau = (m/d + 1/2)^-1
    assert adaptivity_scale(2, 1) == pytest.approx(1.0)
    assert adaptivity_scale(2, 2) == pytest.approx(1.0 / 1.5)


def test_technical_threshold_vacuous_for_large_tau():
    out = technical_threshold_a(0, 2, 2.0, 2.0)
    assert out["vacuous"]


def test_technical_threshold_value():
    out = technical_threshold_a(0, 2, 0.8, 2.0)
    # a > ell(1/tau - 1/p) + d(1/p - 1)
    assert out["threshold"] == pytest.approx(0 * (1.25 - 0.5)
                                             + 2 * (0.5 - 1.0))
    assert not out["vacuous"]
