import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eepc.channel import (
    ChannelParams,
    ChannelTriple,
    capacity,
    capacity_from_triple,
    capacity_optimal_threshold,
    db_to_lin,
    lin_to_db,
    simulate_symbols,
    transition_probs,
)
from eepc.ternary import ERASE

# frozen with mpmath: delta = Q(sqrt(2)*(T+1)), eps at Es/N0 = 1
DELTA_T0 = 0.07864960352514258  # Q(sqrt(2)), T = 0
DELTA_T01 = 0.05987801948740456  # T = 0.1
EPS_T01 = 0.04175942666770019


def test_transition_probs_frozen_values():
    tri = transition_probs(ChannelParams(1.0, 0.0))
    assert tri.eps == 0.0
    assert math.isclose(tri.delta, DELTA_T0, rel_tol=1e-12)
    tri = transition_probs(ChannelParams(1.0, 0.1))
    assert math.isclose(tri.delta, DELTA_T01, rel_tol=1e-12)
    assert math.isclose(tri.eps, EPS_T01, rel_tol=1e-12)


def test_high_snr_limit():
    tri = transition_probs(ChannelParams(db_to_lin(40.0), 0.5))
    assert tri.delta < 1e-300 and tri.eps < 1e-300 and tri.correct > 1.0 - 1e-12


@settings(max_examples=200)
@given(st.floats(-10.0, 20.0), st.floats(0.0, 1.5))
def test_probabilities_sum_to_one(esn0_db, t):
    tri = transition_probs(ChannelParams(db_to_lin(esn0_db), t))
    assert tri.delta >= 0 and tri.eps >= 0
    assert abs(tri.delta + tri.eps + tri.correct - 1.0) < 1e-14


@settings(max_examples=50)
@given(st.floats(-5.0, 10.0))
def test_delta_decreasing_in_t(esn0_db):
    lin = db_to_lin(esn0_db)
    ts = np.linspace(0, 1, 21)
    deltas = [transition_probs(ChannelParams(lin, t)).delta for t in ts]
    assert all(a > b for a, b in zip(deltas, deltas[1:]))


def test_capacity_reduces_to_bsc_at_t0():
    for esn0_db in (-2.0, 0.0, 3.0):
        params = ChannelParams(db_to_lin(esn0_db), 0.0)
        tri = transition_probs(params)
        h2 = -tri.delta * math.log2(tri.delta) - (1 - tri.delta) * math.log2(1 - tri.delta)
        assert math.isclose(capacity(params), 1.0 - h2, rel_tol=1e-12)
    assert capacity_from_triple(ChannelTriple(0.0, 0.0)) == 1.0


def _mutual_information(tri: ChannelTriple) -> float:
    """I(X;Y) of the symmetric 2x3 channel with uniform input (oracle)."""
    rows = np.array([[tri.correct, tri.eps, tri.delta], [tri.delta, tri.eps, tri.correct]])
    px = np.array([0.5, 0.5])
    py = px @ rows
    mi = 0.0
    for i in range(2):
        for j in range(3):
            joint = px[i] * rows[i, j]
            if joint > 0:
                mi += joint * math.log2(rows[i, j] / py[j])
    return mi


@settings(max_examples=80)
@given(st.floats(-6.0, 12.0), st.floats(0.0, 1.0))
def test_capacity_equals_mutual_information(esn0_db, t):
    params = ChannelParams(db_to_lin(esn0_db), t)
    mi = _mutual_information(transition_probs(params))
    assert math.isclose(capacity(params), mi, rel_tol=1e-10, abs_tol=1e-12)


def test_optimal_threshold_beats_hard_decision():
    for esn0_db in (0.0, 2.0, 5.0):
        lin = db_to_lin(esn0_db)
        t_star, c_star = capacity_optimal_threshold(lin)
        assert t_star > 0.0
        assert c_star > capacity(ChannelParams(lin, 0.0))
        # fine-grid oracle
        grid = np.arange(0.0, 1.0, 1e-4)
        best = max(capacity(ChannelParams(lin, t)) for t in grid)
        assert c_star >= best - 1e-9


def test_simulate_symbols_statistics():
    params = ChannelParams(db_to_lin(2.0), 0.12)
    rng = np.random.default_rng(3)
    n = 2_000_000
    tri = transition_probs(params)
    out = simulate_symbols(params, np.zeros(n, dtype=np.uint8), rng)
    demp = float((out == 1).mean())
    eemp = float((out == ERASE).mean())
    assert abs(demp - tri.delta) < 4 * math.sqrt(tri.delta / n)
    assert abs(eemp - tri.eps) < 4 * math.sqrt(tri.eps / n)
    # mirror image for the other input
    out1 = simulate_symbols(params, np.ones(n, dtype=np.uint8), rng)
    d1 = float((out1 == 0).mean())
    assert abs(d1 - tri.delta) < 4 * math.sqrt(tri.delta / n)
    # T = 0 never erases
    out0 = simulate_symbols(ChannelParams(1.0, 0.0), np.zeros(1000, dtype=np.uint8), rng)
    assert not (out0 == ERASE).any()


def test_param_validation():
    with pytest.raises(ValueError):
        ChannelParams(0.0, 0.1)
    with pytest.raises(ValueError):
        ChannelParams(1.0, -0.1)
    assert math.isclose(db_to_lin(lin_to_db(2.5)), 2.5)
