import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eepc.batchdec import SyndromeLut, eaed_batch, pack_rows
from eepc.bch import make_code
from eepc.channel import ChannelParams, ChannelTriple, db_to_lin, transition_probs
from eepc.de import (
    BracketError,
    DeParams,
    de_step,
    gldpc_rho,
    noise_threshold,
    sc_de_step,
    sc_rho,
    t_opt_scan,
)
from eepc.distributions import weight_distribution
from eepc.transitions import eaed_table


@pytest.fixture(scope="module")
def table15(code15, tables15):
    return eaed_table(code15, tables15)


def test_zero_fixed_point(table15):
    out = de_step(table15, ChannelTriple(0.0, 0.0), np.array([0.0, 0.0]))
    assert out[0] == 0.0 and out[1] == 0.0
    rho, iters = gldpc_rho(table15, ChannelTriple(0.0, 0.0), DeParams())
    assert rho == 0.0 and iters == 1


probs = st.tuples(st.floats(0.0, 0.3), st.floats(0.0, 0.3))


@settings(max_examples=120, deadline=None)
@given(probs, probs)
def test_simplex_preserved(table15, chan_p, msg_p):
    chan = ChannelTriple(*chan_p)
    out = de_step(table15, chan, np.array(msg_p))
    assert 0.0 <= out[0] <= 1.0 and 0.0 <= out[1] <= 1.0
    assert out[0] + out[1] <= 1.0 + 1e-12
    # no erasures in implies no erasures out
    if chan.eps == 0.0:
        out0 = de_step(table15, chan, np.array([msg_p[0], 0.0]))
        assert out0[1] == 0.0


def test_step_vectorizes(table15):
    chan = ChannelTriple(0.01, 0.02)
    states = np.array([[0.0, 0.0], [0.01, 0.02], [0.2, 0.1]])
    batch = de_step(table15, chan, states)
    for i, s in enumerate(states):
        single = de_step(table15, chan, s)
        assert np.allclose(batch[i], single, atol=1e-15)


def test_contraction_above_threshold(code15, tables15):
    """Well above threshold one step shrinks the error rate from chi_c."""
    spec = make_code(6, 3)
    table = eaed_table(spec, weight_distribution(spec))
    chan = transition_probs(ChannelParams(db_to_lin(3.0), 0.0))
    out = de_step(table, chan, np.array([chan.delta, chan.eps]))
    assert out[0] < chan.delta


def test_de_step_matches_stochastic_oracle(code15, tables15, table15):
    """Monte-Carlo neighborhoods decoded by the real component decoder."""
    lut = SyndromeLut(code15)
    rng = np.random.default_rng(7)
    chan = ChannelTriple(0.02, 0.03)
    chi = np.array([0.04, 0.05])
    pred = de_step(table15, chan, chi)
    N = 2_000_000
    n = code15.n
    c1 = cq = 0
    for lo in range(0, N, 500_000):
        m = min(500_000, N - lo)
        u = rng.random((m, n))
        val = np.zeros((m, n), dtype=np.uint8)
        er = np.zeros((m, n), dtype=np.uint8)
        val[:, 0] = u[:, 0] < chan.delta
        er[:, 0] = (u[:, 0] >= chan.delta) & (u[:, 0] < chan.delta + chan.eps)
        val[:, 1:] = u[:, 1:] < chi[0]
        er[:, 1:] = (u[:, 1:] >= chi[0]) & (u[:, 1:] < chi[0] + chi[1])
        val &= ~er.astype(bool)
        ov, oe = eaed_batch(lut, pack_rows(val), pack_rows(er), rng)
        c1 += int(((ov & np.uint64(1)) & ~(oe & np.uint64(1))).sum())
        cq += int((oe & np.uint64(1)).sum())
    for pred_p, emp in ((pred[0], c1 / N), (pred[1], cq / N)):
        sigma = np.sqrt(pred_p * (1 - pred_p) / N)
        assert abs(pred_p - emp) < 4 * sigma


def test_sc_reduces_to_uncoupled(table15):
    """With every group equal and the boundary unpinned, the coupled step
    equals the uncoupled recursion in every group."""
    chan = ChannelTriple(0.02, 0.01)
    chi = np.array([0.03, 0.02])
    state = np.tile(chi, (34, 1))
    out = sc_de_step(table15, chan, state)
    expect = de_step(table15, chan, chi)
    assert np.allclose(out[1:33], expect, atol=1e-15)


def test_sc_pinned_boundary_stays_pinned(table15):
    chan = ChannelTriple(0.02, 0.01)
    state = np.tile([chan.delta, chan.eps], (34, 1))
    state[0] = 0.0
    out = sc_de_step(table15, chan, state)
    assert out[0, 0] == 0.0 and out[0, 1] == 0.0


def test_sc_noiseless_converges_immediately(table15):
    rho, iters = sc_rho(table15, ChannelTriple(0.0, 0.0), DeParams())
    assert rho == 0.0 and iters == 1


def test_decoding_wave_ordering(cache_dir):
    """Below threshold the wave clears group 1 before group 10."""
    spec = make_code(6, 3, "shortened-plain")  # (62,44,3)
    from eepc.transitions import cached_table

    table = cached_table(spec, weight_distribution(spec), "eaed", cache_dir)
    params = DeParams()
    thr = noise_threshold(table, 0.0, params, ensemble="staircase")["esn0_star_db"]
    chan = transition_probs(ChannelParams(db_to_lin(thr + 0.05), 0.0))
    state = np.tile([chan.delta, chan.eps], (34, 1))
    state[0] = 0.0
    done = {}
    for it in range(1, params.max_iters):
        state = sc_de_step(table, chan, state)
        for g in (1, 10):
            if g not in done and state[g, 0] + 0.5 * state[g, 1] < 1e-8:
                done[g] = it
        if len(done) == 2:
            break
    assert done[1] < done[10]


def test_threshold_bisection_and_bracket(code15, tables15, table15):
    params = DeParams(bisect_db=0.01, bracket_db=(-2.0, 8.0))
    res = noise_threshold(table15, 0.0, params)
    assert res["bracket_hi_db"] - res["bracket_lo_db"] <= 0.01 + 1e-12
    # (15,7,2) product threshold sits inside the default bracket
    assert -2.0 < res["esn0_star_db"] < 8.0
    with pytest.raises(BracketError):
        noise_threshold(table15, 0.0, DeParams(bracket_db=(-2.0, -1.9), max_iters=200))


def test_scan_requires_zero(table15):
    with pytest.raises(ValueError):
        t_opt_scan(table15, np.array([0.01, 0.02]), DeParams())


def test_scan_gain_nonnegative_and_checkpointable(table15):
    params = DeParams(bisect_db=5e-3)
    scan = t_opt_scan(table15, np.array([0.0, 0.05, 0.1]), params, refine_tol=0.05)
    assert scan["gain_db"] >= 0.0
    assert scan["points"][0][0] == 0.0
    # precomputed points short-circuit re-evaluation
    pre = dict(scan["points"])
    scan2 = t_opt_scan(table15, np.array([0.0, 0.05, 0.1]), params, refine_tol=0.05,
                       precomputed=pre)
    assert scan2["t_opt"] == scan["t_opt"]
    assert scan2["gain_db"] == pytest.approx(scan["gain_db"], abs=1e-12)
