import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eepc.bch import make_code
from eepc.distributions import (
    _dual_generator_matrix,
    _generator_matrix,
    _weight_histogram,
    biweight_approx,
    even_weight_distribution,
    export_weight_csv,
    fixed_position_biweight,
    fixed_position_count,
    fixed_position_weight,
    log_biweight,
    macwilliams,
    shortened_distribution,
    weight_distribution,
)
from oracle_tools import all_codewords


def test_hamming_7_4():
    wt = weight_distribution(make_code(3, 1))
    assert tuple(int(c) for c in wt.counts) == (1, 0, 0, 7, 7, 0, 0, 1)


def test_exact_total_and_dmin_gap(code15, tables15):
    counts = tables15.counts
    assert sum(counts) == 2**code15.k
    assert counts[0] == 1
    assert all(counts[b] == 0 for b in range(1, code15.d_des))


def test_dual_route_matches_direct(code15, tables15):
    dual_hist = _weight_histogram(_dual_generator_matrix(code15.genpoly, code15.n))
    via_dual = macwilliams(dual_hist, code15.n)
    assert tuple(via_dual) == tuple(int(c) for c in tables15.counts)
    # MacWilliams round-trip recovers the dual distribution
    back = macwilliams([int(c) for c in tables15.counts], code15.n)
    assert back == [int(c) for c in dual_hist]


def test_even_distribution(code15, tables15):
    ev = even_weight_distribution(tables15)
    assert all(ev.counts[b] == 0 for b in range(1, code15.n + 1, 2))
    assert sum(ev.counts) == 2 ** (code15.k - 1)
    direct = weight_distribution(make_code(4, 2, "even"))
    assert tuple(direct.counts) == tuple(ev.counts)


def test_shortened_formula_matches_enumeration(code15, tables15):
    sh = shortened_distribution(tables15)
    spec14 = make_code(4, 2, "shortened-plain")
    hist = np.bincount(all_codewords(spec14).sum(axis=1), minlength=spec14.n + 1)
    assert tuple(int(h) for h in hist) == tuple(sh.counts)
    assert sum(sh.counts) == 2 ** (code15.k - 1)
    assert sh.counts[0] == 1


def test_fixed_position_exact(code15, tables15):
    """Cyclic fixed-position counts match exhaustive enumeration exactly."""
    cws = all_codewords(code15)
    for k in (0, 3, 14):
        for alpha in (0, 1):
            for b1 in range(code15.n + 1):
                exact = int(((cws.sum(axis=1) == b1) & (cws[:, k] == alpha)).sum())
                assert fixed_position_count(tables15, alpha, b1) == exact
                assert math.isclose(
                    fixed_position_weight(tables15, alpha, b1), exact, abs_tol=1e-9
                )


@given(st.integers(0, 15))
def test_fixed_position_split(tables15, b1):
    a0 = fixed_position_weight(tables15, 0, b1)
    a1 = fixed_position_weight(tables15, 1, b1)
    assert math.isclose(a0 + a1, float(tables15.counts[b1]), abs_tol=1e-9)


def test_biweight_identity(code15, tables15):
    for b1 in range(code15.n + 1):
        val = biweight_approx(tables15, b1, 0, 0, code15.n - b1)
        assert math.isclose(val, float(tables15.counts[b1]), abs_tol=1e-9)
        # c1 = all-zero pairs with every codeword of weight w2
        val = biweight_approx(tables15, 0, 0, b1, code15.n - b1)
        assert math.isclose(val, float(tables15.counts[b1]), abs_tol=1e-9)


def test_biweight_approx_error_characterized(code15, tables15):
    """Relative error of the analytical approximation on (15,7,2) against
    brute-force pair enumeration (characterization; the bound is loose)."""
    cws = all_codewords(code15)
    pairs: dict[tuple, int] = {}
    for c1 in cws:
        b11 = ((c1 == 1) & (cws == 1)).sum(axis=1)
        b10 = int(c1.sum()) - b11
        b01 = cws.sum(axis=1) - b11
        for x, y, z in zip(b11, b10, b01):
            key = (int(x), int(y), int(z), code15.n - int(x) - int(y) - int(z))
            pairs[key] = pairs.get(key, 0) + 1
    rel = []
    for cfg, cnt in pairs.items():
        approx = biweight_approx(tables15, *cfg)
        rel.append(abs(approx - cnt) / cnt)
    rel = np.array(rel)
    print(f"\nbiweight approximation on (15,7,2): median rel err {np.median(rel):.3f}, "
          f"max {rel.max():.3f} over {len(pairs)} configurations")
    assert np.isfinite(rel).all()
    assert np.median(rel) < 1.0
    # the exact-mode accessor reproduces the enumeration exactly
    for cfg, cnt in pairs.items():
        assert math.isclose(float(np.exp(log_biweight(tables15, *cfg))), cnt, rel_tol=1e-12)


def test_biweight_index_sum_mismatch(tables15):
    assert biweight_approx(tables15, 1, 1, 1, 1) == 0.0
    assert np.isneginf(log_biweight(tables15, 5, 5, 5, 5))


def test_fixed_position_biweight(code15, tables15):
    # consistency with the fixed-position weight distribution
    for b1 in range(code15.n + 1):
        b = biweight_approx(tables15, b1, 0, 0, code15.n - b1)
        bk = fixed_position_biweight(b, code15.n, b1)
        assert math.isclose(bk, fixed_position_weight(tables15, 1, b1), abs_tol=1e-9)
    # splitting over the four position classes returns the total
    b = biweight_approx(tables15, 4, 2, 1, 8)
    parts = [fixed_position_biweight(b, code15.n, x) for x in (4, 2, 1, 8)]
    assert math.isclose(sum(parts), b, rel_tol=1e-12)


def test_binomial_approximation_for_long_code():
    spec = make_code(9, 3)
    wt = weight_distribution(spec)
    assert wt.mode == "binomial"
    for b1 in (7, 100, 255, 504):
        expect = -27 * math.log(2) + (
            math.lgamma(512) - math.lgamma(b1 + 1) - math.lgamma(512 - b1)
        )
        assert math.isclose(wt.logA[b1], expect, rel_tol=1e-12)
    assert wt.logA[0] == 0.0 and wt.logA[511] == 0.0
    assert np.isneginf(wt.logA[1:7]).all() and np.isneginf(wt.logA[505:511]).all()


def test_exact_mode_forced_error():
    with pytest.raises(ValueError):
        weight_distribution(make_code(9, 3), mode="exact")


def test_weight_csv_export(tmp_path, tables15):
    path = tmp_path / "weights.csv"
    export_weight_csv(tables15, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "b1,A"
    assert len(lines) == tables15.n + 2
    assert float(lines[1].split(",")[1]) == 1.0
