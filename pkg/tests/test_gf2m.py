import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eepc.gf2m import PRIMITIVE_POLY, Gf2m, gf2m_field


@pytest.mark.parametrize("nu", sorted(PRIMITIVE_POLY))
def test_tables_consistent(nu):
    f = gf2m_field(nu)
    # antilog[log[x]] = x for all nonzero x, and alpha^(2^nu - 1) = 1
    xs = np.arange(1, f.order)
    assert np.array_equal(f.exp[f.log[xs]], xs)
    assert f.alpha_pow(f.size) == 1


@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_field_axioms(a, b, c):
    f = gf2m_field(8)
    assert f.mul(a, b) == f.mul(b, a)
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
    assert f.mul(a, f.mul(b, c) ^ 0) ^ f.mul(a, 0) == f.mul(a, f.mul(b, c))


@given(st.integers(1, 255))
def test_inverses(a):
    f = gf2m_field(8)
    assert f.mul(a, f.inv(a)) == 1


@settings(max_examples=30)
@given(st.lists(st.integers(0, 15), min_size=1, max_size=5),
       st.lists(st.integers(0, 15), min_size=1, max_size=5),
       st.integers(0, 15))
def test_poly_mul_matches_eval(p, q, x):
    f = gf2m_field(4)
    lhs = f.poly_eval(f.poly_mul(p, q), x)
    assert lhs == f.mul(f.poly_eval(p, x), f.poly_eval(q, x))


def test_unsupported_nu():
    with pytest.raises(ValueError):
        Gf2m(17)
    with pytest.raises(ValueError):
        Gf2m(1)
