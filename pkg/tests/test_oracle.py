import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from instances import banded, laurent
from thindex import (BandedSpec, Generator, OracleError, PCMultiplier as M, T, TH, compact,
                     hankel_entry, identity, product_identity_check, index_TH,
                     index_toeplitz_circle, laurent_index_oracle, laurent_kernel_oracle,
                     rank_deficiency, toeplitz_entry, truncate)

seeds = st.integers(0, 2**32 - 1)
t = M.monomial


def test_shift_entries():
    a = t(1)
    assert toeplitz_entry(a, 1, 0) == 1
    assert all(toeplitz_entry(a, j, 0) == 0 for j in (0, 2, 3, 7))
    assert hankel_entry(a, 0, 0) == 1
    assert all(hankel_entry(a, j, k) == 0 for j in range(4) for k in range(4) if j + k)


def test_half_circle_indicator_diagonal():
    chi = M.indicator(0.0, math.pi)
    for j in range(5):
        assert toeplitz_entry(chi, j, j) == pytest.approx(0.5, abs=1e-15)


def test_truncate_identity():
    tm = truncate(identity(), 4)
    assert np.array_equal(tm.matrix, np.eye(4)) and tm.exact


def test_truncate_shift_product():
    want = np.eye(8)
    want[0, 0] = 0
    tm = truncate(T(t(1)) * T(t(-1)), 8, margin=1)
    assert tm.exact and np.allclose(tm.matrix, want, atol=0)
    # without margin the section of the product is not the product of sections
    assert not truncate(T(t(1)) * T(t(-1)), 8, margin=0).exact


def test_truncate_banded_matches_entries():
    rng = np.random.default_rng(1)
    a, b = banded(rng, 3), banded(rng, 2)
    tm = truncate(TH(a, b), 10)
    want = np.array([[toeplitz_entry(a, j, k) + hankel_entry(b, j, k) for k in range(10)]
                     for j in range(10)])
    assert np.array_equal(tm.matrix, want) and tm.exact


def test_truncate_piecewise_reports_tail():
    tm = truncate(T(M.indicator(0.0, math.pi)) * T(M.indicator(1.0, 3.0)), 12, margin=20)
    assert not tm.exact and 0 < tm.tail_bound < math.inf


def test_truncate_errors():
    with pytest.raises(ValueError):
        truncate(identity(), 0)
    with pytest.raises(ValueError):
        truncate(T(t(1)) + compact(), 4)


def test_laurent_examples():
    assert laurent_index_oracle({1: 1}) == -1
    assert laurent_index_oracle({0: 2, 1: 1}) == 0
    assert laurent_index_oracle({-1: 1}) == 1
    assert laurent_index_oracle(t(3)) == -3
    assert laurent_index_oracle(BandedSpec({0: 5})) == 0


def test_laurent_rejects_near_circle():
    with pytest.raises(OracleError):
        laurent_index_oracle({0: 1, 1: 1})
    with pytest.raises(OracleError):
        laurent_index_oracle({0: 1 + 5e-7, 1: 1})
    with pytest.raises(ValueError):
        BandedSpec({0: 0})
    with pytest.raises(OracleError):
        laurent_index_oracle(M.indicator(0.0, 1.0))
    with pytest.raises(TypeError):
        laurent_index_oracle([1, 2])


def test_rank_deficiency_examples():
    assert rank_deficiency(np.eye(6)) == 0
    assert rank_deficiency(np.zeros((5, 5))) == 5
    assert rank_deficiency(truncate(T(t(1)), 8)) == 1


@pytest.mark.parametrize("n", range(-5, 6))
def test_shift_family_deficiency(n):
    tm = truncate(T(t(n)), 32)
    assert rank_deficiency(tm) == abs(n)
    assert index_TH(T(t(n)), 2.0).index == -n


def test_product_identity_examples():
    one = M.constant(1.0)
    assert product_identity_check(one, one, 4) == 0.0
    assert product_identity_check(t(1), t(-1), 16) <= 1e-14
    assert product_identity_check(t(1), t(-1), 16, "hankel") <= 1e-14
    with pytest.raises(ValueError):
        product_identity_check(t(2), t(-2), 16)
    with pytest.raises(OracleError):
        product_identity_check(M.indicator(0.0, 1.0), one, 16)
    with pytest.raises(ValueError):
        product_identity_check(t(1), t(1), 16, "other")


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_product_identities_on_random_banded(seed):
    rng = np.random.default_rng(seed)
    a, b = banded(rng, int(rng.integers(0, 5))), banded(rng, int(rng.integers(0, 5)))
    for which in ("product", "hankel"):
        assert product_identity_check(a, b, 64, which) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([1.5, 2.0, 3.0]))
def test_circle_index_matches_root_count(seed, p):
    c, want = laurent(np.random.default_rng(seed))
    assert index_toeplitz_circle(M.trig_poly(c), p).index == want


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_kernel_oracle_agrees_with_root_count(seed):
    c, want = laurent(np.random.default_rng(seed))
    try:
        ker, coker = laurent_kernel_oracle(c)
    except OracleError:
        return
    assert ker - coker == want and min(ker, coker) == 0


def test_kernel_oracle_examples():
    assert laurent_kernel_oracle({1: 1}) == (0, 1)
    assert laurent_kernel_oracle({-2: 1}) == (2, 0)
    assert laurent_kernel_oracle({0: 3, 1: 1}) == (0, 0)


def test_section_of_generator_with_hankel():
    # T(1) + H(t) has matrix I + e0 e0^T, invertible with index 0
    tm = truncate(Generator(1.0, t(1)), 6)
    want = np.eye(6)
    want[0, 0] = 2
    assert np.array_equal(tm.matrix, want) and rank_deficiency(tm) == 0
