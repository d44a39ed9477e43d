import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from instances import chord, pc, random_beta
from thindex import (Generator, GeneratorMatrix, MatrixGenerator, PCMultiplier as M,
                     Resolution, el, ext, ext_factors, ext_matrix_generator,
                     extension_equivalence_check, index_el_ext, index_matrix_op,
                     reduced_toeplitz_index, smb, verify_extension_factorization)

seeds = st.integers(0, 2**32 - 1)
FAST = Resolution(t_points=48, lambda_points=33)


def _kind(blk):
    """0, +-1 for multiples of the identity, else the expression's generators."""
    if blk is None:
        return 0
    c = blk.scalar_value()
    return c if c is not None else tuple(blk.generators())


def test_el_examples():
    g1, g2 = Generator(M.monomial(1), 0.0), Generator(M.constant(2.0), M.indicator(0.5, 2.0))
    assert list(el([[g1]]).terms) == [(1.0, (g1,))]
    assert [fs for _, fs in el([[g1], [g2]]).terms] == [(g1,), (g2,)]
    assert list(el([[g1, g2]]).terms) == [(1.0, (g1, g2))]


@pytest.mark.parametrize("h, r", [(1, 1), (2, 1), (1, 3), (3, 2)])
def test_extension_size(h, r):
    g = Generator(1.0, 0.0)
    beta = GeneratorMatrix([[g] * r for _ in range(h)])
    assert beta.size == h * (r + 1) + 1 == ext(beta).k


def test_ext_one_by_one_layout():
    g = Generator(M.indicator(1.0, 2.0), M.monomial(1))
    e = ext([[g]])
    kinds = [[_kind(b) for b in row] for row in e.blocks]
    assert kinds == [[1, (g,), 0], [0, 1, -1], [1, 0, 0]]


def test_ext_two_by_one_layout():
    g1, g2 = Generator(M.monomial(1), 0.0), Generator(M.monomial(2), 0.0)
    e = ext([[g1], [g2]])
    kinds = [[_kind(b) for b in row] for row in e.blocks]
    assert e.k == 5
    assert kinds[4] == [1, 1, 0, 0, 0]
    assert [row[4] for row in kinds] == [0, 0, -1, -1, 0]
    assert kinds[0][2] == (g1,) and kinds[1][3] == (g2,)


def test_rejects_ragged_and_mixed():
    g = Generator(1.0, 0.0)
    with pytest.raises(ValueError):
        GeneratorMatrix([[g, g], [g]])
    with pytest.raises(ValueError):
        GeneratorMatrix([])
    mg = MatrixGenerator([[M.constant(1.0)]], [[M.constant(1.0)]])
    with pytest.raises(TypeError):
        GeneratorMatrix([[g, mg]])


def test_identity_factorization_and_equivalence():
    beta = [[Generator(1.0, 0.0)]]
    assert verify_extension_factorization(beta, 2.0) < 1e-14
    rep = extension_equivalence_check(beta, 2.0)
    assert rep.agree and rep.el_singular == 0 and rep.ext_singular == 0
    d = np.linalg.det(ext(beta).interior(2.0, [0.4, 2.0], [0.0, -3.0]))
    assert np.allclose(np.abs(d), 1.0)


def test_chord_singular_in_both():
    beta = [[Generator(chord(), 0.0)]]
    rep = extension_equivalence_check(beta, 2.0, t_points=33, lambda_points=17)
    assert rep.agree and rep.el_singular > 0 and rep.ext_singular == rep.el_singular
    # the grid puts pi/2 and lambda = 0 on the grid
    _, r_ext = index_el_ext(beta, 2.0, FAST)
    assert not r_ext.fredholm


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_factorization_residual(seed):
    beta = random_beta(np.random.default_rng(seed))
    assert verify_extension_factorization(beta, 2.5, 16, 9) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_determinants_differ_by_sign(seed):
    # the outer factors are unipotent and the middle factor carries (-1)^r
    beta = random_beta(np.random.default_rng(seed))
    e, l = ext(beta), el(beta)
    th = np.array([0.3, 1.2, 2.9])
    lam = np.array([-1.0, 0.0, 4.0])
    d_ext = np.linalg.det(e.interior(1.7, th, lam))
    d_el = np.linalg.det(l.interior(1.7, th, lam))
    # on 2 x 2 blocks the sign appears squared
    assert np.allclose(d_ext, d_el, rtol=1e-9, atol=1e-12)
    for s in (1, -1):
        dz = np.linalg.det(e.endpoint(1.7, s, lam))
        assert np.allclose(dz, (-1.0) ** beta.r * l.endpoint(1.7, s, lam)[:, 0, 0],
                           rtol=1e-9, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_equivalence_and_index(seed):
    beta = random_beta(np.random.default_rng(seed))
    rep = extension_equivalence_check(beta, 2.0, 16, 9)
    assert rep.agree
    r_el, r_ext = index_el_ext(beta, 2.0, FAST)
    if r_el.fredholm and r_ext.fredholm:
        assert r_el.index == r_ext.index


def test_factors_multiply_blockwise():
    g1, g2 = Generator(M.monomial(1), 0.0), Generator(M.indicator(0.5, 2.5), M.monomial(-1))
    beta = GeneratorMatrix([[g1, g2]])
    lo, mid, up = ext_factors(beta)
    assert _kind(lo.blocks[-1][0]) == 1
    assert _kind(mid.blocks[-1][-1]) == (g1, g2)
    assert np.allclose(smb(mid.blocks[-1][-1], 2.0, 1.0, 0.3),
                       smb(el(beta), 2.0, 1.0, 0.3))


def test_matrix_generator_extension_matches_reduction():
    rng = np.random.default_rng(6)
    one = M.constant(1.0)
    compared = 0
    for _ in range(4):
        a, a2 = pc(rng, 2, 1.0, 1.5), pc(rng, 2, 1.0, 1.5)
        g1 = MatrixGenerator([[a]], [[one]])
        g2 = MatrixGenerator([[a2]], [[one]])
        big = ext_matrix_generator([[g1, g2]])
        assert big.k == 4
        r1 = index_matrix_op(big, 2.0, FAST)
        r2 = reduced_toeplitz_index(big, 2.0, FAST)
        if r1.fredholm and r2 is not None and r2.fredholm:
            assert r1.index == r2.index
            compared += 1
    assert compared > 0


def test_reduction_skips_non_constant_d():
    g = MatrixGenerator([[M.monomial(1)]], [[M.piecewise_linear([0.0, 3.0], [1.0, 2.0])]])
    assert reduced_toeplitz_index(g, 2.0) is None


def test_scalar_entries_refused_by_matrix_extension():
    with pytest.raises(TypeError):
        ext_matrix_generator([[Generator(1.0, 0.0)]])
    mg = MatrixGenerator([[M.constant(1.0)]], [[M.constant(1.0)]])
    with pytest.raises(TypeError):
        ext([[mg]])
    with pytest.raises(TypeError):
        el([[mg]])
