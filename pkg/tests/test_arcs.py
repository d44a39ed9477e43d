import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thindex.arcs import Exponent, conjugate_exponent, lambda_from_unit, lambda_grid, mu, nu

P_GRID = [1.2, 1.5, 2.0, 3.0, 7.0]
finite_lam = st.floats(-30, 30, allow_nan=False)
exponents = st.floats(1.2, 7.0)
wide_exponents = st.floats(1.01, 100.0)


def mu_direct(p, lam):
    z = math.pi * (lam + 1j / p)
    return (1 + cmath.cosh(z) / cmath.sinh(z)) / 2


def nu_direct(p, lam):
    return 1 / (2j * cmath.sinh(math.pi * (lam + 1j / p)))


@pytest.mark.parametrize("p, q", [(2, 2), (4, 4 / 3), (1.5, 3)])
def test_conjugate_exponent_values(p, q):
    assert conjugate_exponent(p) == pytest.approx(q, rel=1e-14)
    assert 1 / p + 1 / conjugate_exponent(p) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("p", [1.0, 0.5, -2.0, math.inf, math.nan])
def test_conjugate_exponent_rejects(p):
    with pytest.raises(ValueError):
        conjugate_exponent(p)
    with pytest.raises(ValueError):
        Exponent(p)


def test_exponent_type():
    e = Exponent(3.0)
    assert e.q == pytest.approx(1.5)


def test_mu_fixed_values():
    assert mu(2, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert mu(2, 1.0) == pytest.approx(0.9981360381, abs=1e-10)
    assert abs(mu(2, 1.0).imag) < 1e-15
    for p in P_GRID:
        assert mu(p, math.inf) == 1.0
        assert mu(p, -math.inf) == 0.0


def test_nu_fixed_values():
    assert nu(2, 0.0) == pytest.approx(-0.5, abs=1e-15)
    for p in P_GRID:
        assert nu(p, math.inf) == 0.0
        assert nu(p, -math.inf) == 0.0
    assert nu(3, 0.4) ** 2 == pytest.approx(mu(3, 0.4) * (1 - mu(3, 0.4)), abs=1e-13)


@pytest.mark.parametrize("p", P_GRID)
def test_mu_at_zero_passes_through_cot_point(p):
    assert abs(mu(p, 0.0) - (1 - 1j / math.tan(math.pi / p)) / 2) < 1e-12


@given(exponents, finite_lam)
def test_mu_nu_match_direct_formulas(p, lam):
    if abs(lam) < 10:
        assert abs(mu(p, lam) - mu_direct(p, lam)) < 1e-12 * max(1, abs(mu_direct(p, lam)))
        assert abs(nu(p, lam) - nu_direct(p, lam)) < 1e-12 * max(1, abs(nu_direct(p, lam)))


@given(exponents, finite_lam)
def test_reflection_identities(p, lam):
    q = conjugate_exponent(p)
    assert abs(mu(p, -lam) + mu(q, lam) - 1) < 1e-12
    assert abs(nu(p, -lam) - nu(q, lam)) < 1e-12


@given(exponents, finite_lam)
def test_nu_square_identity(p, lam):
    q = conjugate_exponent(p)
    m = mu(q, lam)
    assert abs(nu(q, lam) ** 2 - m * (1 - m)) < 1e-12


@given(wide_exponents, finite_lam)
def test_identities_relative_for_extreme_exponents(p, lam):
    # near p = 1 the arc functions grow like 1/(p - 1); compare relatively
    q = conjugate_exponent(p)
    m, n = mu(q, lam), nu(q, lam)
    scale = max(1.0, abs(m) ** 2, abs(n) ** 2)
    assert abs(n ** 2 - m * (1 - m)) < 1e-12 * scale
    assert abs(mu(p, -lam) + mu(q, lam) - 1) < 1e-12 * max(1.0, abs(m))


def test_large_arguments_do_not_overflow():
    lam = np.array([-1e6, -50.0, -14.5, 14.5, 50.0, 1e6])
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        m, n = mu(1.3, lam), nu(1.3, lam)
    assert np.all(np.isfinite(m)) and np.all(np.isfinite(n))
    assert abs(m[0]) < 1e-30 and abs(m[-1] - 1) < 1e-30
    assert np.all(np.abs(n[[0, -1]]) < 1e-30)


def test_arrays_keep_shape():
    lam = np.linspace(-2, 2, 12).reshape(3, 4)
    assert mu(2.5, lam).shape == (3, 4)
    assert nu(2.5, lam).shape == (3, 4)


def _curve_coordinates(p, lam):
    # mu on lam <= 0 and the exact complement 1 - mu_p(lam) = mu_q(-lam) on
    # lam > 0: far in the right tail mu itself rounds to 1.0 in double
    # precision.  Beyond |pi lam| = 45 both return their limits exactly.
    q = conjugate_exponent(p)
    lam = lam[np.abs(np.pi * lam) <= 45.0]
    left = lam <= 0
    return mu(p, lam[left]), mu(q, -lam[~left])


def test_mu2_real_and_increasing():
    lam = lambda_grid(201)
    assert np.max(np.abs(mu(2.0, lam).imag)) < 1e-15
    inc, comp = _curve_coordinates(2.0, lam)
    assert np.all(np.diff(inc.real) > 0)
    assert np.all(np.diff(comp.real) < 0)
    assert np.all(np.diff(mu(2.0, lambda_grid(15)).real) > 0)


@pytest.mark.parametrize("p", P_GRID)
def test_mu_traces_simple_curve(p):
    lam = lambda_grid(129)
    m = mu(p, lam)
    assert m[0] == 0 and m[-1] == 1
    for part in _curve_coordinates(p, lam):
        d = np.abs(part[:, None] - part[None, :]) + np.eye(len(part))
        assert np.min(d) > 0
    small = mu(p, lambda_grid(15))
    d = np.abs(small[:, None] - small[None, :]) + np.eye(len(small))
    assert np.min(d) > 0


def test_lambda_grid_examples():
    g = lambda_grid(2)
    assert g[0] == -math.inf and g[-1] == math.inf
    assert g[1:3] == pytest.approx([math.tan(-math.pi / 6), math.tan(math.pi / 6)])
    assert lambda_grid(3)[2] == pytest.approx(0.0, abs=1e-15)
    for n in (2, 5, 64):
        g = lambda_grid(n)
        assert len(g) == n + 2 and np.all(np.diff(g) > 0)
    with pytest.raises(ValueError):
        lambda_grid(1)


def test_lambda_from_unit_endpoints():
    assert lambda_from_unit(0.0) == -math.inf
    assert lambda_from_unit(1.0) == math.inf
    assert lambda_from_unit(0.5) == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=50)
@given(st.sampled_from(P_GRID))
def test_arc_endpoints_are_exact(p):
    q = conjugate_exponent(p)
    assert mu(q, -math.inf) == 0 and mu(q, math.inf) == 1 and nu(q, math.inf) == 0
