import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
import scipy.special as sc
from scipy.integrate import quad
from hypothesis import given, strategies as st

from rootsharp.errors import DomainError
from rootsharp.quadrature import (QuadratureSpec, exp_graded_rule, gauss_jacobi_rule,
                                  integrate_1d, jacobi_moment, log_mapped_panel)

exps = st.floats(-0.9, 3.0)


def test_midpoint_rule():
    r = gauss_jacobi_rule(1)
    np.testing.assert_allclose(r.nodes, [0.0], atol=1e-15)
    np.testing.assert_allclose(r.weights, [2.0], rtol=1e-15)


def test_two_point_legendre():
    r = gauss_jacobi_rule(2)
    np.testing.assert_allclose(r.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-15)
    np.testing.assert_allclose(r.weights, [1.0, 1.0], rtol=1e-15)


@given(st.integers(1, 60), exps, exps)
def test_rule_vs_scipy(m, a, b):
    r = gauss_jacobi_rule(m, a, b)
    x, w = sc.roots_jacobi(m, a, b)
    np.testing.assert_allclose(r.nodes, x, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(r.weights, w, rtol=1e-10)


@given(st.integers(1, 60), exps, exps)
def test_rule_invariants(m, a, b):
    r = gauss_jacobi_rule(m, a, b)
    assert np.all(np.diff(r.nodes) > 0)
    assert r.weights.sum() == pytest.approx(jacobi_moment(a, b), rel=1e-12)
    np.testing.assert_allclose(r.one_minus + r.one_plus, 2.0, rtol=1e-15)
    np.testing.assert_allclose(np.exp(r.log_weights), r.weights, rtol=1e-13)


def test_rule_cached_and_read_only():
    r = gauss_jacobi_rule(12, 0.5, -0.5)
    assert gauss_jacobi_rule(12, 0.5, -0.5) is r
    with pytest.raises(ValueError):
        r.weights[0] = 1.0


def test_rule_cache_threads():
    keys = [(m, e, e) for m in range(3, 40) for e in (-0.5, 0.25)]
    with ThreadPoolExecutor(8) as ex:
        rules = list(ex.map(lambda k: gauss_jacobi_rule(*k), keys * 3))
    for k, r in zip(keys * 3, rules):
        assert r is gauss_jacobi_rule(*k)


@pytest.mark.parametrize("m,a,b", [(0, 0, 0), (4, -1.0, 0), (4, 0, -1.5)])
def test_rule_domain(m, a, b):
    with pytest.raises(DomainError):
        gauss_jacobi_rule(m, a, b)


def test_integrate_power_weight():
    res = integrate_1d(lambda u: np.ones_like(u), 0.0, 1.0, left_exp=-0.5)
    assert res.converged and res.value == pytest.approx(2.0, rel=1e-14)


def test_integrate_sine_via_jacobi():
    # int_0^pi sin = int_{-1}^{1} dv after v = cos(phi); k2 = 1 gives exponents 0
    res = integrate_1d(lambda v: np.ones_like(v), -1.0, 1.0, 0.0, 0.0)
    assert res.value == pytest.approx(2.0, rel=1e-15)


def test_integrate_unconverged_flag():
    spec = QuadratureSpec(nodes_per_dim=2, rel_tol=1e-14, max_refinements=1)
    res = integrate_1d(lambda u: np.cos(40 * u), 0.0, 3.0, spec=spec)
    assert not res.converged and res.error > 0


@given(st.floats(-0.8, 2.0), st.floats(-0.8, 2.0), st.floats(0.1, 5.0))
def test_integrate_affine_shift(le, re, w):
    f0 = lambda u: np.exp(-w * u) * np.cos(u)
    a = integrate_1d(f0, 0.0, 1.0, le, re)
    b = integrate_1d(lambda u: f0(u - 5.0), 5.0, 6.0, le, re)
    assert a.value == pytest.approx(b.value, rel=1e-11)


@given(st.floats(-0.8, 2.0), st.floats(0.1, 5.0))
def test_integrate_doubling_within_tol(le, w):
    spec = QuadratureSpec(nodes_per_dim=8, rel_tol=1e-8)
    f = lambda u: np.exp(-w * u)
    a = integrate_1d(f, 0.0, 2.0, le, 0.0, spec)
    b = integrate_1d(f, 0.0, 2.0, le, 0.0, QuadratureSpec(nodes_per_dim=16, rel_tol=1e-8))
    assert a.converged
    assert abs(a.value - b.value) <= 1e-8 * abs(a.value) + 1e-15


def test_integrate_matches_incomplete_gamma():
    k, x = 0.3, 2.5
    res = integrate_1d(lambda u: np.exp(-u), 0.0, x, k - 1.0, 0.0)
    assert res.value == pytest.approx(sc.gammainc(k, x) * sc.gamma(k), rel=1e-12)


@given(st.floats(0.05, 50.0), st.floats(-0.5, 2.0))
def test_log_mapped_panel_power(extent, e):
    # int_0^L d^e e^-d dd is a lower incomplete gamma
    d, lw = log_mapped_panel(extent, e, 40)
    val = np.sum(np.exp(lw + e * np.log(d) - d))
    ref = sc.gammainc(e + 1, extent) * sc.gamma(e + 1)
    assert val == pytest.approx(ref, rel=1e-7)


@pytest.mark.parametrize("length,rate", [(0.3, 2.0), (1.5, -4.0), (8.0, 0.7), (30.0, -3.0), (200.0, 5.0)])
@pytest.mark.parametrize("e", [-0.5, 0.0, 1.0])
def test_exp_graded_rule_beta_kernel(length, rate, e):
    # int_0^L e^{rate y} (y (L-y))^e dy; scipy's algebraic-weight quad as reference
    dlo, dhi, lw = exp_graded_rule(length, rate, e, e, 32)
    assert np.all(dlo >= 0) and np.all(dhi >= 0)
    np.testing.assert_allclose(dlo + dhi, length, rtol=1e-13)
    shift = max(rate * length, 0.0)
    val = np.sum(np.exp(lw + rate * dlo - shift + e * np.log(dlo) + e * np.log(dhi)))
    f = lambda y: math.exp(rate * y - shift)
    ref = quad(f, 0.0, length, weight="alg", wvar=(e, e), limit=400, epsabs=0, epsrel=1e-12)[0]
    assert val == pytest.approx(ref, rel=1e-6)
