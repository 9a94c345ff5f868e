"""Truncated-Taylor jet engine against finite differences and closed forms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from klab.jets import Jet, multi_indices, norm_jet


def fd_derivative(f, x, alpha, h=1e-5):
    """Central finite difference for a mixed partial d^alpha f at x (d,)."""
    x = np.asarray(x, dtype=float)
    if sum(alpha) == 0:
        return f(x)
    i = next(k for k, a in enumerate(alpha) if a > 0)
    lower = tuple(a - (1 if k == i else 0) for k, a in enumerate(alpha))
    e = np.zeros_like(x)
    e[i] = h
    return (fd_derivative(f, x + e, lower, h)
            - fd_derivative(f, x - e, lower, h)) / (2 * h)


def eval_jet(fjet, x, alpha, order=4):
    pts = np.asarray(x, dtype=float).reshape(-1, 1)
    return float(fjet(pts, order).derivative(alpha)[0])


def test_multi_indices_counts():
    # number of monomials of degree <= r in d variables is C(d+r, r)
    assert len(multi_indices(2, 4)) == math.comb(6, 4)
    assert len(multi_indices(3, 3)) == math.comb(6, 3)
    assert set(multi_indices(2, 1)) == {(0, 0), (1, 0), (0, 1)}
    assert list(multi_indices(2, 1))[0] == (0, 0)


def test_polynomial_derivatives_exact():
    # f(x, y) = x^2 y + 3 x y^3: all derivatives are exact rationals
    def fjet(pts, order):
        x, y = Jet.variables(pts, order)
        return x * x * y + x * y * y * y * 3.0

    x0 = (1.5, -2.0)
    assert eval_jet(fjet, x0, (0, 0)) == 1.5 ** 2 * -2.0 + 3 * 1.5 * (-8.0)
    assert eval_jet(fjet, x0, (1, 0)) == 2 * 1.5 * -2.0 + 3 * (-8.0)
    assert eval_jet(fjet, x0, (1, 1)) == 2 * 1.5 + 9 * 4.0
    assert eval_jet(fjet, x0, (0, 3)) == 18 * 1.5


@pytest.mark.parametrize("alpha", [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0),
                                   (2, 1), (0, 3)])
def test_transcendental_against_finite_differences(alpha):
    def f(x):
        return math.exp(0.3 * x[0]) * math.log(2.0 + x[1]) \
            + math.sqrt(4.0 + x[0] * x[1])

    def fjet(pts, order):
        x, y = Jet.variables(pts, order)
        t = x * 0.3
        exp_t = t.compose([np.exp(t.value)] * (order + 1))
        return exp_t * (y + 2.0).log() + (x * y + 4.0).sqrt()

    x0 = (0.7, 0.4)
    got = eval_jet(fjet, x0, alpha)
    h = 1e-5 if sum(alpha) <= 2 else 5e-3
    ref = fd_derivative(f, x0, alpha, h=h)
    assert got == pytest.approx(ref, rel=2e-4, abs=2e-4)


def test_reciprocal_and_power():
    pts = np.array([[0.8], [0.3]])
    x, y = Jet.variables(pts, 4)
    r = norm_jet([x, y])
    # |x|^-2 derivative oracle: d/dx (x^2+y^2)^-1 = -2x (x^2+y^2)^-2
    inv = (x * x + y * y).reciprocal()
    s = 0.8 ** 2 + 0.3 ** 2
    assert float(inv.derivative((1, 0))[0]) == pytest.approx(
        -2 * 0.8 / s ** 2, rel=1e-12)
    # r = sqrt(x^2+y^2); r.power(3) third derivative vs closed form in 1D cut
    p = r.power(1.5)
    assert float(p.value[0]) == pytest.approx(s ** 0.75, rel=1e-12)


def test_derivative_jet_extracts_sub_jet():
    pts = np.array([[0.5], [1.2]])
    x, y = Jet.variables(pts, 4)
    f = x * x * y * y  # d^(1,0) f = 2 x y^2
    g = f.derivative_jet((1, 0))
    assert g.order == 3
    assert float(g.value[0]) == pytest.approx(2 * 0.5 * 1.2 ** 2, rel=1e-13)
    # second derivative of the sub-jet equals the (1,2) derivative of f
    assert float(g.derivative((0, 2))[0]) == pytest.approx(
        float(f.derivative((1, 2))[0]), rel=1e-13)


def test_compose_chain_rule():
    # h(t) = sin(t) composed with t(x,y) = x*y at (0.6, 0.9)
    pts = np.array([[0.6], [0.9]])
    x, y = Jet.variables(pts, 3)
    t = x * y
    derivs = [np.sin(t.value), np.cos(t.value), -np.sin(t.value),
              -np.cos(t.value)]
    h = t.compose(derivs)
    # d^2/dxdy sin(xy) = cos(xy) - xy sin(xy)
    v = 0.54
    assert float(h.derivative((1, 1))[0]) == pytest.approx(
        math.cos(v) - v * math.sin(v), rel=1e-12)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2),
       st.floats(-2, 2))
@settings(max_examples=50, deadline=None)
def test_product_rule_property(a, b, c, e):
    # (fg)' = f'g + fg' for arbitrary quadratics, all derivatives to order 2
    pts = np.array([[0.3], [-0.7]])
    x, y = Jet.variables(pts, 2)
    f = x * a + y * b + 1.0
    g = x * c + y * e + 2.0
    fg = f * g
    for alpha in [(1, 0), (0, 1)]:
        lhs = float(fg.derivative(alpha)[0])
        rhs = float(f.derivative(alpha)[0]) * float(g.value[0]) \
            + float(f.value[0]) * float(g.derivative(alpha)[0])
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


def test_vectorized_matches_scalar_loop():
    pts = np.linspace(0.1, 1.9, 7).reshape(1, -1)
    x, = Jet.variables(pts, 4)
    f = (x * x + 1.0).log()
    for i in range(7):
        xi, = Jet.variables(pts[:, i:i + 1], 4)
        fi = (xi * xi + 1.0).log()
        assert float(fi.derivative((3,))[0]) == pytest.approx(
            float(f.derivative((3,))[i]), rel=1e-13)
