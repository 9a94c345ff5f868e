"""Closed test-function family and its membership oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from klab.errors import UndeterminedByPaper
from klab.geometry import ModelDomain
from klab.testfns import (f_space_membership_radial, kondratiev_membership,
                          make_test_function)


@pytest.fixture(scope="module")
def dom():
    return ModelDomain(2, 0)


def test_values_match_closed_form(dom):
    u = make_test_function(1.2, -0.7, 1.0, dom)
    # inside the plateau of the cutoff and below the distance cap the value
    # is exactly rho^beta (1 + |log rho|)^lambda with rho = |x|
    x = np.array([[0.03], [0.04]])
    r = 0.05
    expected = r ** 1.2 * (1 - math.log(r)) ** -0.7
    assert float(u(x)[0]) == pytest.approx(expected, rel=1e-12)


def test_cutoff_vanishes_far_away(dom):
    u = make_test_function(0.5, 0.0, 1.0, dom)
    x = np.array([[2.5], [0.0]])
    assert float(u(x)[0]) == 0.0


def test_jet_matches_finite_difference(dom):
    u = make_test_function(1.5, -0.7, 1.0, dom)
    x0 = np.array([0.21, -0.13])
    jet = u.jet(x0.reshape(2, 1), order=2)
    h = 1e-6
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        fd = (u((x0 + e).reshape(2, 1))[0]
              - u((x0 - e).reshape(2, 1))[0]) / (2 * h)
        alpha = tuple(1 if q == i else 0 for q in range(2))
        assert float(jet.derivative(alpha)[0]) == pytest.approx(
            float(fd), rel=1e-6, abs=1e-8)


def test_singular_point_raises(dom):
    from klab.errors import SingularPoint
    u = make_test_function(0.5, 0.0, 1.0, dom)
    with pytest.raises(SingularPoint):
        u(np.array([[0.0], [0.0]]))


def test_rescaled(dom):
    u = make_test_function(1.0, 0.0, 1.0, dom)
    v = u.rescaled(1)
    assert v.R == 0.5
    x = np.array([[0.1], [0.1]])
    assert float(v(x)[0]) == pytest.approx(float(u(x)[0]), rel=1e-12)


# --- Kondratiev membership oracle: rho^beta (1+|log rho|)^lam in K^m_{a,p} ---

@pytest.mark.parametrize("beta,lam,m,a,p,member", [
    (1.0, 0.0, 1, 0.5, 2.0, True),    # (beta-a)p + d = 3 > 0
    (0.5, 0.0, 1, 1.5, 2.0, False),   # exponent 0 at the boundary, lam = 0
    (0.5, -0.7, 1, 1.5, 2.0, True),   # boundary, lam p = -1.4 < -1
    (0.5, -0.4, 1, 1.5, 2.0, False),  # boundary, lam p = -0.8 >= -1
    (0.2, 0.0, 2, 2.0, 2.0, False),   # (beta-a)p + d = -1.6 < 0
    (2.0, 3.0, 1, 1.0, 2.0, True),    # positive exponent beats any log
])
def test_kondratiev_membership_table(beta, lam, m, a, p, member, dom):
    u = make_test_function(beta, lam, 1.0, dom)
    v = kondratiev_membership(u, m, a, p)
    assert v.member is member


def test_membership_uses_worst_log_power(dom):
    # derivatives lower the log power: boundary case governed by lam - 0
    u = make_test_function(1.0, -0.3, 1.0, dom)
    v = kondratiev_membership(u, 1, 2.0, 2.0)  # exponent (1-2)*2+2 = 0
    assert v.boundary_case
    assert not v.member  # -0.3 * 2 = -0.6 >= -1


@given(beta=st.floats(0.1, 3.0), a=st.floats(-1.0, 3.0),
       p=st.floats(1.1, 4.0))
@settings(max_examples=80, deadline=None)
def test_membership_monotone_in_weight(beta, a, p):
    # shrinking the weight parameter a never destroys membership
    u = make_test_function(beta, 0.0, 1.0, ModelDomain(2, 0))
    if kondratiev_membership(u, 1, a, p).member:
        assert kondratiev_membership(u, 1, a - 0.5, p).member


# --- radial F-space rule: s < (d - ell)/p + beta (Prop-style) ---

@pytest.mark.parametrize("beta,gamma,s,p,ell,d,member", [
    (0.5, 0.0, 1.0, 2.0, 0, 2, True),    # 1 < 1 + 0.5
    (0.0, 0.0, 1.0, 2.0, 0, 2, False),   # boundary with gamma = 0
    (0.0, 0.0, 2.0, 2.0, 0, 2, False),   # 2 > 1
    (1.0, 0.0, 1.0, 2.0, 1, 2, True),    # 1 < 0.5 + 1
])
def test_f_radial_rule(beta, gamma, s, p, ell, d, member):
    v = f_space_membership_radial(beta, gamma, s, p, ell, d)
    assert v.member is member


def test_f_radial_boundary_negative_log_is_undetermined():
    with pytest.raises(UndeterminedByPaper):
        f_space_membership_radial(0.0, -0.7, 1.0, 2.0, 0, 2)


def test_to_json_round_trip(dom):
    u = make_test_function(1.2, -0.7, 0.5, dom)
    j = u.to_json()
    v = make_test_function(j["beta"], j["lambda"], j["R"],
                           ModelDomain(j["d"], j["ell"]))
    x = np.array([[0.05], [0.02]])
    assert float(v(x)[0]) == float(u(x)[0])
