"""Closed-form radial test functions with exact derivatives and membership oracles.

The family is u(x) = rho(x)^beta * (1 + |log rho(x)|)^lam * zeta(|x|/R) with
rho the regularized distance to the singular set (valued in (0, 1], so
1 + |log rho| = 1 - log rho) and zeta the fixed C^4 radial cutoff that is 1 on
[0, 1] and 0 on [2, inf).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, SingularPoint, Unsupported, UndeterminedByPaper
from .geometry import regularized_distance_from_jets
from .jets import Jet
from .profiles import CUTOFF, MAX_ORDER

_BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class MembershipVerdict:
    """Exact classification of a radial-integral membership question.

    `critical_exponent` is the number whose sign (Kondratiev case) or whose
    comparison against the smoothness s (F-space case) decides membership;
    `boundary_case` marks the equality case, where the log power governs.
    """

    member: bool
    critical_exponent: float
    boundary_case: bool


def _radial_cutoff_jet(coords, R):
    """Jet of zeta(|x| / R) from coordinate jets.

    Points sitting exactly at the origin lie in the plateau zeta = 1; the
    squared radius is patched there so the square root stays differentiable
    (the outer derivatives vanish on the plateau, so the patch is exact).
    """
    q = None
    for c in coords:
        cc = c * c
        q = cc if q is None else q + cc
    at_zero = q.value == 0.0
    if np.any(at_zero):
        q = Jet(q.dim, q.order, [c.copy() for c in q.coeffs])
        q.coeffs[0][at_zero] = (R / 2.0) ** 2
        for c in q.coeffs[1:]:
            c[at_zero] = 0.0
    t = q.sqrt() * (1.0 / R)
    return t.compose(CUTOFF.derivs(t.value, t.order))


@dataclass(frozen=True)
class TestFunction:
    """u(x) = rho^beta (1 - log rho)^lam zeta(|x|/R) on the given domain."""

    beta: float
    lam: float
    R: float
    domain: object

    def __post_init__(self):
        if not self.R > 0:
            raise InvalidParams("cutoff radius R must be positive")

    # -- evaluation --------------------------------------------------------
    def jet_from_coords(self, coords):
        """Jet of u built from arbitrary coordinate jets (diffeo pullbacks)."""
        rho = regularized_distance_from_jets(coords, self.domain)
        if self.beta != 0.0:
            u = rho.power(self.beta)
        else:
            u = Jet.constant(1.0, rho.dim, rho.order, rho.value.shape)
        if self.lam != 0.0:
            one = Jet.constant(1.0, rho.dim, rho.order, rho.value.shape)
            u = u * (one - rho.log()).power(self.lam)
        return u * _radial_cutoff_jet(coords, self.R)

    def jet(self, x, order=MAX_ORDER):
        """Jet of u at points x of shape (d, n)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[0] != self.domain.d:
            x = x.T
        if order > MAX_ORDER:
            raise Unsupported(f"derivative order capped at {MAX_ORDER}")
        return self.jet_from_coords(Jet.variables(x, order))

    def __call__(self, x):
        return self.jet(x, order=0).value

    def eval_derivative(self, alpha, x):
        """Exact partial derivative d^alpha u at points x."""
        alpha = tuple(int(a) for a in alpha)
        order = sum(alpha)
        if order > MAX_ORDER:
            raise Unsupported(f"derivative order capped at {MAX_ORDER}")
        if len(alpha) != self.domain.d:
            raise InvalidParams("multi-index length must equal the dimension")
        return self.jet(x, order=order).derivative(alpha)

    # -- structure ----------------------------------------------------------
    def rescaled(self, k):
        """The function x -> u(2^k x), which is again a family member.

        Below the distance-cap knee rho(2^k x) = 2^k rho(x), so the rescaled
        function has the same (beta, lam) with cutoff radius R / 2^k.
        """
        return TestFunction(self.beta, self.lam, self.R / 2.0 ** k, self.domain)

    def to_json(self):
        return {"beta": self.beta, "lambda": self.lam, "R": self.R,
                "d": self.domain.d, "ell": self.domain.ell}


def make_test_function(beta, lam, R, domain):
    return TestFunction(float(beta), float(lam), float(R), domain)


# ---------------------------------------------------------------------------
# Membership oracles
# ---------------------------------------------------------------------------

def classify_radial_exponent(e, g, p):
    """Finiteness of int_0^R t^(e-1) (1 + |log t|)^(g*p) dt as a verdict.

    Finite iff e > 0, or e = 0 with g*p < -1 (the equality case is governed
    by the log power).
    """
    boundary = abs(e) <= _BOUNDARY_TOL
    if boundary:
        member = g * p < -1.0
    else:
        member = e > 0.0
    return MembershipVerdict(bool(member), float(e), bool(boundary))


def kondratiev_membership(u, m, a, p):
    """Membership of u in K^m_a,p by the exact radial exponent rule.

    Every term of the weighted norm reduces to the 1D integral
    int_0^R t^((beta-a)p + (d-ell) - 1) (1 + |log t|)^(g p) dt with log power
    g in {lam - m, ..., lam}; the worst (largest) g governs the boundary case.
    """
    if not (0 < p < np.inf):
        raise InvalidParams("p must lie in (0, inf)")
    if m > MAX_ORDER:
        raise Unsupported(f"derivative order capped at {MAX_ORDER}")
    d, ell = u.domain.d, u.domain.ell
    e = (u.beta - a) * p + (d - ell)
    worst_g = max(u.lam - j for j in range(int(m) + 1))
    return classify_radial_exponent(e, worst_g, p)


def f_space_membership_radial(beta, gamma, s, p, ell, d):
    """Membership of |x''|^beta (1+|log|x''||)^gamma zeta in F^s_{p,2}.

    Member iff s < (d - ell)/p + beta, or equality with gamma*p < -1.  The
    log-case rule is only stated for gamma >= 0; negative gamma in the
    equality case is outside the proved range.
    """
    if not (0 < p < np.inf):
        raise InvalidParams("p must lie in (0, inf)")
    crit = (d - ell) / p + beta
    boundary = abs(s - crit) <= _BOUNDARY_TOL
    if boundary and gamma < 0:
        raise UndeterminedByPaper(
            "equality case with negative log power is outside the proved range")
    if boundary:
        member = gamma * p < -1.0  # unreachable for gamma >= 0, p > 0
    else:
        member = s < crit
    return MembershipVerdict(bool(member), float(crit), bool(boundary))
