"""Quadrature engine and norm evaluators.

All integrals are computed by per-cube tensor Gauss-Legendre rules over a
Whitney cover; the cover itself grades the nodes toward the singular set
(cubes of level j have side 2^-j).  Truncated integrals over {dist > eps}
are realized by summing levels j with 2^-j >= eps, which yields monotone
truncation ladders for nonnegative integrands.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import InvalidParams, Unsupported
from .jets import Jet, multi_indices
from .profiles import MAX_ORDER
from .testfns import TestFunction

FINITE = "Finite"
DIVERGENT = "Divergent"
INCONCLUSIVE = "Inconclusive"

DEFAULT_NODES = 8          # Gauss-Legendre nodes per dimension per cube
CAUCHY_REL_TOL = 1e-3      # three consecutive relative increments below this
TRUNCATION_K_MIN = 4       # coarsest truncation eps = 2^-4
TAIL_SHARE_LIMIT = 0.10    # localized-norm tail diagnostic threshold


@dataclass(frozen=True)
class SpaceParams:
    """Parameter bundle (m, a, p, tau, q=2) over a d-dimensional domain with
    an ell-dimensional (model) or delta-dimensional (polygon) singular set."""

    m: int
    a: float
    p: float
    d: int
    ell: int
    tau: float = None
    q: int = 2

    @property
    def sigma(self):
        """sigma_{tau,2} = d (1/min(1, tau) - 1)."""
        t = self.p if self.tau is None else self.tau
        return self.d * (1.0 / min(1.0, t) - 1.0)


@dataclass
class NormValue:
    value: float
    truncations: list = field(default_factory=list)  # (eps, partial norm)
    classification: str = INCONCLUSIVE
    quadrature_order: int = DEFAULT_NODES

    def to_json(self):
        return {"value": self.value,
                "truncations": [[e, v] for e, v in self.truncations],
                "classification": self.classification,
                "quadratureOrder": self.quadrature_order}


# ---------------------------------------------------------------------------
# Quadrature primitives
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _gauss_nodes(n):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=None)
def _tensor_rule(d, n):
    """Tensor-product rule on the unit cube: nodes (d, n^d), weights (n^d,)."""
    x, w = _gauss_nodes(n)
    grids = np.meshgrid(*([x] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids])
    wts = np.ones(n ** d)
    for g in np.meshgrid(*([w] * d), indexing="ij"):
        wts = wts * g.ravel()
    return pts, wts


def level_nodes(cover, j, nodes_per_dim=DEFAULT_NODES, doubled=False):
    """Quadrature nodes and weights for all level-j cubes of a cover.

    With doubled=True the rule covers the doubled cubes 2Q instead.
    Returns (points (d, N), weights (N,)); empty arrays for empty levels.
    """
    ks = cover.levels[j]
    d = ks.shape[1] if ks.ndim == 2 else len(cover.box[0])
    if not len(ks):
        return np.zeros((d, 0)), np.zeros(0)
    unit, wts = _tensor_rule(d, nodes_per_dim)
    side = 2.0 ** -j
    if doubled:
        low, width = (ks - 0.5) * side, 2.0 * side
    else:
        low, width = ks * side, side
    pts = low.T[:, :, None] + width * unit[:, None, :]          # (d, N, n^d)
    w = np.broadcast_to(wts * width ** d, (len(ks), len(wts)))
    return pts.reshape(d, -1), w.reshape(-1)


def integral_ladder(cover, integrand, nodes_per_dim=DEFAULT_NODES):
    """Truncated integrals sum_{j <= k} int_{level-j cubes} integrand dx.

    Returns a list of (eps_k, partial integral) with eps_k = 2^-k running
    from 2^-TRUNCATION_K_MIN down to 2^-j_max, plus the per-level totals.
    """
    per_level = {}
    for j in sorted(cover.levels):
        pts, wts = level_nodes(cover, j, nodes_per_dim)
        per_level[j] = float(np.sum(integrand(pts) * wts)) if wts.size else 0.0
    j_max = max(per_level)
    ladder, running = [], 0.0
    for j in sorted(per_level):
        running += per_level[j]
        if j >= TRUNCATION_K_MIN:
            ladder.append((2.0 ** -j, running))
    if not ladder:
        ladder.append((2.0 ** -j_max, running))
    return ladder, per_level


def classify_truncations(truncations, oracle_member=None):
    """Cauchy classification of a (rooted) truncation ladder.

    Finite if the last three relative increments are all below 1e-3;
    Divergent if the increments fail that test and an analytic oracle says
    the integral diverges; Inconclusive otherwise.
    """
    vals = [v for _, v in truncations]
    rel = [(vals[i] - vals[i - 1]) / vals[i] if vals[i] > 0 else 0.0
           for i in range(1, len(vals))]
    if len(rel) >= 3 and all(r < CAUCHY_REL_TOL for r in rel[-3:]):
        return FINITE
    if oracle_member is False:
        return DIVERGENT
    return INCONCLUSIVE


def _norm_value_from_powersum(ladder, root_exp, nodes_per_dim, oracle_member=None):
    truncs = [(e, v ** (1.0 / root_exp)) for e, v in ladder]
    return NormValue(value=truncs[-1][1], truncations=truncs,
                     classification=classify_truncations(truncs, oracle_member),
                     quadrature_order=nodes_per_dim)


def _rho_values(x, domain):
    from .geometry import regularized_distance
    return regularized_distance(x, domain)


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------

def weighted_lp_norm(u, w, p, cover, nodes_per_dim=DEFAULT_NODES,
                     oracle_member=None):
    """(int_{dist > eps} |rho^w u|^p dx)^{1/p} with full truncation ladder."""
    if not p > 0:
        raise InvalidParams("p must be positive")
    domain = cover.domain

    def integrand(x):
        rho = _rho_values(x, domain)
        vals = u(x) if not isinstance(u, TestFunction) else u(x)
        return np.abs(rho ** w * vals) ** p

    ladder, _ = integral_ladder(cover, integrand, nodes_per_dim)
    return _norm_value_from_powersum(ladder, p, nodes_per_dim, oracle_member)


def _derivative_power_sum(u, orders, weights_fn, p, cover, nodes_per_dim):
    """Ladder of sum over alpha in `orders` of int w_alpha |d^alpha u|^p."""
    domain = cover.domain
    max_o = max(sum(a) for a in orders)

    def integrand(x):
        jet = u.jet(x, order=max_o)
        rho = _rho_values(x, domain)
        total = np.zeros(x.shape[1])
        for alpha in orders:
            total += weights_fn(rho, alpha) * np.abs(jet.derivative(alpha)) ** p
        return total

    return integral_ladder(cover, integrand, nodes_per_dim)


def kondratiev_norm(u, params, cover, nodes_per_dim=DEFAULT_NODES,
                    oracle_member=None):
    """Weighted-Sobolev norm (sum_{|a|<=m} int |rho^{|a|-a} d^a u|^p)^{1/p}."""
    m, a, p = params.m, params.a, params.p
    if not 1 < p < np.inf:
        raise InvalidParams("p must lie in (1, inf)")
    if m > MAX_ORDER:
        raise Unsupported(f"derivative order capped at {MAX_ORDER}")
    orders = [al for al in multi_indices(params.d, m)]
    ladder, _ = _derivative_power_sum(
        u, orders, lambda rho, al: rho ** ((sum(al) - a) * p), p,
        cover, nodes_per_dim)
    return _norm_value_from_powersum(ladder, p, nodes_per_dim, oracle_member)


def sobolev_norm(u, m, p, cover, nodes_per_dim=DEFAULT_NODES,
                 oracle_member=None):
    """W^m_p norm (sum_{|a|<=m} ||d^a u||_p^p)^{1/p}; realizes F^m_{p,2}
    for 1 < p < inf."""
    if not 1 < p < np.inf:
        raise InvalidParams("p must lie in (1, inf)")
    if m > MAX_ORDER:
        raise Unsupported(f"derivative order capped at {MAX_ORDER}")
    d = len(cover.box[0])
    orders = [al for al in multi_indices(d, m)]
    ladder, _ = _derivative_power_sum(
        u, orders, lambda rho, al: 1.0, p, cover, nodes_per_dim)
    return _norm_value_from_powersum(ladder, p, nodes_per_dim, oracle_member)


def _piece_sobolev_power(u, pou, j, ks, m, tau, nodes_per_dim):
    """sum over level-j cubes of ||phi_{j,l} u | W^m_tau||^tau.

    Each piece is integrated on its doubled cube with a tensor rule; phi is
    bump/psi, well defined on the open doubled cube (psi >= own bump > 0).
    """
    cover = pou.cover
    d = len(cover.box[0])
    unit, wts = _tensor_rule(d, nodes_per_dim)
    side = 2.0 ** -j
    orders = multi_indices(d, m)
    total = 0.0
    for k in ks:
        low = (np.asarray(k) - 0.5) * side
        pts = low[:, None] + 2.0 * side * unit
        w = wts * (2.0 * side) ** d
        bump = pou.bump_jet(j, k, pts, order=m)
        psi = pou.psi_jet(pts, order=m)
        piece = (bump / psi) * u.jet(pts, order=m)
        power = 0.0
        for alpha in orders:
            power += float(np.sum(np.abs(piece.derivative(alpha)) ** tau * w))
        total += power ** 1.0  # one piece's ||.||_{W^m_tau}^tau
    return total


def kondratiev_piece_power(u, pou, j, k, m, a, p, nodes_per_dim=DEFAULT_NODES):
    """||phi_{j,k} u | K^m_{a,p}||^p for one cover cube, integrated on its
    doubled cube with the exact product-rule jet of phi * u."""
    cover = pou.cover
    d = len(cover.box[0])
    unit, wts = _tensor_rule(d, nodes_per_dim)
    side = 2.0 ** -j
    low = (np.asarray(k) - 0.5) * side
    pts = low[:, None] + 2.0 * side * unit
    w = wts * (2.0 * side) ** d
    bump = pou.bump_jet(j, k, pts, order=m)
    psi = pou.psi_jet(pts, order=m)
    piece = (bump / psi) * u.jet(pts, order=m)
    rho = _rho_values(pts, cover.domain)
    power = 0.0
    for alpha in multi_indices(d, m):
        power += float(np.sum(rho ** ((sum(alpha) - a) * p)
                              * np.abs(piece.derivative(alpha)) ** p * w))
    return power


def rloc_norm_localized(u, params, cover, pou, nodes_per_dim=DEFAULT_NODES,
                        oracle_member=None):
    """Localized refined-localization norm
    (sum_{j,l} ||phi_{j,l} u | F^m_{tau,2}||^tau)^{1/tau} for 1 < tau < inf.

    Pieces are measured by sobolev_norm (= F^m_{tau,2}); tau <= 1 requires
    the wavelet sequence-norm route (wavelets module) instead.
    """
    m = params.m
    tau = params.p if params.tau is None else params.tau
    if not 1 < tau < np.inf:
        raise Unsupported("pieces are W^m_tau only for 1 < tau < inf; "
                          "use the wavelet sequence norm for tau <= 1")
    if m > MAX_ORDER:
        raise Unsupported(f"derivative order capped at {MAX_ORDER}")
    per_level = {}
    for j in sorted(cover.levels):
        ks = cover.levels[j]
        if not len(ks):
            per_level[j] = 0.0
            continue
        per_level[j] = _piece_sobolev_power(u, pou, j, ks, m, tau,
                                            nodes_per_dim)
    levels = sorted(per_level)
    ladder, running = [], 0.0
    for j in levels:
        running += per_level[j]
        if j >= TRUNCATION_K_MIN or j == levels[-1]:
            ladder.append((2.0 ** -j, running))
    out = _norm_value_from_powersum(ladder, tau, nodes_per_dim, oracle_member)
    tail = sum(per_level[j] for j in levels[-3:])
    if running > 0 and tail / running > TAIL_SHARE_LIMIT \
            and out.classification == FINITE:
        out.classification = INCONCLUSIVE
    return out


def rloc_norm_weighted(u, params, cover, nodes_per_dim=DEFAULT_NODES,
                       oracle_member=None):
    """Weighted form ||u | F^m_{tau,2}(D)|| + ||rho^{-m} u | L_tau(D)||."""
    m = params.m
    tau = params.p if params.tau is None else params.tau
    if not 1 < tau < np.inf:
        raise Unsupported("W^m_tau realization requires 1 < tau < inf")
    smooth = sobolev_norm(u, m, tau, cover, nodes_per_dim)
    weighted = weighted_lp_norm(u, -m, tau, cover, nodes_per_dim,
                                oracle_member)
    truncs = [(e1, v1 + v2) for (e1, v1), (_, v2)
              in zip(_align(smooth.truncations, weighted.truncations),
                     weighted.truncations)]
    cls = classify_truncations(truncs, oracle_member)
    return NormValue(value=truncs[-1][1], truncations=truncs,
                     classification=cls, quadrature_order=nodes_per_dim)


def _align(a, b):
    """Pad the shorter rooted ladder by repeating its last entry."""
    if len(a) == len(b):
        return a
    if len(a) < len(b):
        return a + [a[-1]] * (len(b) - len(a))
    return a[:len(b)]


def kondratiev_sharp_norm(u, params, cover, nodes_per_dim=DEFAULT_NODES,
                          oracle_member=None):
    """Sharp norm sum_{|a|=m} ||d^a (rho^{m-a} u)||_p + ||rho^{-a} u||_p.

    The multiplication by rho^{m-a} stays inside the closed test family, so
    the top-order derivatives are exact.
    """
    m, a, p = params.m, params.a, params.p
    if not 1 < p < np.inf:
        raise InvalidParams("p must lie in (1, inf)")
    v = multiply_by_rho_power(u, m - a)
    top = [al for al in multi_indices(params.d, m) if sum(al) == m]
    ladder, _ = _derivative_power_sum(
        v, top, lambda rho, al: 1.0, p, cover, nodes_per_dim)
    top_truncs = [(e, val ** (1.0 / p)) for e, val in ladder]
    low = weighted_lp_norm(u, -a, p, cover, nodes_per_dim)
    truncs = [(e1, v1 + v2) for (e1, v1), (_, v2)
              in zip(_align(top_truncs, low.truncations), low.truncations)]
    cls = classify_truncations(truncs, oracle_member)
    return NormValue(value=truncs[-1][1], truncations=truncs,
                     classification=cls, quadrature_order=nodes_per_dim)


def multiply_by_rho_power(u, gamma):
    """T u = rho^gamma u; beta -> beta + gamma within the closed family."""
    return TestFunction(u.beta + gamma, u.lam, u.R, u.domain)


# ---------------------------------------------------------------------------
# Exact radial integral classification and 1D reference quadrature
# ---------------------------------------------------------------------------

def classify_radial_integral(e, g):
    """int_0^R t^e (1+|log t|)^g dt: Finite iff e > -1, or e = -1 and g < -1."""
    if e > -1.0:
        return FINITE
    if e == -1.0 and g < -1.0:
        return FINITE
    return DIVERGENT


def radial_reference_integral(e, g, R=1.0, eps=0.0):
    """High-accuracy 1D reference: int_eps^R t^e (1 + |log t|)^g dt."""
    if eps <= 0.0 and classify_radial_integral(e, g) == DIVERGENT:
        raise InvalidParams("integral diverges at 0; pass eps > 0")

    def f(t):
        return t ** e * (1.0 + np.abs(np.log(t))) ** g

    lo = max(eps, 0.0)
    val, _ = quad(f, lo, R, limit=200, points=[min(1.0, R)] if R > 1 else None)
    return val
