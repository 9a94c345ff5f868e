"""Experiment harness: each theorem becomes a falsifiable numerical check.

All experiments are deterministic given (cover constants, quadrature order,
family); reports carry the data needed to re-audit the decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from .errors import EmptyFamily, InvalidParams, Unsupported
from .geometry import (ModelDomain, PartitionOfUnity, whitney_cover)
from .jets import Jet, norm_jet
from .profiles import WINDOW
from . import norms
from .norms import (SpaceParams, classify_radial_integral, kondratiev_norm,
                    kondratiev_piece_power, kondratiev_sharp_norm,
                    multiply_by_rho_power, radial_reference_integral,
                    rloc_norm_localized, rloc_norm_weighted, sobolev_norm,
                    weighted_lp_norm, FINITE, DIVERGENT)
from .testfns import (TestFunction, kondratiev_membership,
                      make_test_function)

SPREAD_SAME_INTEGRABILITY = 50.0
SPREAD_CROSS_INTEGRABILITY = 100.0
DEFAULT_BETAS = (0.2, 0.5, 0.8, 1.2, 1.6, 2.0, 2.5)
DEFAULT_LAMBDAS = (0.0, -0.7)


# ---------------------------------------------------------------------------
# Report types
# ---------------------------------------------------------------------------

@dataclass
class RatioReport:
    family: list                       # descriptors of included members
    numerator_kind: str
    denominator_kind: str
    ratios: list
    spread: float
    passed: bool
    spread_bound: float
    excluded: list = field(default_factory=list)   # (descriptor, reason)
    notes: dict = field(default_factory=dict)

    def to_json(self):
        return {"family": self.family,
                "numeratorKind": self.numerator_kind,
                "denominatorKind": self.denominator_kind,
                "ratios": self.ratios, "spread": self.spread,
                "spreadBound": self.spread_bound, "passed": self.passed,
                "excluded": self.excluded, "notes": self.notes}

    def csv_rows(self):
        yield ("beta", "lambda", "R", "numerator_kind", "denominator_kind",
               "ratio")
        for desc, ratio in zip(self.family, self.ratios):
            yield (desc["beta"], desc["lambda"], desc["R"],
                   self.numerator_kind, self.denominator_kind, ratio)


@dataclass
class DivergenceReport:
    ladder: list                       # (eps, value)
    fitted_exponent: float
    predicted_exponent: float
    residual: float
    kondratiev_cauchy: bool
    passed: bool
    notes: dict = field(default_factory=dict)

    def to_json(self):
        return {"ladder": [[e, v] for e, v in self.ladder],
                "fittedExponent": self.fitted_exponent,
                "predictedExponent": self.predicted_exponent,
                "residual": self.residual,
                "kondratievCauchy": self.kondratiev_cauchy,
                "passed": self.passed, "notes": self.notes}

    def csv_rows(self):
        yield ("eps", "value")
        for e, v in self.ladder:
            yield (e, v)


# ---------------------------------------------------------------------------
# Families, covers, wrappers
# ---------------------------------------------------------------------------

def default_family(domain, betas=DEFAULT_BETAS, lambdas=DEFAULT_LAMBDAS,
                   R=1.0):
    return [make_test_function(b, l, R, domain)
            for b in betas for l in lambdas]


def standard_cover(domain, radius=3, j_max=12):
    r = int(math.ceil(radius))
    box = ((-r,) * domain.d, (r,) * domain.d)
    return whitney_cover(domain, box, j_max)


def _spread(ratios):
    return max(ratios) / min(ratios) if ratios else float("inf")


class DerivativeFunction:
    """d^alpha u with jets delegated to the closed family's exact jets."""

    def __init__(self, u, alpha):
        self.u = u
        self.alpha = tuple(int(k) for k in alpha)

    def jet(self, x, order):
        return self.u.jet(x, order + sum(self.alpha)).derivative_jet(
            self.alpha)

    def __call__(self, x):
        return self.jet(x, 0).value


class PulledBackFunction:
    """u(A x) for a linear map A (diffeomorphism catalog entries)."""

    def __init__(self, u, matrix):
        self.u = u
        self.matrix = np.asarray(matrix, dtype=float)

    def jet(self, x, order):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        coords = Jet.variables(x, order)
        ycoords = []
        for i in range(self.matrix.shape[0]):
            acc = coords[0] * self.matrix[i, 0]
            for jj in range(1, self.matrix.shape[1]):
                if self.matrix[i, jj] != 0.0:
                    acc = acc + coords[jj] * self.matrix[i, jj]
            ycoords.append(acc)
        return self.u.jet_from_coords(ycoords)

    def __call__(self, x):
        return self.jet(x, 0).value


class ScaledFunction:
    """u(2^k x); dyadic arguments and derivative factors are float-exact."""

    def __init__(self, u, k):
        self.u = u
        self.k = int(k)

    def jet(self, x, order):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        jet = self.u.jet(x * 2.0 ** self.k, order)
        from .jets import multi_indices
        coeffs = [c * 2.0 ** (self.k * sum(al))
                  for c, al in zip(jet.coeffs, multi_indices(jet.dim,
                                                             jet.order))]
        return Jet(jet.dim, jet.order, coeffs)

    def __call__(self, x):
        return self.jet(x, 0).value


class WindowedFunction:
    """phi_j(x) u(x) with the dyadic annular window phi_j = w(log2(1/|x|)-j)."""

    def __init__(self, u, j):
        self.u = u
        self.j = j

    def jet(self, x, order):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        coords = Jet.variables(x, order)
        r = norm_jet(coords)
        t = r.log() * (-1.0 / math.log(2.0)) - float(self.j)
        w = t.compose(WINDOW.derivs(t.value, order))
        return w * self.u.jet_from_coords(coords)

    def __call__(self, x):
        return self.jet(x, 0).value


def _filter_family(family, oracle, reason):
    kept, excluded = [], []
    for u in family:
        if oracle(u):
            kept.append(u)
        else:
            excluded.append((u.to_json(), reason))
    return kept, excluded


def _ratio_report(kept, excluded, num_kind, den_kind, pairs, bound,
                  notes=None):
    if not kept:
        raise EmptyFamily("no admissible family members")
    ratios = [n / d for n, d in pairs]
    ok = all(np.isfinite(r) and r > 0 for r in ratios)
    spread = _spread(ratios) if ok else float("inf")
    return RatioReport(family=[u.to_json() for u in kept],
                       numerator_kind=num_kind, denominator_kind=den_kind,
                       ratios=ratios, spread=spread,
                       passed=ok and spread < bound, spread_bound=bound,
                       excluded=excluded, notes=notes or {})


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

def check_norm_equivalence_Kmm(family, m, p, domain, cover=None,
                               nodes_per_dim=norms.DEFAULT_NODES):
    """K^m_{m,p} vs the weighted refined-localization norm (same space)."""
    cover = cover or standard_cover(domain)
    kept, excluded = _filter_family(
        family, lambda u: kondratiev_membership(u, m, m, p).member,
        "not in K^m_{m,p} by the exponent oracle")
    params = SpaceParams(m=m, a=m, p=p, d=domain.d, ell=domain.ell, tau=p)
    pairs = [(kondratiev_norm(u, params, cover, nodes_per_dim).value,
              rloc_norm_weighted(u, params, cover, nodes_per_dim).value)
             for u in kept]
    return _ratio_report(kept, excluded, "kondratiev(a=m)", "rloc_weighted",
                         pairs, SPREAD_SAME_INTEGRABILITY)


def check_sharp_norm(family, m, a, p, domain, cover=None,
                     nodes_per_dim=norms.DEFAULT_NODES):
    """Two-term sharp norm vs the full Kondratiev norm."""
    cover = cover or standard_cover(domain)
    kept, excluded = _filter_family(
        family, lambda u: kondratiev_membership(u, m, a, p).member,
        "not in K^m_{a,p} by the exponent oracle")
    params = SpaceParams(m=m, a=a, p=p, d=domain.d, ell=domain.ell)
    pairs = [(kondratiev_sharp_norm(u, params, cover, nodes_per_dim).value,
              kondratiev_norm(u, params, cover, nodes_per_dim).value)
             for u in kept]
    return _ratio_report(kept, excluded, "kondratiev_sharp", "kondratiev",
                         pairs, SPREAD_SAME_INTEGRABILITY)


def check_localization(family, m, a, p, cover, pou,
                       nodes_per_dim=norms.DEFAULT_NODES):
    """Global Kondratiev p-power vs the sum over Whitney pieces."""
    domain = cover.domain
    kept, excluded = _filter_family(
        family, lambda u: kondratiev_membership(u, m, a, p).member,
        "not in K^m_{a,p} by the exponent oracle")
    params = SpaceParams(m=m, a=a, p=p, d=domain.d, ell=domain.ell)
    pairs = []
    for u in kept:
        glob = kondratiev_norm(u, params, cover, nodes_per_dim).value ** p
        local = 0.0
        for j in sorted(cover.levels):
            for k in cover.levels[j]:
                local += kondratiev_piece_power(u, pou, j, k, m, a, p,
                                                nodes_per_dim)
        pairs.append((glob, local))
    return _ratio_report(kept, excluded, "kondratiev^p",
                         "sum of piece powers", pairs,
                         SPREAD_SAME_INTEGRABILITY)


def check_rho_power_isomorphism(family, m, a, a2, p, domain, cover=None,
                                nodes_per_dim=norms.DEFAULT_NODES):
    """The multiplication map u -> rho^{a2-a} u between weight classes."""
    cover = cover or standard_cover(domain)
    kept, excluded = _filter_family(
        family, lambda u: kondratiev_membership(u, m, a, p).member,
        "not in K^m_{a,p} by the exponent oracle")
    pin = SpaceParams(m=m, a=a, p=p, d=domain.d, ell=domain.ell)
    pout = SpaceParams(m=m, a=a2, p=p, d=domain.d, ell=domain.ell)
    pairs = [(kondratiev_norm(multiply_by_rho_power(u, a2 - a), pout, cover,
                              nodes_per_dim).value,
              kondratiev_norm(u, pin, cover, nodes_per_dim).value)
             for u in kept]
    return _ratio_report(kept, excluded, f"kondratiev(a={a2}) after rho^g",
                         f"kondratiev(a={a})", pairs,
                         SPREAD_SAME_INTEGRABILITY)


def check_embedding_ratio(params, family, cover=None, J=10,
                          nodes_per_dim=norms.DEFAULT_NODES):
    """Embedding K^m_{a,p} -> F^{m,rloc}_{tau,2}: ratio boundedness.

    The numerator uses the weighted form; its smoothness term routes through
    W^m_tau for tau > 1 and through the wavelet sequence norm for tau <= 1.
    A divergent numerator under a Holds verdict is a critical failure.
    """
    from .embeddings import decide_embedding, HOLDS
    if not family:
        raise EmptyFamily("empty test family")
    domain = family[0].domain
    m, a, p = params.m, params.a, params.p
    tau = params.tau if params.tau is not None else p
    verdict = decide_embedding(m, a, p, tau, domain.d, domain.ell)
    if verdict.outcome != HOLDS:
        raise InvalidParams(f"embedding does not hold: {verdict.trigger}")
    cover = cover or standard_cover(domain)
    kept, excluded = _filter_family(
        family, lambda u: kondratiev_membership(u, m, a, p).member,
        "not in K^m_{a,p} by the exponent oracle")
    notes = {"verdict": verdict.to_json()}
    pairs = []
    if tau > 1:
        fpar = SpaceParams(m=m, a=a, p=p, d=domain.d, ell=domain.ell, tau=tau)
        for u in kept:
            num = rloc_norm_weighted(u, fpar, cover, nodes_per_dim)
            den = kondratiev_norm(u, params, cover, nodes_per_dim)
            pairs.append((num.value, den.value))
    else:
        from .wavelets import (build_wavelet_system, wavelet_coefficients,
                               f_sequence_norm)
        system = build_wavelet_system(m)
        notes["waveletOrder"] = system.order
        half = max(int(math.ceil(2 * max(u.R for u in kept))), 1)
        box = ((-float(half),) * domain.d, (float(half),) * domain.d)
        tails = []
        for u in kept:
            grid = wavelet_coefficients(lambda x: u(x), system, J, box)
            seq = f_sequence_norm(grid, s=float(m), tau=tau)
            low = weighted_lp_norm(u, -m, tau, cover, nodes_per_dim)
            den = kondratiev_norm(u, params, cover, nodes_per_dim)
            pairs.append((seq.value + low.value, den.value))
            part = {e: v for e, v in seq.truncations}
            full = seq.value ** tau
            cut = seq.truncations[-4][1] ** tau if len(seq.truncations) > 3 \
                else 0.0
            tails.append(1.0 - cut / full if full > 0 else 0.0)
        notes["tailShares"] = tails
    report = _ratio_report(kept, excluded, f"rloc_weighted(tau={tau})",
                           f"kondratiev(p={p})", pairs,
                           SPREAD_CROSS_INTEGRABILITY, notes)
    if not all(np.isfinite(r) for r in report.ratios):
        report.notes["CRITICAL"] = ("divergent numerator under a Holds "
                                    "verdict")
        report.passed = False
    return report


def _fit_growth(xs, ys, predicted):
    """Fit y = A + B x^c and report (c, max relative residual)."""

    def model(x, A, B, c):
        return A + B * x ** c

    p0 = (0.0, max(ys[-1], 1e-8), max(predicted, 0.05))
    popt, _ = curve_fit(model, np.asarray(xs), np.asarray(ys), p0=p0,
                        maxfev=20000)
    fit = model(np.asarray(xs), *popt)
    residual = float(np.max(np.abs(fit - ys) / np.abs(ys)))
    return float(popt[2]), residual


def check_counterexample_divergence(m, a, p, tau, d, delta, lam, R=1.0,
                                    k_range=range(4, 17)):
    """Sharpness at the critical line via the exact 1D radial reduction.

    u_lam = rho^{m - d/tau} (1 + |log rho|)^lam: the truncated power
    ||rho^{-m} u_lam||^tau_{L_tau(rho>eps)} reduces to
    int_eps^R t^{e}(1+|log t|)^{lam*tau} dt with e = (beta-m)tau + d-delta-1;
    its growth in eps is fitted against the predicted law.
    """
    beta = m - d / tau
    e = (beta - m) * tau + (d - delta) - 1
    g = lam * tau
    notes = {"beta": beta, "radialExponent": e, "logPower": g,
             "critical": abs((m - a) - (d - delta) * (1 / tau - 1 / p))
             < 1e-12}
    ladder = [(2.0 ** -k, radial_reference_integral(e, g, R, 2.0 ** -k))
              for k in k_range]
    eps = np.array([x for x, _ in ladder])
    vals = np.array([y for _, y in ladder])
    if classify_radial_integral(e, g) == FINITE:
        notes["flag"] = "not a counterexample: weighted power is finite"
        return DivergenceReport(ladder=ladder, fitted_exponent=0.0,
                                predicted_exponent=0.0, residual=0.0,
                                kondratiev_cauchy=True, passed=False,
                                notes=notes)
    if e == -1.0:
        predicted = 1.0 + g
        xs = 1.0 + np.log(1.0 / eps)
        notes["law"] = "(1 + log(1/eps))^c"
    else:
        predicted = -(e + 1.0)
        xs = 1.0 / eps
        notes["law"] = "eps^{-c}"
    fitted, residual = _fit_growth(xs, vals, predicted)

    # Kondratiev-side Cauchy check, also via the radial reduction: the worst
    # norm term is int t^{(beta-a)p + d-delta-1} (1+|log t|)^{lam p} dt.
    ek = (beta - a) * p + (d - delta) - 1
    gk = lam * p
    member = classify_radial_integral(ek, gk) == FINITE
    notes["kondratievMember"] = member
    cauchy = False
    if member:
        kv, prev = [], None
        for k in range(4, 200, 4):
            v = radial_reference_integral(ek, gk, R, 2.0 ** -k) ** (1.0 / p)
            kv.append(v)
            if len(kv) >= 4:
                rel = [(kv[i] - kv[i - 1]) / kv[i] for i in
                       range(len(kv) - 3, len(kv))]
                if all(r < norms.CAUCHY_REL_TOL for r in rel):
                    cauchy = True
                    notes["kondratievCauchyEps"] = 2.0 ** -k
                    break
    passed = (abs(fitted - predicted) <= 0.05 and residual < 0.10
              and cauchy)
    return DivergenceReport(ladder=ladder, fitted_exponent=fitted,
                            predicted_exponent=predicted, residual=residual,
                            kondratiev_cauchy=cauchy, passed=passed,
                            notes=notes)


def check_derivative_mapping(family, m, alpha, p, domain, cover=None,
                             nodes_per_dim=norms.DEFAULT_NODES):
    """||d^alpha u|F^{m-|alpha|,rloc}|| <= c ||u|F^{m,rloc}|| ratios."""
    cover = cover or standard_cover(domain)
    k = sum(alpha)
    if m - k < 1:
        raise InvalidParams("need m - |alpha| >= 1")
    from .testfns import f_space_membership_radial
    kept, excluded = _filter_family(
        family,
        lambda u: f_space_membership_radial(u.beta, max(u.lam, 0.0),
                                            float(m), p, domain.ell,
                                            domain.d).member,
        "not in F^{m,rloc} by the radial rule")
    phigh = SpaceParams(m=m, a=m, p=p, d=domain.d, ell=domain.ell, tau=p)
    plow = SpaceParams(m=m - k, a=m - k, p=p, d=domain.d, ell=domain.ell,
                       tau=p)
    pairs = []
    for u in kept:
        du = DerivativeFunction(u, alpha)
        num = sobolev_norm(du, m - k, p, cover, nodes_per_dim).value \
            + weighted_lp_norm(du, -(m - k), p, cover, nodes_per_dim).value
        den = sobolev_norm(u, m, p, cover, nodes_per_dim).value \
            + weighted_lp_norm(u, -m, p, cover, nodes_per_dim).value
        pairs.append((num, den))
    return _ratio_report(kept, excluded, f"rloc(m-{k}) of derivative",
                         "rloc(m)", pairs, SPREAD_CROSS_INTEGRABILITY)


DIFFEO_CATALOG = {
    "identity": {"matrix": ((1.0, 0.0), (0.0, 1.0)), "bound": (0.999, 1.001)},
    "rotation": {"matrix": ((0.0, -1.0), (1.0, 0.0)), "bound": (0.9, 1.1)},
    "shear": {"matrix": ((1.0, 0.3), (0.0, 1.0)), "bound": (0.1, 10.0)},
}


def check_diffeo_invariance(u, diffeo, m, p, cover=None,
                            nodes_per_dim=norms.DEFAULT_NODES):
    """Pullback along a catalog diffeomorphism: rloc norm ratio within the
    catalog-stored bound; for isometries the weighted term is exactly
    invariant (node set maps onto itself)."""
    if diffeo not in DIFFEO_CATALOG:
        raise InvalidParams(f"unknown diffeomorphism {diffeo!r}")
    entry = DIFFEO_CATALOG[diffeo]
    domain = u.domain
    cover = cover or standard_cover(domain)
    v = PulledBackFunction(u, entry["matrix"])
    params = SpaceParams(m=m, a=m, p=p, d=domain.d, ell=domain.ell, tau=p)
    num_s = sobolev_norm(v, m, p, cover, nodes_per_dim).value
    num_w = weighted_lp_norm(v, -m, p, cover, nodes_per_dim).value
    den_s = sobolev_norm(u, m, p, cover, nodes_per_dim).value
    den_w = weighted_lp_norm(u, -m, p, cover, nodes_per_dim).value
    ratio = (num_s + num_w) / (den_s + den_w)
    lo, hi = entry["bound"]
    notes = {"diffeo": diffeo, "weightedTermRatio": num_w / den_w,
             "bound": [lo, hi]}
    return RatioReport(family=[u.to_json()], numerator_kind="rloc(pullback)",
                       denominator_kind="rloc", ratios=[ratio],
                       spread=1.0, passed=lo <= ratio <= hi,
                       spread_bound=hi / lo, notes=notes)


def _sector_cover(j_max=12, size=4):
    """Whitney cover of the quarter plane with vertex singularity at 0."""
    domain = ModelDomain(2, 0)
    return whitney_cover(domain, ((0, 0), (size, size)), j_max)


def check_cone_localization(u, m, a, p, cover=None,
                            nodes_per_dim=norms.DEFAULT_NODES):
    """Dyadic annular localization on a planar sector (quarter plane)."""
    cover = cover or _sector_cover()
    domain = cover.domain
    params = SpaceParams(m=m, a=a, p=p, d=domain.d, ell=domain.ell)
    glob = kondratiev_norm(u, params, cover, nodes_per_dim).value ** p
    j_max = max(cover.levels)
    local = 0.0
    shares = {}
    for j in range(-3, j_max + 2):
        piece = kondratiev_norm(WindowedFunction(u, j), params, cover,
                                nodes_per_dim).value ** p
        local += piece
        shares[j] = piece
    ratio = glob / local
    notes = {"annulusShares": {j: s / local for j, s in shares.items()
                               if s > 0}}
    return RatioReport(family=[u.to_json()], numerator_kind="kondratiev^p",
                       denominator_kind="sum of annulus powers",
                       ratios=[ratio], spread=1.0,
                       passed=np.isfinite(ratio) and
                       1.0 / SPREAD_SAME_INTEGRABILITY < ratio
                       < SPREAD_SAME_INTEGRABILITY,
                       spread_bound=SPREAD_SAME_INTEGRABILITY, notes=notes)


def check_scaling_homogeneity(u, m, p, k, cover=None,
                              nodes_per_dim=norms.DEFAULT_NODES):
    """Change-of-variables identity for the top-order seminorm.

    sum_{|alpha|=m} ||d^alpha u(2^k .)||_p^p over the dilated cover equals
    2^{k(mp-d)} times the same sum for u: dyadic dilations map quadrature
    nodes and weights exactly, so the identity holds to rounding.
    """
    from .jets import multi_indices
    domain = u.domain
    cover = cover or standard_cover(domain)
    d = domain.d
    uk = ScaledFunction(u, k)
    top = [al for al in multi_indices(d, m) if sum(al) == m]
    rhs = 0.0
    lhs = 0.0
    for j in sorted(cover.levels):
        pts, wts = norms.level_nodes(cover, j, nodes_per_dim)
        if not wts.size:
            continue
        jet = u.jet(pts, order=m)
        spts = pts * 2.0 ** -k
        swts = wts * 2.0 ** (-k * d)
        sjet = uk.jet(spts, order=m)
        for al in top:
            rhs += float(np.sum(np.abs(jet.derivative(al)) ** p * wts))
            lhs += float(np.sum(np.abs(sjet.derivative(al)) ** p * swts))
    factor = 2.0 ** (k * (m * p - d))
    rel = abs(lhs - factor * rhs) / (factor * rhs) if rhs else 0.0
    return {"k": k, "m": m, "p": p, "predictedFactor": factor,
            "scaledSeminormPower": lhs, "baseSeminormPower": rhs,
            "relativeError": rel, "passed": rel <= 1e-10}


def check_truth_table(n=200, seed=20260826):
    """decide_embedding vs a literal transcription of the sufficient and
    necessary conditions, over randomized admissible parameter tuples."""
    from .embeddings import decide_embedding, sigma, HOLDS, FAILS
    rng = np.random.default_rng(seed)
    mismatches = []
    rows = []
    count = 0
    while count < n:
        m = int(rng.integers(1, 4))
        a = float(rng.uniform(-1.0, 3.0))
        p = float(rng.uniform(1.0 + 1e-6, 4.0))
        tau = float(rng.uniform(0.5, 4.0))
        d = int(rng.choice([2, 3]))
        delta = int(rng.choice([0, 1]))
        if m <= sigma(tau, 2.0, d):
            continue
        count += 1
        verdict = decide_embedding(m, a, p, tau, d, delta)
        if tau > p:
            literal = FAILS
        elif tau == p:
            literal = HOLDS if m <= a else FAILS
        else:
            literal = HOLDS if (m - a) < (d - delta) * (1 / tau - 1 / p) \
                else FAILS
        row = {"m": m, "a": a, "p": p, "tau": tau, "d": d, "delta": delta,
               "verdict": verdict.outcome, "literal": literal}
        rows.append(row)
        if verdict.outcome != literal:
            mismatches.append(row)
    return {"tuples": count, "mismatches": mismatches,
            "passed": not mismatches, "rows": rows}


def check_partition_diagnostics(domain, box=None, j_max=8, n_points=10000,
                                seed=20260826):
    """Partition sums, certificate exactness, and level-count growth."""
    box = box or ((-2,) * domain.d, (2,) * domain.d)
    cover = whitney_cover(domain, box, j_max)
    pou = PartitionOfUnity(cover)
    rng = np.random.default_rng(seed)
    lo = np.array(box[0], dtype=float)
    hi = np.array(box[1], dtype=float)
    pts = lo + (hi - lo) * rng.random((n_points, domain.d))
    pts = pts[~np.isclose(domain.distance(pts), 0.0)].T
    from .geometry import PSI_FLOOR
    psi = pou.psi_jet(pts, order=0).value
    covered = psi > PSI_FLOOR
    # accumulate the normalized pieces independently so that floating-point
    # error in the sum is actually measured
    total = np.zeros(pts.shape[1])
    safe = np.where(covered, psi, 1.0)
    for j, kk, ixs in pou._neighbor_batches(pts):
        total[ixs] += pou.bump(j, kk, pts[:, ixs]) / safe[ixs]
    sums = np.where(covered, total, 1.0)
    sum_err = float(np.max(np.abs(sums[covered] - 1.0))) if covered.any() \
        else 0.0
    cert_ok = True
    for j, ks in cover.levels.items():
        if not len(ks):
            continue
        h = 2.0 ** (-j)
        dist = domain.cube_distance(ks * h - 0.5 * h, ks * h + 1.5 * h)
        stored = cover.dists[j]
        lo_c = cover.c1 * h if j >= 1 else 1.0
        cert_ok &= bool(np.array_equal(dist, stored)
                        and np.all(stored >= lo_c))
        if j >= 1:
            cert_ok &= bool(np.all(stored <= cover.c2 * h))
    counts = cover.counts
    js = sorted(j for j in counts if counts[j] > 0)
    growth = [math.log2(counts[j + 1] / counts[j]) for j in js[:-1]
              if j + 1 in counts and counts[j + 1] > 0 and j >= 2]
    tail = growth[-3:] if growth else []
    growth_ok = bool(tail) and all(abs(g - domain.ell) <= 0.2 for g in tail)
    return {"partitionSumError": sum_err, "coveredFraction":
            float(covered.mean()), "certificatesExact": cert_ok,
            "levelCounts": {int(j): int(c) for j, c in counts.items()},
            "growthRates": tail, "ell": domain.ell,
            "passed": sum_err <= 1e-10 and cert_ok and growth_ok}


def check_classification_grid(domain=None, m=1, p=2.0,
                              betas=(0.0, 0.5, 1.0, 1.5, 2.0),
                              a_values=(-0.5, 0.0, 0.5, 1.0, 1.5),
                              j_max=16, nodes_per_dim=norms.DEFAULT_NODES):
    """Truncation-Cauchy classification vs the exponent oracle, cellwise."""
    domain = domain or ModelDomain(2, 0)
    cover = standard_cover(domain, radius=2, j_max=j_max)
    cells = []
    ok = True
    for beta in betas:
        u = make_test_function(beta, 0.0, 1.0, domain)
        for a in a_values:
            oracle = kondratiev_membership(u, m, a, p)
            params = SpaceParams(m=m, a=a, p=p, d=domain.d, ell=domain.ell)
            nv = kondratiev_norm(u, params, cover, nodes_per_dim,
                                 oracle_member=oracle.member)
            agree = (nv.classification == FINITE) == oracle.member
            ok = ok and agree
            cells.append({"beta": beta, "a": a, "oracleMember":
                          oracle.member, "classification": nv.classification,
                          "agree": agree})
    return {"cells": cells, "passed": ok}


def check_dual_route(family=None, m=1, tau=1.5, J=9, j_max=12,
                     nodes_per_dim=norms.DEFAULT_NODES,
                     parseval_J=10):
    """Sequence-space vs Sobolev-route F-norms, plus a Parseval check.

    Both routes realize F^m_{tau,2} up to equivalence; the ratio spread over
    the family must stay below the cross-integrability bound.  The Parseval
    check compares the summed squared coefficients of the plateau cutoff to
    its squared L_2 norm.
    """
    from .wavelets import (build_wavelet_system, wavelet_coefficients,
                           f_sequence_norm)
    domain = ModelDomain(2, 0)
    family = family or default_family(domain)
    cover = standard_cover(domain, radius=3, j_max=j_max)
    system = build_wavelet_system(m)
    from .testfns import f_space_membership_radial
    kept, excluded = _filter_family(
        family,
        lambda u: f_space_membership_radial(u.beta, max(u.lam, 0.0),
                                            float(m), tau, domain.ell,
                                            domain.d).member,
        "not in F^m_{tau,2} by the radial rule")
    half = max(int(math.ceil(2 * max(u.R for u in kept))), 1)
    box = ((-float(half),) * domain.d, (float(half),) * domain.d)
    pairs = []
    for u in kept:
        grid = wavelet_coefficients(lambda x: u(x), system, J, box)
        seq = f_sequence_norm(grid, s=float(m), tau=tau)
        sob = sobolev_norm(u, m, tau, cover, nodes_per_dim)
        pairs.append((seq.value, sob.value))
    report = _ratio_report(kept, excluded, "f_sequence_norm",
                           "sobolev_norm", pairs,
                           SPREAD_CROSS_INTEGRABILITY)
    zeta = make_test_function(0.0, 0.0, 1.0, domain)
    grid = wavelet_coefficients(lambda x: zeta(x), system, parseval_J, box)
    l2 = weighted_lp_norm(zeta, 0.0, 2.0, cover, nodes_per_dim)
    parseval_rel = abs(grid.sum_of_squares() - l2.value ** 2) / l2.value ** 2
    report.notes["parsevalRelativeError"] = parseval_rel
    report.passed = report.passed and parseval_rel < 0.01
    return report


# ---------------------------------------------------------------------------
# Named experiments for the command line
# ---------------------------------------------------------------------------

def _exp_truth_table():
    return check_truth_table()


def _exp_norm_equivalence():
    domain = ModelDomain(2, 0)
    cover = standard_cover(domain, radius=2, j_max=12)
    return check_norm_equivalence_Kmm(default_family(domain), m=1, p=2.0,
                                      domain=domain, cover=cover).to_json()


def _exp_localization():
    domain = ModelDomain(2, 0)
    cover = standard_cover(domain, radius=2, j_max=8)
    pou = PartitionOfUnity(cover)
    fam = default_family(domain, betas=(0.5, 1.2, 2.0), lambdas=(0.0,))
    return check_localization(fam, m=1, a=0.5, p=2.0, cover=cover,
                              pou=pou).to_json()


def _exp_divergence():
    return check_counterexample_divergence(m=1, a=0.0, p=2.0, tau=1.0,
                                           d=2, delta=0, lam=-0.7).to_json()


def _exp_embedding_ratio():
    domain = ModelDomain(2, 0)
    params = SpaceParams(m=2, a=1.0, p=2.0, d=2, ell=0, tau=0.9)
    fam = default_family(domain, betas=(1.2, 1.5, 2.0), lambdas=(0.0,))
    cover = standard_cover(domain, radius=2, j_max=12)
    return check_embedding_ratio(params, fam, cover=cover, J=10).to_json()


def _exp_scaling():
    out = []
    for m, p, d, k in ((1, 2, 2, 3), (2, 2, 2, 2)):
        domain = ModelDomain(d, 0)
        u = make_test_function(2.5, 0.0, 1.0, domain)
        cover = standard_cover(domain, radius=2, j_max=10)
        out.append(check_scaling_homogeneity(u, m, p, k, cover=cover))
    return {"cases": out, "passed": all(c["passed"] for c in out)}


def _exp_geometry():
    out = {}
    for ell in (0, 1):
        domain = ModelDomain(2 if ell == 0 else 3, ell)
        out[f"ell{ell}"] = check_partition_diagnostics(domain)
    out["passed"] = all(v["passed"] for v in out.values())
    return out


def _exp_classification_grid():
    return check_classification_grid()


def _exp_dual_route():
    return check_dual_route().to_json()


EXPERIMENTS = {
    "truth-table": _exp_truth_table,
    "norm-equivalence": _exp_norm_equivalence,
    "localization": _exp_localization,
    "divergence": _exp_divergence,
    "embedding-ratio": _exp_embedding_ratio,
    "scaling": _exp_scaling,
    "geometry": _exp_geometry,
    "classification-grid": _exp_classification_grid,
    "dual-route": _exp_dual_route,
}
