"""Exact decision procedures for the embedding and regularity statements.

Every function evaluates printed parameter inequalities only; no quadrature.
Sufficient-only statements return UNDETERMINED outside their proved range
instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidParams

HOLDS = "Holds"
FAILS = "Fails"
UNDETERMINED = "UndeterminedByPaper"


@dataclass(frozen=True)
class Verdict:
    outcome: str
    trigger: str
    condition_values: dict = field(default_factory=dict)

    def to_json(self):
        return {"outcome": self.outcome, "trigger": self.trigger,
                "conditionValues": self.condition_values}


@dataclass(frozen=True)
class HolderRoute:
    applies: bool
    eta: float          # 1/eta = m/d + 1/tau - 1/p
    r: float            # 1/r = 1/tau - 1/p


def sigma(tau, q, d):
    """sigma_{tau,q} = d (1/min(1, tau, q) - 1)."""
    if tau <= 0 or q <= 0:
        raise InvalidParams("tau and q must be positive")
    return d * (1.0 / min(1.0, tau, q) - 1.0)


def adaptivity_scale(d, m):
    """tau on the adaptivity scale: m = d(1/tau - 1/2), always < 2."""
    if not m > 0:
        raise InvalidParams("m must be positive")
    return 1.0 / (m / d + 0.5)


def decide_embedding(m, a, p, tau, d, delta):
    """K^m_{a,p} -> F^{m,rloc}_{tau,2}: holds iff (tau < p and
    m - a < (d - delta)(1/tau - 1/p)) or (tau = p and m <= a); requires
    m > sigma_{tau,2} for the target space to make sense."""
    if not (1 < p):
        raise InvalidParams("p must lie in (1, inf)")
    if not (0 < tau):
        raise InvalidParams("tau must be positive")
    if m < 1:
        raise InvalidParams("m must be a positive integer")
    if not (0 <= delta < d):
        raise InvalidParams("delta must lie in [0, d)")
    sig = sigma(tau, 2, d)
    bound = (d - delta) * (1.0 / tau - 1.0 / p)
    values = {"m": m, "a": a, "p": p, "tau": tau, "d": d, "delta": delta,
              "sigma": sig, "m_minus_a": m - a, "bound": bound}
    if m <= sig:
        return Verdict(FAILS, "m <= sigma_{tau,2}: target space guard",
                       values)
    if tau > p:
        return Verdict(FAILS, "Lemma 4.2: embedding implies tau <= p", values)
    if tau == p:
        if m <= a:
            return Verdict(HOLDS, "tau = p and m <= a", values)
        return Verdict(FAILS, "tau = p requires m <= a", values)
    # tau < p
    if m - a < bound:
        return Verdict(HOLDS, "tau < p and m - a < (d - delta)(1/tau - 1/p)",
                       values)
    return Verdict(FAILS, "necessity: m - a >= (d - delta)(1/tau - 1/p)",
                   values)


def decide_embedding_holder_route(m, a, p, tau, d, ell):
    """Sufficient conditions of the Holder-inequality route.

    Main route: (d + ell)/d * m - a < (d - ell)(1/tau - 1/p) and
    1/tau - 1 < m/d < 1/p.  Improved route: m - a < (d - ell)(1/tau - 1/p)
    and 1/tau - 1 < m/(d - ell) < 1/p.  Returns (Verdict, HolderRoute).
    """
    if not (0 <= ell <= d - 1):
        raise InvalidParams("ell must lie in [0, d-1]")
    if not tau < p:
        raise InvalidParams("the Holder route requires tau < p")
    inv_eta = m / d + 1.0 / tau - 1.0 / p
    inv_r = 1.0 / tau - 1.0 / p
    route = HolderRoute(applies=inv_eta > 0 and inv_r > 0,
                        eta=(1.0 / inv_eta if inv_eta > 0 else float("inf")),
                        r=(1.0 / inv_r if inv_r > 0 else float("inf")))
    bound = (d - ell) * inv_r
    main_gap = (d + ell) / d * m - a < bound
    main_window = 1.0 / tau - 1.0 < m / d < 1.0 / p
    improved_gap = m - a < bound
    improved_window = 1.0 / tau - 1.0 < m / (d - ell) < 1.0 / p
    values = {"bound": bound, "eta": route.eta, "r": route.r,
              "main_gap": main_gap, "main_window": main_window,
              "improved_gap": improved_gap,
              "improved_window": improved_window}
    if main_gap and main_window:
        return Verdict(HOLDS, "main route: gap and window conditions",
                       values), route
    if improved_gap and improved_window:
        return Verdict(HOLDS, "improved route: gap and window conditions",
                       values), route
    return Verdict(UNDETERMINED,
                   "sufficient conditions of both routes fail", values), route


def decide_reverse_embedding(m, a, p, tau, d, delta):
    """F^{m,rloc}_{tau,2} -> K^m_{a,p}: sufficient if (tau > p and
    m - a > (d - delta)(1/tau - 1/p)) or (tau = p and a <= m); necessity
    fails when tau < p, when m - a < (d - delta)(1/tau - 1/p), or at the
    equality case with a > m."""
    if not (1 < p):
        raise InvalidParams("p must lie in (1, inf)")
    if not (0 < tau):
        raise InvalidParams("tau must be positive")
    bound = (d - delta) * (1.0 / tau - 1.0 / p)
    values = {"m": m, "a": a, "p": p, "tau": tau, "d": d, "delta": delta,
              "m_minus_a": m - a, "bound": bound}
    if tau < p:
        return Verdict(FAILS, "necessity: reverse embedding implies p <= tau",
                       values)
    if tau == p:
        if a <= m:
            return Verdict(HOLDS, "tau = p and a <= m", values)
        return Verdict(FAILS, "tau = p with a > m", values)
    # tau > p (bound < 0)
    if m - a > bound:
        return Verdict(HOLDS, "tau > p and m - a > (d - delta)(1/tau - 1/p)",
                       values)
    if m - a < bound:
        return Verdict(FAILS, "necessity: m - a < (d - delta)(1/tau - 1/p)",
                       values)
    if a > m:
        return Verdict(FAILS, "necessity: equality case with a > m", values)
    return Verdict(UNDETERMINED, "equality case not covered by the paper",
                   values)


def pde_regularity_tau(m, a, d, delta, a_bar=None):
    """Supremum tau* = ((m - a)/(d - delta) + 1/2)^{-1} of the regularity
    range.  The hypothesis |a| < min(a_bar, m) uses a caller-supplied
    domain-dependent bound a_bar; it is never fabricated here."""
    if a_bar is not None and not abs(a) < min(a_bar, m):
        raise InvalidParams("requires |a| < min(a_bar, m)")
    if a_bar is None and not abs(a) <= m:
        raise InvalidParams("requires |a| <= m (pass a_bar to tighten)")
    return 1.0 / ((m - a) / (d - delta) + 0.5)


def technical_threshold_a(ell, d, tau, p):
    """Lower bound a > ell(1/tau - 1/p) + d(1/p - 1); vacuous (flagged)
    when tau >= 1 so that sigma_{tau,2} = 0."""
    value = ell * (1.0 / tau - 1.0 / p) + d * (1.0 / p - 1.0)
    return {"threshold": value, "vacuous": tau >= 1.0}
