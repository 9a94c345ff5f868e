"""Fixed C^4 one-dimensional profiles.

All smooth transitions are built from a single ninth-degree smoothstep
with four vanishing derivatives at both ends, so every profile here is
piecewise polynomial and C^4 across its knees:

* ``smoothstep``     S: 0 -> 1 on [0, 1]
* ``DistanceCap``    eta: identity below 1/2, constant 1 above 2, strictly
                     monotone in between
* ``RadialCutoff``   zeta: 1 on [0, 1], 0 on [2, inf)
* ``BumpProfile``    1 on [0, 1], supported in (-1/2, 3/2)
* ``DyadicWindow``   translates sum to 1 on the line (log-annuli partitions)

Each profile exposes ``derivs(t, order)`` returning the function value and
derivatives 0..order at an array of points, the format consumed by
:meth:`klab.jets.Jet.compose`.
"""

from fractions import Fraction

import numpy as np

MAX_ORDER = 4

# S and its derivatives, coefficient arrays in ascending powers.
_S_COEF = np.array([0, 0, 0, 0, 0, 126, -420, 540, -315, 70], dtype=float)


def _poly_derivs(coef, t, order):
    t = np.asarray(t, dtype=float)
    out = []
    c = coef.copy()
    for _ in range(order + 1):
        out.append(np.polynomial.polynomial.polyval(t, c))
        c = np.polynomial.polynomial.polyder(c)
    return out


def smoothstep_derivs(t, order=MAX_ORDER):
    """S and derivatives; S=0 below 0 and S=1 above 1, C^4 at the knees."""
    t = np.asarray(t, dtype=float)
    inside = (t > 0.0) & (t < 1.0)
    vals = _poly_derivs(_S_COEF, np.where(inside, t, 0.5), order)
    out = []
    for k, v in enumerate(vals):
        base = np.zeros(t.shape) if k else np.where(t >= 1.0, 1.0, 0.0)
        out.append(np.where(inside, v, base))
    return out


def smoothstep(t):
    return smoothstep_derivs(t, order=0)[0]


class DistanceCap:
    """Monotone C^4 cap eta with eta(t)=t for t<=1/2 and eta(t)=1 for t>=2.

    On the transition interval the derivative is the nonnegative polynomial
    a(1-S)^2 + b(1-S)^5 in u=(t-1/2)/(3/2); the rational weights a, b are
    chosen so the cap reaches exactly 1 at t=2.
    """

    LO, HI = 0.5, 2.0
    _A = float(Fraction(1965651386, 19083622761))
    _B = 1.0 - _A

    def __init__(self):
        # Gauss-Legendre rule exact for the degree-45 derivative polynomial.
        x, w = np.polynomial.legendre.leggauss(24)
        self._gl_x = 0.5 * (x + 1.0)
        self._gl_w = 0.5 * w

    def _h_derivs(self, u, order):
        """Derivatives of the transition slope h(u) = a(1-S)^2 + b(1-S)^5."""
        s = _poly_derivs(_S_COEF, u, order)
        # univariate jet arithmetic in Taylor-coefficient form
        from math import factorial
        n = order
        w = [-s[k] / factorial(k) for k in range(n + 1)]
        w[0] = 1.0 - s[0]

        def mul(p, q):
            r = [np.zeros(np.shape(u)) for _ in range(n + 1)]
            for i in range(n + 1):
                for j in range(n + 1 - i):
                    r[i + j] = r[i + j] + p[i] * q[j]
            return r

        w2 = mul(w, w)
        w5 = mul(mul(w2, w2), w)
        h = [self._A * a + self._B * b for a, b in zip(w2, w5)]
        return [h[k] * factorial(k) for k in range(n + 1)]

    def derivs(self, t, order=MAX_ORDER):
        t = np.asarray(t, dtype=float)
        lo, hi = self.LO, self.HI
        mid = (t > lo) & (t < hi)
        u = np.where(mid, (t - lo) / 1.5, 0.5)
        # value on the transition: 1/2 + 1.5 * int_0^u h
        nodes = u[..., None] * self._gl_x  # (..., 24)
        hvals = self._h_derivs(nodes, 0)[0]
        integral = 1.5 * u * np.sum(hvals * self._gl_w, axis=-1)
        val_mid = lo + integral
        out = [np.where(mid, val_mid, np.where(t <= lo, t, 1.0))]
        if order >= 1:
            h = self._h_derivs(u, order - 1)
            scale = 1.0
            for k in range(1, order + 1):
                dmid = h[k - 1] * scale
                base = np.where(t <= lo, 1.0, 0.0) if k == 1 else np.zeros(t.shape)
                out.append(np.where(mid, dmid, base))
                scale /= 1.5
        return out

    def __call__(self, t):
        return self.derivs(t, order=0)[0]


class RadialCutoff:
    """zeta(t): 1 on [0,1], falls to 0 on [1,2] via the smoothstep."""

    def derivs(self, t, order=MAX_ORDER):
        t = np.asarray(t, dtype=float)
        s = smoothstep_derivs(t - 1.0, order)
        out = [1.0 - s[0]]
        for k in range(1, order + 1):
            out.append(-s[k])
        return out

    def __call__(self, t):
        return self.derivs(t, order=0)[0]


class BumpProfile:
    """Reference bump for the unit cube: 1 on [0,1], support in (-1/2, 3/2).

    Rises as S(2t+1) on [-1/2, 0] and falls as 1 - S(2t-2) on [1, 3/2].
    """

    def derivs(self, t, order=MAX_ORDER):
        t = np.asarray(t, dtype=float)
        up = smoothstep_derivs(2.0 * t + 1.0, order)
        down = smoothstep_derivs(2.0 * t - 2.0, order)
        rising = t < 0.5
        out = [np.where(rising, up[0], 1.0 - down[0])]
        for k in range(1, order + 1):
            scale = 2.0 ** k
            out.append(np.where(rising, up[k], -down[k]) * scale)
        return out

    def __call__(self, t):
        return self.derivs(t, order=0)[0]


class DyadicWindow:
    """w with supp w subset (-1,1) and sum_j w(t - j) = 1 on the line."""

    def derivs(self, t, order=MAX_ORDER):
        t = np.asarray(t, dtype=float)
        up = smoothstep_derivs(t + 1.0, order)
        down = smoothstep_derivs(t, order)
        out = [up[0] - down[0]]
        for k in range(1, order + 1):
            out.append(up[k] - down[k])
        return out

    def __call__(self, t):
        return self.derivs(t, order=0)[0]


CAP = DistanceCap()
CUTOFF = RadialCutoff()
BUMP = BumpProfile()
WINDOW = DyadicWindow()
