"""Truncated multivariate Taylor arithmetic (forward jets).

A :class:`Jet` carries the Taylor coefficients c_alpha = d^alpha f / alpha!
of a function at a batch of points, truncated at a fixed total order.  All
coefficient slots are numpy arrays of a common shape, so a single jet
evaluates a whole batch of points at once.  Composition with univariate
outer functions (powers, log, piecewise polynomials) is done by truncated
series substitution, which is exact at the carried order.
"""

from functools import lru_cache
from math import factorial

import numpy as np


@lru_cache(maxsize=None)
def multi_indices(dim, order):
    """All multi-indices of length `dim` with total degree <= `order`,
    sorted by (degree, lexicographic)."""
    idx = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            idx.append(tuple(prefix))
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, slots - 1)

    for deg in range(order + 1):
        block = []

        def rec2(prefix, left, slots):
            if slots == 1:
                block.append(tuple(prefix + [left]))
                return
            for k in range(left + 1):
                rec2(prefix + [k], left - k, slots - 1)

        rec2([], deg, dim)
        idx.extend(sorted(block))
    return tuple(idx)


@lru_cache(maxsize=None)
def _mul_table(dim, order):
    """Pairs (i, j, k): index_i + index_j = index_k with |index_k| <= order."""
    idx = multi_indices(dim, order)
    pos = {a: n for n, a in enumerate(idx)}
    table = []
    for i, a in enumerate(idx):
        for j, b in enumerate(idx):
            c = tuple(x + y for x, y in zip(a, b))
            if sum(c) <= order:
                table.append((i, j, pos[c]))
    return table


@lru_cache(maxsize=None)
def _alpha_factorials(dim, order):
    idx = multi_indices(dim, order)
    return np.array([float(np.prod([factorial(k) for k in a])) for a in idx])


class Jet:
    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, dim, order, coeffs):
        self.dim = dim
        self.order = order
        self.coeffs = coeffs  # list of ndarrays, aligned with multi_indices

    # -- constructors ---------------------------------------------------
    @classmethod
    def constant(cls, value, dim, order, shape=()):
        idx = multi_indices(dim, order)
        coeffs = [np.zeros(shape) for _ in idx]
        coeffs[0] = np.broadcast_to(np.asarray(value, dtype=float), shape).copy() \
            if shape else np.asarray(value, dtype=float)
        return cls(dim, order, coeffs)

    @classmethod
    def variable(cls, values, i, dim, order):
        values = np.asarray(values, dtype=float)
        idx = multi_indices(dim, order)
        coeffs = [np.zeros(values.shape) for _ in idx]
        coeffs[0] = values.copy()
        if order >= 1:
            unit = tuple(1 if j == i else 0 for j in range(dim))
            coeffs[idx.index(unit)] = np.ones(values.shape)
        return cls(dim, order, coeffs)

    @classmethod
    def variables(cls, points, order):
        """Coordinate jets for points of shape (dim, npts)."""
        points = np.asarray(points, dtype=float)
        dim = points.shape[0]
        return [cls.variable(points[i], i, dim, order) for i in range(dim)]

    # -- basic queries ---------------------------------------------------
    @property
    def value(self):
        return self.coeffs[0]

    def derivative(self, alpha):
        """Partial derivative d^alpha f (not the Taylor coefficient)."""
        idx = multi_indices(self.dim, self.order)
        fac = float(np.prod([factorial(k) for k in alpha]))
        return self.coeffs[idx.index(tuple(alpha))] * fac

    def copy(self):
        return Jet(self.dim, self.order, [c.copy() for c in self.coeffs])

    def derivative_jet(self, alpha):
        """Jet of d^alpha f, of order self.order - |alpha|.

        The Taylor coefficient of d^alpha f at gamma is
        c_{gamma+alpha} * (gamma+alpha)! / gamma!.
        """
        alpha = tuple(int(k) for k in alpha)
        new_order = self.order - sum(alpha)
        if new_order < 0:
            raise ValueError("derivative order exceeds jet order")
        idx = multi_indices(self.dim, self.order)
        pos = {a: i for i, a in enumerate(idx)}
        coeffs = []
        for gamma in multi_indices(self.dim, new_order):
            delta = tuple(g + al for g, al in zip(gamma, alpha))
            fac = float(np.prod([factorial(dk) / factorial(gk)
                                 for dk, gk in zip(delta, gamma)]))
            coeffs.append(self.coeffs[pos[delta]] * fac)
        return Jet(self.dim, new_order, coeffs)

    # -- arithmetic -------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        shape = np.shape(self.coeffs[0])
        return Jet.constant(other, self.dim, self.order, shape)

    def __add__(self, other):
        other = self._lift(other)
        return Jet(self.dim, self.order,
                   [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.dim, self.order, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.dim, self.order, [a * other for a in self.coeffs])
        table = _mul_table(self.dim, self.order)
        shape = np.broadcast_shapes(np.shape(self.coeffs[0]),
                                    np.shape(other.coeffs[0]))
        out = [np.zeros(shape) for _ in self.coeffs]
        a, b = self.coeffs, other.coeffs
        for i, j, k in table:
            out[k] += a[i] * b[j]
        return Jet(self.dim, self.order, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    # -- univariate composition -------------------------------------------
    def compose(self, outer_derivs):
        """Substitute this jet into an outer univariate function.

        `outer_derivs[k]` must hold the k-th derivative of the outer
        function evaluated at `self.value`, for k = 0..order.
        """
        n = self.order
        delta = self.copy()
        delta.coeffs[0] = np.zeros_like(delta.coeffs[0])
        shape = np.broadcast_shapes(np.shape(self.coeffs[0]),
                                    np.shape(outer_derivs[0]))
        result = Jet.constant(0.0, self.dim, n, shape)
        result.coeffs[0] = result.coeffs[0] + outer_derivs[0]
        power = None
        for k in range(1, n + 1):
            power = delta if power is None else power * delta
            gk = np.asarray(outer_derivs[k]) / factorial(k)
            for m in range(len(result.coeffs)):
                result.coeffs[m] = result.coeffs[m] + gk * power.coeffs[m]
        return result

    def reciprocal(self):
        v = self.value
        derivs = [(-1.0) ** k * factorial(k) / v ** (k + 1)
                  for k in range(self.order + 1)]
        return self.compose(derivs)

    def power(self, exponent):
        """self ** exponent for real exponent; base must be positive."""
        if exponent == 0:
            return Jet.constant(1.0, self.dim, self.order,
                                np.shape(self.coeffs[0]))
        v = self.value
        derivs = []
        c = 1.0
        for k in range(self.order + 1):
            derivs.append(c * v ** (exponent - k))
            c *= (exponent - k)
        return self.compose(derivs)

    def sqrt(self):
        return self.power(0.5)

    def log(self):
        v = self.value
        derivs = [np.log(v)]
        for k in range(1, self.order + 1):
            derivs.append((-1.0) ** (k - 1) * factorial(k - 1) / v ** k)
        return self.compose(derivs)


def norm_jet(coord_jets, which=None):
    """Jet of the Euclidean norm of a subset of coordinates.

    `which` selects coordinate positions (default: all).  The evaluation
    points must keep the selected norm strictly positive.
    """
    sel = coord_jets if which is None else [coord_jets[i] for i in which]
    sq = sel[0] * sel[0]
    for c in sel[1:]:
        sq = sq + c * c
    return sq.sqrt()
