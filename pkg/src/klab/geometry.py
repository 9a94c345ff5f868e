"""Domains, distance functions, Whitney decompositions, partitions of unity.

Two kinds of singular geometry are supported: the model domains
R^d minus the plane R^ell x {0}^(d-ell), and planar vertex sets (polygon
corners).  Whitney covers are enumerated greedily level by level; the
frozen certificate constants are ``C1 = 1`` (lower), ``C2 = 4 sqrt(d)``
(upper) and ``C0_LEVEL0 = 1`` for the coarsest level.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CoverageGap, InvalidParams, OutsideCover, SingularPoint
from .jets import Jet, norm_jet
from .profiles import BUMP, CAP, MAX_ORDER

C1 = 1.0
C2_FACTOR = 4.0  # upper certificate constant is C2_FACTOR * sqrt(d)
C0_LEVEL0 = 1.0


@dataclass(frozen=True)
class ModelDomain:
    """R^d with the plane R^ell x {0}^(d-ell) removed."""

    d: int
    ell: int

    def __post_init__(self):
        if not (1 <= self.d <= 3 and 0 <= self.ell < self.d):
            raise InvalidParams(f"need 0 <= ell < d <= 3, got d={self.d}, ell={self.ell}")

    @property
    def codim(self):
        return self.d - self.ell

    def distance(self, x):
        """dist(x, S) = |x''|, vectorized over points of shape (d, n)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[0] != self.d:
            x = x.T
        return np.sqrt(np.sum(x[self.ell:] ** 2, axis=0))

    def cube_distance(self, lo, hi):
        """Exact dist(S, box) for boxes given by corner arrays (n, d)."""
        lo = np.atleast_2d(np.asarray(lo, dtype=float))
        hi = np.atleast_2d(np.asarray(hi, dtype=float))
        lo2, hi2 = lo[:, self.ell:], hi[:, self.ell:]
        nearest = np.clip(0.0, lo2, hi2)
        return np.sqrt(np.sum(nearest ** 2, axis=1))


@dataclass(frozen=True)
class PolygonSingularSet:
    """Finite vertex set in the plane (polygon corners), d = 2, delta = 0."""

    points: tuple

    def __post_init__(self):
        pts = tuple(tuple(map(float, p)) for p in self.points)
        if len(set(pts)) != len(pts) or not pts:
            raise InvalidParams("vertices must be nonempty and pairwise distinct")
        object.__setattr__(self, "points", pts)

    d = 2
    ell = 0  # singular-set dimension

    @property
    def codim(self):
        return 2

    def distance(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[0] != 2:
            x = x.T
        dists = [np.sqrt((x[0] - p[0]) ** 2 + (x[1] - p[1]) ** 2) for p in self.points]
        return np.min(dists, axis=0)

    def cube_distance(self, lo, hi):
        lo = np.atleast_2d(np.asarray(lo, dtype=float))
        hi = np.atleast_2d(np.asarray(hi, dtype=float))
        best = None
        for p in self.points:
            nearest = np.clip(p, lo, hi)
            dist = np.sqrt(np.sum((nearest - p) ** 2, axis=1))
            best = dist if best is None else np.minimum(best, dist)
        return best


SOFTMIN_POWER = 8  # negative-power soft-min exponent for multi-vertex distance


def distance_to_singular_set(x, domain):
    """Exact distance to the singular set; raises on singular points."""
    dist = domain.distance(x)
    if np.any(dist == 0.0):
        raise SingularPoint("point lies on the singular set")
    return dist if dist.ndim else float(dist)


def _smoothed_distance_from_jets(coords, domain):
    """Pre-cap smooth distance as a jet of the coordinate jets `coords`.

    Model domains use |x''| directly (smooth off S); polygons combine the
    per-vertex distances by the negative-power soft-min.
    """
    if isinstance(domain, ModelDomain):
        return norm_jet(coords, which=range(domain.ell, domain.d))
    # polygon: softmin_k (sum_i d_i^-k)^(-1/k)
    k = SOFTMIN_POWER
    total = None
    for p in domain.points:
        di = norm_jet([coords[0] - p[0], coords[1] - p[1]])
        term = di.power(-k)
        total = term if total is None else total + term
    return total.power(-1.0 / k)


def regularized_distance_from_jets(coords, domain):
    """Jet of rho = eta(smoothed distance) built from coordinate jets."""
    raw = _smoothed_distance_from_jets(coords, domain)
    if np.any(raw.value <= 0.0):
        raise SingularPoint("point lies on the singular set")
    return raw.compose(CAP.derivs(raw.value, raw.order))


def regularized_distance_jet(x, domain, order=MAX_ORDER):
    """Jet of rho = eta(smoothed distance) at points x of shape (d, n)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return regularized_distance_from_jets(Jet.variables(x, order), domain)


def regularized_distance(x, domain):
    """rho(x) in (0, 1]; equals the exact distance below the cap knee."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[0] != domain.d:
        x = x.T
    if isinstance(domain, ModelDomain):
        raw = domain.distance(x)
    else:
        dists = np.stack([np.sqrt((x[0] - p[0]) ** 2 + (x[1] - p[1]) ** 2)
                          for p in domain.points])
        if np.any(dists == 0.0):
            raise SingularPoint("point lies on the singular set")
        k = SOFTMIN_POWER
        raw = np.sum(dists ** (-k), axis=0) ** (-1.0 / k)
    if np.any(raw == 0.0):
        raise SingularPoint("point lies on the singular set")
    out = CAP(raw)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Whitney covers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DyadicCube:
    """Q_{j,k} = 2^-j ((0,1)^d + k)."""

    j: int
    k: tuple

    @property
    def side(self):
        return 2.0 ** (-self.j)

    def bounds(self):
        h = self.side
        lo = np.array(self.k, dtype=float) * h
        return lo, lo + h

    def doubled_bounds(self):
        lo, hi = self.bounds()
        h = self.side
        return lo - 0.5 * h, hi + 0.5 * h


@dataclass
class WhitneyCover:
    domain: object
    box: tuple            # ((lo_1..lo_d), (hi_1..hi_d))
    j_max: int
    c1: float
    c2: float
    levels: dict = field(default_factory=dict)   # j -> ndarray (N_j, d) of k
    dists: dict = field(default_factory=dict)    # j -> ndarray (N_j,) dist(2Q, S)
    uncovered_volume: float = 0.0

    @property
    def counts(self):
        return {j: len(k) for j, k in self.levels.items() if len(k)}

    def total_volume(self):
        d = len(self.box[0])
        return sum(len(k) * 2.0 ** (-j * d) for j, k in self.levels.items())

    def box_volume(self):
        lo, hi = self.box
        return float(np.prod(np.asarray(hi) - np.asarray(lo)))

    def cubes(self, j):
        return [DyadicCube(j, tuple(int(v) for v in row)) for row in self.levels.get(j, [])]

    def level_key_set(self, j):
        return {tuple(int(v) for v in row) for row in self.levels.get(j, ())}

    def to_json(self):
        records = []
        for j in sorted(self.levels):
            ks = self.levels[j]
            ds = self.dists[j]
            order = np.lexsort(ks.T[::-1]) if len(ks) else []
            for i in order:
                records.append({"level": int(j),
                                "k": [int(v) for v in ks[i]],
                                "dist": float(ds[i])})
        return json.dumps({"box": [list(self.box[0]), list(self.box[1])],
                           "c1": self.c1, "c2": self.c2,
                           "j_max": self.j_max, "cubes": records})


def whitney_cover(domain, box, j_max):
    """Greedy level-by-level Whitney enumeration inside a dyadic box.

    A cube is selected at level j >= 1 when dist(2Q, S) >= c1 2^-j and its
    parent was rejected; level-0 cubes need dist(2Q, S) >= C0_LEVEL0.  The
    selected cubes partition the box up to a 2^-j_max collar of S.
    """
    if j_max < 2:
        raise InvalidParams("j_max must be at least 2")
    lo = np.asarray(box[0], dtype=float)
    hi = np.asarray(box[1], dtype=float)
    d = lo.size
    if np.any(lo != np.round(lo)) or np.any(hi != np.round(hi)) or np.any(hi <= lo):
        raise InvalidParams("bounding box corners must be integer (dyadic-aligned)")
    c1 = C1
    c2 = C2_FACTOR * math.sqrt(d)
    cover = WhitneyCover(domain, (tuple(lo), tuple(hi)), j_max, c1, c2)

    # level-0 candidates: all unit cubes in the box
    grids = np.meshgrid(*[np.arange(int(lo[i]), int(hi[i])) for i in range(d)],
                        indexing="ij")
    active = np.stack([g.ravel() for g in grids], axis=1)
    for j in range(j_max + 1):
        if active.size == 0:
            cover.levels[j] = np.empty((0, d), dtype=int)
            cover.dists[j] = np.empty(0)
        else:
            h = 2.0 ** (-j)
            qlo = active * h - 0.5 * h
            qhi = active * h + 1.5 * h
            dist = domain.cube_distance(qlo, qhi)
            thresh = C0_LEVEL0 if j == 0 else c1 * 2.0 ** (-j)
            take = dist >= thresh
            sel, seld = active[take], dist[take]
            if j >= 1 and len(seld) and np.any(seld > c2 * 2.0 ** (-j)):
                raise CoverageGap("upper Whitney certificate violated", 0.0)
            order = np.lexsort(sel.T[::-1]) if len(sel) else []
            cover.levels[j] = sel[order]
            cover.dists[j] = seld[order]
            active = active[~take]
        if j < j_max and active.size:
            # children of every rejected cube
            offs = np.stack(np.meshgrid(*([np.arange(2)] * d), indexing="ij"),
                            axis=-1).reshape(-1, d)
            active = (active[:, None, :] * 2 + offs[None, :, :]).reshape(-1, d)

    uncovered = len(active) * 2.0 ** (-j_max * d) if active.size else 0.0
    cover.uncovered_volume = uncovered
    if active.size:
        h = 2.0 ** (-j_max)
        dist = domain.cube_distance(active * h - 0.5 * h, active * h + 1.5 * h)
        if np.any(dist >= c1 * h):
            raise CoverageGap("uncovered cube outside the collar", uncovered)
    return cover


# ---------------------------------------------------------------------------
# Partition of unity
# ---------------------------------------------------------------------------

PSI_FLOOR = 1e-14


class PartitionOfUnity:
    """Normalized tensor bumps phi_{j,l} = bump_{j,l} / sum of all bumps."""

    def __init__(self, cover):
        self.cover = cover
        self.d = len(cover.box[0])
        self._offsets = np.stack(
            np.meshgrid(*([np.arange(-1, 2)] * self.d), indexing="ij"),
            axis=-1).reshape(-1, self.d)
        # per-level encoded key tables for vectorized membership tests
        self._tables = {}
        for j, ks in cover.levels.items():
            if not len(ks):
                continue
            kmin = ks.min(axis=0) - 1
            span = ks.max(axis=0) - kmin + 2
            strides = np.cumprod(np.concatenate(([1], span[:-1])))
            codes = np.sort((ks - kmin) @ strides)
            self._tables[j] = (kmin, span, strides, codes)

    # -- bump evaluation --------------------------------------------------
    def bump_jet(self, j, k, x, order=MAX_ORDER):
        """Jet of the tensor bump of cube(s) (j, k) at points x (d, n).

        `k` may be a single integer tuple or an array (d, n) of per-point
        cube indices.
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        k = np.asarray(k, dtype=float)
        if k.ndim == 1:
            k = k[:, None]
        scale = 2.0 ** j
        out = None
        for i in range(self.d):
            t = scale * x[i] - k[i]
            derivs = BUMP.derivs(t, order)
            derivs = [dv * scale ** kk for kk, dv in enumerate(derivs)]
            ji = Jet.variable(x[i], i, self.d, order).compose(derivs)
            out = ji if out is None else out * ji
        return out

    def bump(self, j, k, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        k = np.asarray(k, dtype=float)
        if k.ndim == 1:
            k = k[:, None]
        val = np.ones(x.shape[1])
        for i in range(self.d):
            val = val * BUMP(2.0 ** j * x[i] - k[i])
        return val

    def _neighbor_batches(self, x):
        """Yield (j, k_array (d, m), point_indices (m,)) for all cover cubes
        whose doubled cube contains the respective point."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        for j, (kmin, span, strides, codes) in self._tables.items():
            base = np.floor(x * 2.0 ** j).astype(int)  # (d, n)
            for off in self._offsets:
                cand = base + off[:, None]
                rel = cand - kmin[:, None]
                inside = np.all((rel >= 0) & (rel < span[:, None]), axis=0)
                t = x * 2.0 ** j - cand
                inside &= np.all((t > -0.5) & (t < 1.5), axis=0)
                if not inside.any():
                    continue
                enc = (rel * strides[:, None]).sum(axis=0)
                pos = np.searchsorted(codes, enc)
                pos = np.clip(pos, 0, len(codes) - 1)
                member = inside & (codes[pos] == enc)
                if member.any():
                    ixs = np.nonzero(member)[0]
                    yield j, cand[:, ixs], ixs

    def psi_jet(self, x, order=MAX_ORDER):
        """Jet of the un-normalized sum of bumps at points x (d, n)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        total = Jet.constant(0.0, self.d, order, (x.shape[1],))
        for j, kk, ixs in self._neighbor_batches(x):
            piece = self.bump_jet(j, kk, x[:, ixs], order)
            for m in range(len(total.coeffs)):
                np.add.at(total.coeffs[m], ixs, piece.coeffs[m])
        return total

    def phi_jet(self, j, k, x, order=MAX_ORDER):
        """Jet of the normalized phi_{j,l} at points x (d, n)."""
        psi = self.psi_jet(x, order)
        if np.any(psi.value < PSI_FLOOR):
            raise OutsideCover("point outside the covered region")
        return self.bump_jet(j, k, x, order) / psi

    def evaluate_sum(self, x):
        """sum phi = 1 on the covered region (errors where psi vanishes)."""
        psi = self.psi_jet(x, order=0)
        if np.any(psi.value < PSI_FLOOR):
            raise OutsideCover("point outside the covered region")
        return np.ones_like(psi.value)

    def overlap_count(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        count = np.zeros(x.shape[1], dtype=int)
        for j, kk, ixs in self._neighbor_batches(x):
            vals = self.bump(j, kk, x[:, ixs])
            count[ixs] += (vals != 0.0).astype(int)
        return count


def partition_of_unity(cover):
    return PartitionOfUnity(cover)
