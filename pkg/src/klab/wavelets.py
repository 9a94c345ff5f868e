"""Compactly supported orthonormal wavelets and F^s_{tau,2} sequence norms.

Realizes the standard wavelet characterization of F^s_{tau,2} (q = 2) for
tau <= 1 where no integral-smoothness norm is available: the L_tau norm of
the square function sum_{j,G,k} (2^{js} 2^{jd/2} |lambda_{j,G,k}| chi_{j,k})^2
over separable (tensor) wavelets on dyadic cubes chi_{j,k}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .errors import InvalidParams, Unsupported
from .norms import NormValue, FINITE, INCONCLUSIVE, TAIL_SHARE_LIMIT

CASCADE_K = 12          # cascade-table resolution 2^-K
MAX_LEVEL = 12          # deepest decomposition level

# Frozen Holder regularity of the order-N orthonormal family (mother wavelet
# smoothness; exceeds the required m with margin before an order is chosen).
REGULARITY = {2: 0.550, 3: 1.088, 4: 1.618, 5: 1.969,
              6: 2.189, 7: 2.460, 8: 2.761, 9: 3.074, 10: 3.367}


# ---------------------------------------------------------------------------
# Filter construction (spectral factorization)
# ---------------------------------------------------------------------------

def daubechies_filter(N):
    """Orthonormal scaling filter with N vanishing moments, length 2N.

    Built by spectral factorization: the halfband polynomial
    P(y) = sum_{k<N} C(N-1+k, k) y^k is rewritten in z via
    y = (2 - z - 1/z)/4; the roots inside the unit circle (Newton-polished)
    form the minimum-phase factor multiplying ((1+z)/2)^N.
    """
    if N == 1:
        return np.array([1.0, 1.0]) / np.sqrt(2.0)
    from math import comb
    # halfband polynomial P(y) = sum_{k<N} C(N-1+k, k) y^k, descending order
    P = np.array([comb(N - 1 + k, k) for k in range(N - 1, -1, -1)],
                 dtype=float)
    roots = np.roots(P)
    dP = np.polyder(P)
    for _ in range(4):                           # Newton polish in y
        roots = roots - np.polyval(P, roots) / np.polyval(dP, roots)
    # y = (2 - z - 1/z)/4  =>  z^2 - (2 - 4y) z + 1 = 0; take |z| < 1
    b = 2.0 - 4.0 * roots
    disc = np.sqrt(b ** 2 - 4.0 + 0j)
    z1, z2 = (b + disc) / 2.0, (b - disc) / 2.0
    inside = np.where(np.abs(z1) < np.abs(z2), z1, z2)
    if len(inside) != N - 1 or np.any(np.abs(inside) >= 1.0):
        raise InvalidParams(f"spectral factorization failed for N={N}")
    # h(z) = c ((1+z)/2)^N prod (z - r): expand and normalize h(1) = sqrt(2)
    coeffs = np.array([1.0])
    for _ in range(N):
        coeffs = np.convolve(coeffs, [0.5, 0.5])
    for r in inside:
        coeffs = np.convolve(coeffs, [1.0, -r])
    coeffs = np.real(coeffs)
    h = coeffs * (np.sqrt(2.0) / np.sum(coeffs))
    return h[::-1].copy()                        # ascending index order


def filter_orthonormality_defect(h):
    """max_n |sum_k h_k h_{k+2n} - delta_n| over all shifts n."""
    F = len(h)
    worst = 0.0
    for n in range(F // 2):
        v = float(np.dot(h[:F - 2 * n], h[2 * n:]))
        worst = max(worst, abs(v - (1.0 if n == 0 else 0.0)))
    return worst


# ---------------------------------------------------------------------------
# Cascade evaluation
# ---------------------------------------------------------------------------

def _cascade(h, K=CASCADE_K):
    """Scaling function phi and wavelet psi on the grid {i 2^-K} of
    [0, F-1], F = len(h), via exact integer values (refinement eigenvector)
    and dyadic refinement."""
    F = len(h)
    # integer values: phi(n) for n = 1..F-2 from the eigenvalue-1 eigenvector
    n = F - 2
    A = np.zeros((n, n))
    for i in range(1, F - 1):
        for jj in range(1, F - 1):
            m = 2 * i - jj
            if 0 <= m < F:
                A[i - 1, jj - 1] = np.sqrt(2.0) * h[m]
    w, v = np.linalg.eig(A)
    vec = np.real(v[:, np.argmin(np.abs(w - 1.0))])
    vec = vec / np.sum(vec)                      # sum phi(n) = 1
    level_vals = np.zeros(F)                     # phi on the integer grid
    level_vals[1:F - 1] = vec
    for lev in range(1, K + 1):
        prev = level_vals
        step = (F - 1) * 2 ** lev + 1
        cur = np.zeros(step)
        cur[::2] = prev
        # odd points: phi(x) = sqrt(2) sum h_m phi(2x - m)
        xs = (np.arange(1, step, 2)) / 2.0 ** lev
        acc = np.zeros(len(xs))
        for m in range(F):
            t = 2.0 * xs - m                     # arguments on the prev grid
            idx = t * 2.0 ** (lev - 1)
            ii = np.rint(idx).astype(int)
            ok = (np.abs(idx - ii) < 1e-9) & (ii >= 0) & (ii < len(prev))
            acc[ok] += np.sqrt(2.0) * h[m] * prev[ii[ok]]
        cur[1::2] = acc
        level_vals = cur
    phi_tab = level_vals
    # psi(x) = sqrt(2) sum g_m phi(2x - m), g_m = (-1)^m h_{F-1-m}
    g = np.array([(-1) ** m * h[F - 1 - m] for m in range(F)])
    xs = np.arange(len(phi_tab)) / 2.0 ** K
    psi_tab = np.zeros_like(phi_tab)
    for m in range(F):
        t = 2.0 * xs - m
        idx = t * 2.0 ** K
        ii = np.rint(idx).astype(int)
        ok = (ii >= 0) & (ii < len(phi_tab))
        psi_tab[ok] += np.sqrt(2.0) * g[m] * phi_tab[ii[ok]]
    return phi_tab, psi_tab, g


@dataclass(frozen=True)
class WaveletSystem:
    filter: np.ndarray                 # scaling filter h, ascending index
    gfilter: np.ndarray                # wavelet filter g
    order: int                         # vanishing moments N
    regularity_order: float
    phi_table: np.ndarray              # phi on [0, 2N-1], step 2^-CASCADE_K
    psi_table: np.ndarray
    first_moment: float                # int x phi(x) dx

    @property
    def support_length(self):
        return len(self.filter) - 1

    def phi(self, x):
        """Scaling function by table interpolation (0 outside support)."""
        grid = np.arange(len(self.phi_table)) / 2.0 ** CASCADE_K
        return np.interp(x, grid, self.phi_table, left=0.0, right=0.0)

    def psi(self, x):
        grid = np.arange(len(self.psi_table)) / 2.0 ** CASCADE_K
        return np.interp(x, grid, self.psi_table, left=0.0, right=0.0)


def build_wavelet_system(m):
    """Shortest standard orthonormal system with Holder regularity > m."""
    for N in sorted(REGULARITY):
        if REGULARITY[N] > m:
            break
    else:
        raise Unsupported(f"no tabulated filter with regularity > {m}")
    h = daubechies_filter(N)
    phi_tab, psi_tab, g = _cascade(h)
    mu = float(np.dot(np.arange(len(h)), h)) / np.sqrt(2.0)
    return WaveletSystem(filter=h, gfilter=g, order=N,
                         regularity_order=REGULARITY[N],
                         phi_table=phi_tab, psi_table=psi_tab,
                         first_moment=mu)


def estimate_holder_regularity(system, levels=(8, 12)):
    """Cascade-based Holder exponent: the max increment of phi at dyadic
    spacing h scales like h^alpha, so alpha is the log2 slope between two
    resolutions."""
    vals = []
    for K in levels:
        tab = system.phi_table[::2 ** (CASCADE_K - K)]
        vals.append(np.max(np.abs(np.diff(tab))))
    return float(np.log2(vals[0] / vals[1]) / (levels[1] - levels[0]))


# ---------------------------------------------------------------------------
# Coefficient grids
# ---------------------------------------------------------------------------

@dataclass
class CoefficientGrid:
    """Finitely supported wavelet coefficients.

    levels[j][gender] = (origin, array) with gender a string over {A, D} of
    length d ('A' = scaling direction); level 0 carries the pure-scaling band
    'A'*d in addition to the wavelet genders.
    """

    d: int
    J: int
    levels: dict = field(default_factory=dict)

    def sum_of_squares(self):
        return sum(float(np.sum(arr ** 2))
                   for bands in self.levels.values()
                   for _, arr in bands.values())

    def scale(self, c):
        out = CoefficientGrid(self.d, self.J)
        out.levels = {j: {g: (o, arr * c) for g, (o, arr) in bands.items()}
                      for j, bands in self.levels.items()}
        return out

    def max_abs_per_level(self):
        return {j: max((float(np.max(np.abs(arr))) if arr.size else 0.0)
                       for _, arr in bands.values())
                for j, bands in self.levels.items()}

    def csv_rows(self):
        """Deterministic flat rows {j, G, k..., value}, nonzero entries."""
        for j in sorted(self.levels):
            for g in sorted(self.levels[j]):
                origin, arr = self.levels[j][g]
                it = np.nditer(arr, flags=["multi_index"])
                for v in it:
                    if v != 0.0:
                        k = tuple(int(o + i) for o, i
                                  in zip(origin, it.multi_index))
                        yield (j, g) + k + (float(v),)


def _analyze_axis(arr, origin, filt, axis):
    """Decimated correlation a_k = sum_m filt_m A_{m+2k} along one axis.

    `origin` is the integer index of the first entry along that axis.
    Returns (output array, output origin).
    """
    F = len(filt)
    shape = [1] * arr.ndim
    shape[axis] = F
    kernel = filt[::-1].reshape(shape)
    full = fftconvolve(arr, kernel, mode="full")
    L = arr.shape[axis]
    k0 = -(-(origin - F + 1) // 2)               # ceil division
    t0 = 2 * k0 - origin + F - 1
    sl = [slice(None)] * arr.ndim
    sl[axis] = slice(t0, L + F - 1, 2)
    return full[tuple(sl)], k0


def wavelet_coefficients(u, system, J, box, d=None, projection="sample"):
    """Analysis transform of u on the given box down from level J.

    projection="sample": initial level-J scaling coefficients by one-point
    first-moment-corrected sampling c_{J,k} = 2^{-Jd/2} u(2^{-J}(k + mu))
    (second-order accurate for smooth u).  projection="table": composite
    quadrature of u against the cascade table (d = 1 only); exact up to the
    table resolution, used for orthonormality experiments.
    """
    if J > MAX_LEVEL:
        raise Unsupported(f"J capped at {MAX_LEVEL} by the cascade resolution")
    lo, hi = (np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float))
    if d is None:
        d = len(lo)
    F = len(system.filter)
    k_lo = np.floor(lo * 2 ** J).astype(int) - (F - 1)
    k_hi = np.ceil(hi * 2 ** J).astype(int) + 1
    shape = tuple(k_hi - k_lo)
    if projection == "sample":
        axes = [(np.arange(k_lo[i], k_hi[i]) + system.first_moment)
                * 2.0 ** -J for i in range(d)]
        data = np.empty(shape)
        chunk = max(1, 2 ** 19 // max(1, int(np.prod(shape[1:]))))
        for r0 in range(0, shape[0], chunk):
            r1 = min(r0 + chunk, shape[0])
            grids = np.meshgrid(axes[0][r0:r1], *axes[1:], indexing="ij")
            pts = np.stack([g.ravel() for g in grids])
            data[r0:r1] = np.asarray(u(pts), dtype=float).reshape(
                (r1 - r0,) + shape[1:])
        data *= 2.0 ** (-J * d / 2.0)
    elif projection == "table":
        if d != 1:
            raise Unsupported("table projection implemented for d = 1")
        # c_{J,k} = 2^{-J/2} 2^{-K} sum_i u(2^{-J}(t_i + k)) phi(t_i) with
        # t_i = i 2^{-K}: a strided correlation of fine samples with phi.
        stride = 2 ** CASCADE_K
        n0 = k_lo[0] * stride
        n1 = (k_hi[0] - 1 + F - 1) * stride
        xs = np.arange(n0, n1 + 1) * 2.0 ** -(CASCADE_K + J)
        samples = np.asarray(u(xs[None, :]), dtype=float).ravel()
        corr = fftconvolve(samples, system.phi_table[::-1], mode="valid")
        data = corr[::stride][:shape[0]] \
            * 2.0 ** -CASCADE_K * 2.0 ** (-J / 2.0)
        data = data.reshape(shape)
    else:
        raise InvalidParams("projection must be 'sample' or 'table'")

    grid = CoefficientGrid(d=d, J=J)
    arr, origin = data, tuple(int(v) for v in k_lo)
    for j in range(J, 0, -1):
        bands = {}
        cur = {"": (arr, origin)}
        for axis in range(d):
            nxt = {}
            for g, (A, o) in cur.items():
                lowA, o_low = _analyze_axis(A, o[axis], system.filter, axis)
                highA, o_high = _analyze_axis(A, o[axis], system.gfilter, axis)
                nxt[g + "A"] = (lowA, o[:axis] + (o_low,) + o[axis + 1:])
                nxt[g + "D"] = (highA, o[:axis] + (o_high,) + o[axis + 1:])
            cur = nxt
        for g, (A, o) in cur.items():
            if g == "A" * d:
                arr, origin = A, o
            else:
                bands[g] = (o, A)
        grid.levels[j - 1] = bands               # analysis of level-j scaling
    grid.levels[0] = dict(grid.levels.get(0, {}))
    grid.levels[0]["A" * d] = (origin, arr)
    return grid


def synthesize(system, j, k, gender, d):
    """Callable for the tensor wavelet 2^{jd/2} Psi^G(2^j x - k)."""
    k = tuple(k)

    def fn(x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.full(x.shape[1], 2.0 ** (j * d / 2.0))
        for i in range(d):
            t = 2.0 ** j * x[i] - k[i]
            out = out * (system.phi(t) if gender[i] == "A" else system.psi(t))
        return out

    return fn


# ---------------------------------------------------------------------------
# Sequence norm
# ---------------------------------------------------------------------------

def _fine_box(coeffs):
    """Integer-aligned spatial bounding box of all nonzero coefficients."""
    lo = np.full(coeffs.d, np.inf)
    hi = np.full(coeffs.d, -np.inf)
    for j, bands in coeffs.levels.items():
        for origin, arr in bands.values():
            nz = np.nonzero(arr)
            if not len(nz[0]):
                continue
            for ax in range(coeffs.d):
                lo[ax] = min(lo[ax], (origin[ax] + nz[ax].min()) * 2.0 ** -j)
                hi[ax] = max(hi[ax], (origin[ax] + nz[ax].max() + 1) * 2.0 ** -j)
    if not np.all(np.isfinite(lo)):
        return None
    return np.floor(lo).astype(int), np.ceil(hi).astype(int)


def f_sequence_norm(coeffs, s, tau, strip_rows=256):
    """L_tau norm of the square function of the coefficient grid.

    Returns a NormValue whose truncations list the partial norms including
    levels <= j; classification flips to Inconclusive when the last three
    levels carry more than 10% of the integral.
    """
    d, J = coeffs.d, coeffs.J
    sigma = d * (1.0 / min(1.0, tau) - 1.0)
    if not (s > sigma or (tau >= 1.0 and s >= sigma)):
        raise InvalidParams("sequence norm requires s > sigma_{tau,2}")
    box = _fine_box(coeffs)
    if box is None:
        return NormValue(value=0.0, truncations=[(2.0 ** -J, 0.0)],
                         classification=FINITE, quadrature_order=0)
    lo, hi = box
    nf = (hi - lo) * 2 ** J                      # fine cells per axis
    levels = sorted(coeffs.levels)
    partial = {j: 0.0 for j in levels}           # integral with levels <= j
    cell_vol = 2.0 ** (-J * d)

    n_rows = nf[0]
    for r0 in range(0, n_rows, strip_rows):
        r1 = min(r0 + strip_rows, n_rows)
        sq = np.zeros((r1 - r0,) + tuple(nf[1:]))
        for j in levels:
            fct = 2 ** (J - j)
            weight = 4.0 ** (j * (s + d / 2.0))
            for origin, arr in coeffs.levels[j].values():
                if not arr.size:
                    continue
                # coarse index ranges overlapping the strip / the fine box
                c_lo = [lo[ax] * 2 ** j - origin[ax] for ax in range(d)]
                sl, fine_off, fine_len = [], [], []
                ok = True
                for ax in range(d):
                    if ax == 0:
                        a = (r0 // fct) + c_lo[0]
                        b = -(-r1 // fct) + c_lo[0]
                    else:
                        a = c_lo[ax]
                        b = c_lo[ax] + nf[ax] // fct
                    a0, b0 = max(a, 0), min(b, arr.shape[ax])
                    if a0 >= b0:
                        ok = False
                        break
                    sl.append(slice(a0, b0))
                    fine_off.append((a0 - c_lo[ax]) * fct
                                    - (r0 if ax == 0 else 0))
                    fine_len.append((b0 - a0) * fct)
                if not ok:
                    continue
                block = arr[tuple(sl)] ** 2 * weight
                for ax in range(d):
                    block = np.repeat(block, fct, axis=ax)
                # clip the block into the strip window
                tgt, src = [], []
                for ax in range(d):
                    limit = (r1 - r0) if ax == 0 else nf[ax]
                    t0 = max(fine_off[ax], 0)
                    t1 = min(fine_off[ax] + fine_len[ax], limit)
                    if t0 >= t1:
                        ok = False
                        break
                    tgt.append(slice(t0, t1))
                    src.append(slice(t0 - fine_off[ax], t1 - fine_off[ax]))
                if ok:
                    sq[tuple(tgt)] += block[tuple(src)]
            partial[j] += float(np.sum(sq ** (tau / 2.0))) * cell_vol
    truncs = [(2.0 ** -j, partial[j] ** (1.0 / tau)) for j in levels]
    total = partial[levels[-1]]
    out = NormValue(value=truncs[-1][1], truncations=truncs,
                    classification=FINITE, quadrature_order=0)
    if len(levels) > 3 and total > 0:
        low = partial[levels[-4]]
        if 1.0 - low / total > TAIL_SHARE_LIMIT:
            out.classification = INCONCLUSIVE
    return out
