"""Whitney covers, partitions of unity, and the regularized distance."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from klab.errors import InvalidParams, OutsideCover
from klab.geometry import (C1, C2_FACTOR, ModelDomain, PartitionOfUnity,
                           PSI_FLOOR, regularized_distance, whitney_cover)


@pytest.fixture(scope="module")
def cover2d():
    return whitney_cover(ModelDomain(2, 0), ((-2, -2), (2, 2)), 8)


@pytest.fixture(scope="module")
def pou2d(cover2d):
    return PartitionOfUnity(cover2d)


def test_cover_is_a_partition_of_the_box(cover2d):
    # selected cubes are pairwise disjoint and fill the box up to the collar
    total = cover2d.total_volume()
    assert total <= cover2d.box_volume() + 1e-12
    collar = cover2d.box_volume() - total
    # uncovered region sits inside a ball of radius ~ c2 2^-j_max
    r = C2_FACTOR * math.sqrt(2) * 2.0 ** -8 * 4
    assert 0 < collar < math.pi * r ** 2


def test_certificates(cover2d):
    dom = cover2d.domain
    for j, ks in cover2d.levels.items():
        if not len(ks):
            continue
        h = 2.0 ** (-j)
        dist = dom.cube_distance(ks * h - 0.5 * h, ks * h + 1.5 * h)
        assert np.array_equal(dist, cover2d.dists[j])
        if j >= 1:
            assert np.all(dist >= C1 * h)
            assert np.all(dist <= C2_FACTOR * math.sqrt(2) * h)


@pytest.mark.parametrize("d,ell", [(2, 0), (2, 1), (3, 1)])
def test_level_count_growth(d, ell):
    cover = whitney_cover(ModelDomain(d, ell), ((-2,) * d, (2,) * d), 8)
    counts = cover.counts
    rates = [math.log2(counts[j + 1] / counts[j]) for j in range(4, 7)]
    for r in rates:
        assert abs(r - ell) <= 0.2


def test_invalid_box_rejected():
    with pytest.raises(InvalidParams):
        whitney_cover(ModelDomain(2, 0), ((-1.5, 0), (1, 1)), 6)
    with pytest.raises(InvalidParams):
        whitney_cover(ModelDomain(2, 0), ((0, 0), (1, 1)), 1)


def test_partition_sums_to_one(pou2d):
    rng = np.random.default_rng(7)
    pts = (rng.random((2, 2000)) - 0.5) * 4.0
    psi = pou2d.psi_jet(pts, order=0).value
    covered = psi > PSI_FLOOR
    total = np.zeros(pts.shape[1])
    for j, kk, ixs in pou2d._neighbor_batches(pts):
        total[ixs] += pou2d.bump(j, kk, pts[:, ixs]) / psi[ixs]
    assert np.max(np.abs(total[covered] - 1.0)) < 1e-10


def test_overlap_count_bounded(pou2d):
    rng = np.random.default_rng(8)
    pts = (rng.random((2, 500)) - 0.5) * 3.9
    counts = pou2d.overlap_count(pts)
    assert counts.max() <= 3 ** 2 * 2  # neighbors within level and adjacent


def test_phi_jet_matches_finite_difference(pou2d, cover2d):
    j = 2
    k = tuple(cover2d.levels[j][0])
    x0 = (np.array(k, dtype=float) + 0.4) * 2.0 ** -j
    jet = pou2d.phi_jet(j, np.array(k), x0.reshape(2, 1), order=2)
    h = 1e-5
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        fp = pou2d.phi_jet(j, np.array(k), (x0 + e).reshape(2, 1), 0).value
        fm = pou2d.phi_jet(j, np.array(k), (x0 - e).reshape(2, 1), 0).value
        alpha = tuple(1 if q == i else 0 for q in range(2))
        assert float(jet.derivative(alpha)[0]) == pytest.approx(
            float((fp[0] - fm[0]) / (2 * h)), abs=1e-6, rel=1e-5)


def test_outside_cover_raises(pou2d):
    with pytest.raises(OutsideCover):
        pou2d.phi_jet(0, np.array((0, 0)), np.array([[0.0], [0.0]]), 0)


def test_regularized_distance_bounds():
    dom = ModelDomain(2, 0)
    rng = np.random.default_rng(5)
    pts = (rng.random((1000, 2)) - 0.5) * 6
    rho = np.array([regularized_distance(p, dom) for p in pts])
    dist = dom.distance(pts)
    assert np.all(rho > 0)
    assert np.all(rho <= 1.0 + 1e-15)
    near = dist < 0.05
    # rho equals the true distance well below the cap knee
    assert np.allclose(rho[near], dist[near])
    far = dist > 2.0
    assert np.all(rho[far] > 0.9)


@pytest.mark.parametrize("alpha,bound", [((1, 0), 1.2), ((0, 1), 1.2),
                                         ((2, 0), 3.5), ((1, 1), 3.5),
                                         ((2, 2), 60.0)])
def test_rho_derivative_bound(alpha, bound):
    # |d^alpha rho| <= A_alpha rho^(1-|alpha|); constants frozen after fit
    from klab.geometry import regularized_distance_jet
    dom = ModelDomain(2, 0)
    rng = np.random.default_rng(11)
    pts = 10.0 ** rng.uniform(-3, 0.5, size=(200, 1)) \
        * rng.standard_normal((200, 2))
    pts = pts[dom.distance(pts) > 1e-6]
    order = sum(alpha)
    for p in pts[:120]:
        jet = regularized_distance_jet(p.reshape(2, 1), dom, order=order)
        rho = float(np.atleast_1d(jet.value)[0])
        da = float(np.atleast_1d(jet.derivative(alpha))[0])
        assert abs(da) <= bound * rho ** (1 - order) + 1e-12


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(2, 5))
@settings(max_examples=40, deadline=None)
def test_cube_acceptance_is_scale_consistent(kx, ky, j):
    # the same geometric cube at finer indexing keeps its certificate
    dom = ModelDomain(2, 0)
    h = 2.0 ** -j
    lo = np.array([[kx * h - 0.5 * h, ky * h - 0.5 * h]])
    hi = np.array([[kx * h + 1.5 * h, ky * h + 1.5 * h]])
    d1 = dom.cube_distance(lo, hi)[0]
    d2 = dom.cube_distance(lo * 2, hi * 2)[0]   # parent scale
    assert d2 == pytest.approx(2 * d1, rel=1e-12, abs=1e-15)
