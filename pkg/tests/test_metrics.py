"""Tests for metrics: label processes, the distance sandwich, ball growth."""

import math

import numpy as np
import pytest

from cms import cms_forward, distance_upper_bound
from errors import IndexOutOfRange, RadiusGridTooCoarse, UsageError
from gtree import enumerate_well_labeled_gtrees
from map_core import torus_grid_map
from metrics import (GAMMA, DistanceProcess, SampleBundle, SparseTableMin, bfs_distances,
                     build_global_label_process, compare_batches, d_circ, dimension_estimate,
                     distance_lower_bound, global_contour, lineage, lower_bound_row,
                     profile_and_radius, radius_grid, rescale_factor, rescaled_distance, two_point_statistic)
from scheme import decompose
from streams import Stream


def test_gamma():
    assert GAMMA == pytest.approx((8 / 9) ** 0.25)
    assert rescale_factor(16) == pytest.approx(2 * GAMMA)


def test_sparse_table_matches_brute_force():
    rng = np.random.default_rng(1)
    values = rng.integers(-20, 20, size=37)
    table = SparseTableMin(values)
    for i in range(37):
        for j in range(i, 37):
            assert table.query(i, j) == values[i:j + 1].min()
    assert table.cyclic(30, 3) == min(values[30:].min(), values[:4].min())
    with pytest.raises(IndexOutOfRange):
        table.query(5, 37)
    with pytest.raises(IndexOutOfRange):
        table.query(6, 5)


def test_lineage_interval_convention():
    contour = np.array([2, 3, 2, 1, 2, 1, 0])
    assert lineage(contour, 1, 6) == [1, 2]
    assert lineage(contour, 1, 0) == [1, 0]
    assert lineage(contour, 4, 4) == [4]


def bundles():
    for n in (2, 3, 4):
        for w in enumerate_well_labeled_gtrees(1, n):
            quad = decompose(w)
            for eps in (-1, 1):
                yield w, quad, cms_forward(w, eps)


def test_label_process_reads_corner_labels_from_the_offset():
    for w, quad, _ in bundles():
        proc = build_global_label_process(quad)
        size = 2 * w.n_edges
        c = w.corner_labels()
        u = quad.root_offset
        assert proc.lifetime == size
        assert proc.values[0] == proc.values[-1] == 0
        for i in range(size):
            assert proc.values[i] == c[(i - u) % size] - c[(-u) % size]


def test_global_contour_shape():
    for w, quad, _ in bundles():
        c = global_contour(quad)
        assert len(c) == 2 * w.n_edges + 1
        assert c[0] == sum(quad.sigma)
        assert c[-1] == 0
        assert np.all(np.abs(np.diff(c)) == 1)


def test_d_circ_is_the_cms_upper_bound():
    for w, quad, pq in bundles():
        proc = build_global_label_process(quad)
        size = 2 * w.n_edges
        u = quad.root_offset
        for i in range(size + 1):
            for j in range(size + 1):
                assert d_circ(proc, i, j) == distance_upper_bound(pq, (i - u) % size, (j - u) % size)


def test_distance_sandwich_exhaustive():
    for w, quad, pq in bundles():
        proc = build_global_label_process(quad)
        contour = global_contour(quad)
        dist = DistanceProcess(pq, quad.root_offset)
        size = 2 * w.n_edges
        for i in range(size + 1):
            for j in range(size + 1):
                d = dist.d(i, j)
                assert distance_lower_bound(proc, contour, i, j) <= d <= d_circ(proc, i, j)


def test_distance_sandwich_on_a_sample():
    b = SampleBundle.from_seed(1, 80, seed=5)
    size = 2 * b.n
    for i in range(0, size + 1, 9):
        for j in range(0, size + 1, 4):
            d = b.distances.d(i, j)
            assert distance_lower_bound(b.label_process, b.contour, i, j) <= d
            assert d <= d_circ(b.label_process, i, j)


def test_lower_bound_row_matches_pointwise_bound():
    b = SampleBundle.from_seed(1, 70, seed=6)
    size = 2 * b.n
    for i in (0, 1, 17, 70, size - 1, size):
        row = lower_bound_row(b.label_process, b.contour, i)
        assert row[i] == 0
        assert list(row) == [distance_lower_bound(b.label_process, b.contour, i, j)
                             for j in range(size + 1)]
    with pytest.raises(UsageError):
        lower_bound_row(b.label_process, b.contour[:-1], 0)


def test_index_errors():
    b = SampleBundle.from_seed(1, 10, seed=1)
    with pytest.raises(IndexOutOfRange):
        d_circ(b.label_process, 0, 21)
    with pytest.raises(IndexOutOfRange):
        b.distances.d(-1, 3)
    with pytest.raises(UsageError):
        distance_lower_bound(b.label_process, b.contour[:-1], 0, 3)
    with pytest.raises(UsageError):
        rescaled_distance(b.distances, 0.0, 1.5)


def test_distance_process_basics():
    b = SampleBundle.from_seed(1, 30, seed=2)
    dist = b.distances
    size = 2 * b.n
    for i in range(0, size + 1, 5):
        assert dist.d(i, i) == 0
        assert dist.d(0, i) == dist.d(i, 0)
    assert dist.d(0, size) == 0
    assert dist.interpolated(3.0, 7.0) == dist.d(3, 7)
    mid = dist.interpolated(3.5, 7.0)
    assert min(dist.d(3, 7), dist.d(4, 7)) <= mid <= max(dist.d(3, 7), dist.d(4, 7))
    assert rescaled_distance(dist, 0.0, 1.0) == 0.0
    assert rescaled_distance(dist, 0.25, 0.5) == pytest.approx(dist.d(15, 30) / rescale_factor(30))


def test_interpolated_distance_vanishes_on_the_diagonal():
    b = SampleBundle.from_seed(1, 60, seed=3)
    dist = b.distances
    size = 2 * b.n
    for i in range(size):
        for frac in (0.25, 0.5, 0.75):
            assert dist.interpolated(i + frac, i + frac) <= 0.5
            assert dist.interpolated(i + frac, i + frac) == pytest.approx(0.0)


def test_interpolated_distance_is_symmetric_and_keeps_the_triangle_inequality():
    b = SampleBundle.from_seed(1, 60, seed=3)
    dist = b.distances
    size = 2 * b.n
    triples = np.random.default_rng(4).uniform(0.0, size, size=(400, 3))
    for s, t, u in triples:
        assert dist.interpolated(s, t) == pytest.approx(dist.interpolated(t, s))
        assert dist.interpolated(s, u) <= dist.interpolated(s, t) + dist.interpolated(t, u) + 1e-9
    # same unit interval
    for s, t in ((4.1, 4.7), (4.7, 4.1), (10.5, 11.25)):
        u = 33.3
        assert dist.interpolated(s, u) <= dist.interpolated(s, t) + dist.interpolated(t, u) + 1e-9
    with pytest.raises(IndexOutOfRange):
        dist.interpolated(-0.5, 3.0)


def test_sample_bundle_is_reproducible():
    a = SampleBundle.from_seed(1, 25, seed=11)
    b = SampleBundle.from_seed(1, 25, seed=11)
    assert a.tree == b.tree
    assert a.pq.epsilon == b.pq.epsilon
    assert a.quad == b.quad


def test_profile_and_radius():
    b = SampleBundle.from_seed(1, 50, seed=3)
    hist, radius = profile_and_radius(b.pq)
    assert hist.sum() == b.pq.map.vertex_count
    assert hist[0] == 1
    assert radius == max(b.pq.labels_shifted)
    assert list(hist) == list(np.bincount(b.pq.labels_shifted))
    hist_root, _ = profile_and_radius(b.pq, "root")
    assert hist_root.sum() == b.pq.map.vertex_count
    with pytest.raises(UsageError):
        profile_and_radius(b.pq, "center")


def test_two_point_statistic_and_comparison():
    samples = [SampleBundle.from_seed(1, 20, seed=s) for s in range(6)]
    summary = two_point_statistic(samples, 20)
    assert summary["count"] == 6
    assert summary["min"] <= summary["q1"] <= summary["median"] <= summary["q3"] <= summary["max"]
    expected = [b.distances.d(0, 20) / rescale_factor(20) for b in samples]
    assert summary["values"] == pytest.approx(expected)
    report = compare_batches(summary["values"][:3], summary["values"][3:])
    assert 0.0 <= report["statistic"] <= 1.0
    assert 0.0 <= report["pvalue"] <= 1.0
    assert (report["n_a"], report["n_b"]) == (3, 3)


def test_radius_grid():
    grid = radius_grid(10 ** 6, 200)
    assert grid[0] >= math.floor((10 ** 6) ** 0.125)
    assert grid[-1] == 100
    assert len(grid) >= 6
    with pytest.raises(RadiusGridTooCoarse):
        radius_grid(10 ** 6, 10)
    with pytest.raises(RadiusGridTooCoarse):
        radius_grid(100, 12)


def test_dimension_of_torus_grid_is_about_two():
    m = torus_grid_map(100)
    est = dimension_estimate(m, 3, Stream(0), radii=[8, 11, 16, 22, 30])
    assert 1.8 <= est.slope <= 2.2
    assert len(est.slopes) == 3
    assert len(est.rows) == 3 * 5
    assert all(r["volume"] == 2 * r["radius"] ** 2 + 2 * r["radius"] + 1 for r in est.rows)


def test_dimension_estimate_errors():
    m = torus_grid_map(10)
    with pytest.raises(RadiusGridTooCoarse):
        dimension_estimate(m, 2, Stream(0), radii=[3, 3, 0])
    with pytest.raises(UsageError):
        dimension_estimate(m, 0, Stream(0), radii=[1, 2])


def test_bfs_distances_from_pointed_vertex_are_labels():
    b = SampleBundle.from_seed(1, 40, seed=8)
    dist = bfs_distances(b.pq.map, b.pq.pointed_vertex)
    assert list(dist) == list(b.pq.labels_shifted)


@pytest.mark.slow
def test_dimension_of_sampled_quadrangulation():
    b = SampleBundle.from_seed(1, 100_000, seed=17)
    est = dimension_estimate(b.pq, 20, Stream(17))
    assert len(est.slopes) == 20
    assert 3.3 <= est.slope <= 4.7


@pytest.mark.slow
@pytest.mark.parametrize("n", [1000, 10_000])
def test_distance_sandwich_on_many_pairs(n):
    b = SampleBundle.from_seed(1, n, seed=n)
    size = 2 * n
    gen = np.random.default_rng(n)
    pairs = 0
    for i in gen.choice(size + 1, size=100, replace=False):
        i = int(i)
        lower = lower_bound_row(b.label_process, b.contour, i)
        for j in gen.integers(0, size + 1, size=1000):
            j = int(j)
            d = b.distances.d(i, j)
            assert lower[j] <= d <= d_circ(b.label_process, i, j)
            pairs += 1
    assert pairs == 100_000


def scaled_two_point_median(n, count):
    values = [SampleBundle.from_seed(1, n, seed=seed).distances.d(0, n) / rescale_factor(n)
              for seed in range(count)]
    return float(np.median(values))


@pytest.mark.slow
def test_two_point_median_is_stable_under_rescaling():
    small = scaled_two_point_median(1000, 500)
    large = scaled_two_point_median(10_000, 500)
    assert small > 0
    assert abs(large - small) <= 0.15 * small
