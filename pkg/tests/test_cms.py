"""Tests for cms: the tree/quadrangulation bijection and its distance bound."""

from collections import deque

import numpy as np
import pytest

from cms import (check_label_distance, cms_forward, cms_inverse, cyclic_min, distance_upper_bound,
                 validate_quadrangulation)
from errors import NotAQuadrangulation, NotBipartite, UsageError
from gtree import enumerate_well_labeled_gtrees
from map_core import bfs_levels, torus_grid_map
from sampler import count_quadrangulations, sample_gtree
from streams import Stream


def canonical_form(m, pointed):
    """Half-edge labels in BFS order from the root; equal for isomorphic rooted maps."""
    order = {m.root: 0}
    queue = deque([m.root])
    while queue:
        h = queue.popleft()
        for x in (int(m.sigma[h]), int(m.alpha[h])):
            if x not in order:
                order[x] = len(order)
                queue.append(x)
    by_new = sorted(order, key=order.get)
    sigma = tuple(order[int(m.sigma[h])] for h in by_new)
    alpha = tuple(order[int(m.alpha[h])] for h in by_new)
    point = min(order[h] for h in m.rotation(pointed))
    return sigma, alpha, point


@pytest.mark.parametrize("n", [2, 3, 4])
def test_forward_gives_pointed_quadrangulations(n):
    for w in enumerate_well_labeled_gtrees(1, n):
        for eps in (-1, 1):
            pq = cms_forward(w, eps)
            m = pq.map
            assert m.genus == 1
            assert pq.n_faces == n
            assert m.vertex_count == n + 2 - 2
            assert set(int(d) for d in m.face_degrees) == {4}
            assert m.is_bipartite()
            assert check_label_distance(pq)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_forward_inverse_round_trip(n):
    for w in enumerate_well_labeled_gtrees(1, n):
        for eps in (-1, 1):
            assert cms_inverse(cms_forward(w, eps)) == (w, eps)


@pytest.mark.parametrize("n", [3, 4])
def test_forward_is_a_bijection_onto_pointed_quadrangulations(n):
    trees = enumerate_well_labeled_gtrees(1, n)
    images = {canonical_form(pq.map, pq.pointed_vertex)
              for pq in (cms_forward(w, eps) for w in trees for eps in (-1, 1))}
    assert len(images) == 2 * len(trees)
    assert len(images) == count_quadrangulations(1, n) * (n + 2 - 2)


def test_correspondence_and_root():
    w = enumerate_well_labeled_gtrees(1, 3)[4]
    for eps in (-1, 1):
        pq = cms_forward(w, eps)
        assert len(pq.correspondence) == 2 * 3 + 1
        assert pq.correspondence[0] == pq.correspondence[-1]
        m = pq.map
        root_vertex = pq.correspondence[0]
        if eps == -1:
            assert m.origin(m.root) == root_vertex
        else:
            assert m.head(m.root) == root_vertex
    assert pq.labels_shifted[pq.pointed_vertex] == 0


def test_sampled_round_trips():
    rng = Stream(13)
    for n in (10, 60):
        for _ in range(5):
            w = sample_gtree(1, n, rng)
            eps = 1 if rng.below(2) else -1
            pq = cms_forward(w, eps)
            assert check_label_distance(pq)
            assert cms_inverse(pq) == (w, eps)


def test_epsilon_must_be_a_sign():
    w = enumerate_well_labeled_gtrees(1, 2)[0]
    with pytest.raises(UsageError):
        cms_forward(w, 0)


def test_validate_quadrangulation():
    validate_quadrangulation(torus_grid_map(4))
    with pytest.raises(NotBipartite):
        validate_quadrangulation(torus_grid_map(5))
    hexagon = enumerate_well_labeled_gtrees(1, 3)[0].tree.map
    with pytest.raises(NotAQuadrangulation):
        validate_quadrangulation(hexagon)


def test_cyclic_min():
    values = np.array([3, 1, 4, 1, 5, 9, 2])
    assert cyclic_min(values, 2, 4) == 1
    assert cyclic_min(values, 4, 5) == 5
    assert cyclic_min(values, 5, 0) == 2
    assert cyclic_min(values, 3, 3) == 1


def test_distance_upper_bound_holds():
    rng = Stream(31)
    w = sample_gtree(1, 40, rng)
    pq = cms_forward(w, 1)
    adj = pq.map.adjacency()
    size = 2 * 40
    for i in range(0, size, 7):
        dist = bfs_levels(adj, pq.correspondence[i])
        for j in range(size + 1):
            assert dist[pq.correspondence[j]] <= distance_upper_bound(pq, i, j)


def test_distance_upper_bound_range():
    pq = cms_forward(enumerate_well_labeled_gtrees(1, 3)[0], 1)
    assert distance_upper_bound(pq, 0, 6) == distance_upper_bound(pq, 0, 0)
    with pytest.raises(UsageError):
        distance_upper_bound(pq, 0, 7)


@pytest.mark.slow
def test_labels_are_distances_on_a_thousand_samples():
    rng = Stream(1000)
    for k in range(1000):
        w = sample_gtree(1, 1000, rng.spawn(k))
        pq = cms_forward(w, 1 if k % 2 else -1)
        assert check_label_distance(pq)
