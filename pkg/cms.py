#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
cms.py - Well-labeled g-trees to pointed bipartite quadrangulations and back

Forward: shift labels so the minimum is 1, add a vertex v* of label 0,
and from every corner i of the tree draw an arc to its successor: v* if
the corner label is 1, otherwise the first later corner (cyclically, in
facial order) with label one less. Removing the tree edges leaves a
quadrangulation of the same genus with n faces, n + 2 - 2g vertices,
and labels equal to distances from v*.

Arc k starts at corner k: quadrangulation half-edge 2k leaves the tree
vertex t(k), half-edge 2k + 1 comes back from the successor. Around a
tree vertex, arcs are ordered corner by corner in rotation order; inside
a corner by how far ahead their other end is along the face, with the
arc to v* first. Around v*, arcs come in increasing corner order. The
root is arc 0, leaving t(0) when epsilon = -1 and entering it when
epsilon = +1.

Usage:
    from cms import cms_forward, cms_inverse

    pq = cms_forward(wlt, epsilon=1)
    wlt2, eps = cms_inverse(pq)
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from errors import NotAQuadrangulation, NotBipartite, UsageError
from gtree import GTree, WellLabeledGTree, validate_labels
from map_core import CombinatorialMap, bfs_levels, build_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PointedQuadrangulation:
    map: CombinatorialMap
    pointed_vertex: int
    epsilon: int
    correspondence: Tuple[int, ...]     # q(i) for i in [0, 2n]
    labels_shifted: Tuple[int, ...]     # per quadrangulation vertex, 0 at v*
    arcs: Tuple[int, ...]               # successor corner per corner, -1 for v*

    @property
    def n_faces(self) -> int:
        return self.map.face_count

    @property
    def genus(self) -> int:
        return self.map.genus

    def corner_labels(self) -> np.ndarray:
        """Shifted label of every tree corner, i in [0, 2n)."""
        lab = np.asarray(self.labels_shifted, dtype=np.int64)
        return lab[np.asarray(self.correspondence[:-1], dtype=np.int64)]

    def to_dict(self) -> dict:
        return {
            "map": self.map.to_dict(),
            "pointed_vertex": self.pointed_vertex,
            "epsilon": self.epsilon,
            "correspondence": list(self.correspondence),
            "labels_shifted": list(self.labels_shifted),
        }


# =============================================================================
# FORWARD
# =============================================================================

def _successors(c: List[int]) -> List[int]:
    """First later corner (cyclically) with label c[i] - 1, or -1 when c[i] == 1."""
    size = len(c)
    succ = [-1] * size
    next_at: Dict[int, int] = {}
    for i in range(2 * size - 1, -1, -1):
        k = i % size
        if i < size and c[k] > 1:
            succ[k] = next_at[c[k] - 1] % size
        next_at[c[k]] = i
    return succ


def cms_forward(wlt: WellLabeledGTree, epsilon: int) -> PointedQuadrangulation:
    if epsilon not in (-1, 1):
        raise UsageError(f"epsilon must be -1 or +1, got {epsilon}")
    tree = wlt.tree
    size = tree.n_half_edges
    n_tree_v = tree.vertex_count
    low = min(wlt.labels)
    shifted = [x - low + 1 for x in wlt.labels]
    vertex_of = [int(x) for x in tree.vertex_of]
    c = [shifted[vertex_of[i]] for i in range(size)]
    succ = _successors(c)

    incoming: List[List[int]] = [[] for _ in range(size)]
    for i, j in enumerate(succ):
        if j >= 0:
            incoming[j].append(i)

    def corner_arcs(j: int) -> List[int]:
        keyed = [((i - j) % size, 2 * i + 1) for i in incoming[j]]
        if succ[j] >= 0:
            keyed.append(((succ[j] - j) % size, 2 * j))
            keyed.sort()
            return [h for _, h in keyed]
        keyed.sort()
        return [2 * j] + [h for _, h in keyed]

    sigma = np.empty(2 * size, dtype=np.int64)
    tsigma = tree.map.sigma
    seen = [False] * n_tree_v
    for start in range(size):
        v = vertex_of[start]
        if seen[v]:
            continue
        seen[v] = True
        ring: List[int] = []
        h = start
        while True:
            ring.extend(corner_arcs(h))
            h = int(tsigma[h])
            if h == start:
                break
        for a, b in zip(ring, ring[1:] + ring[:1]):
            sigma[a] = b
    star = [2 * j + 1 for j in range(size) if c[j] == 1]
    for a, b in zip(star, star[1:] + star[:1]):
        sigma[a] = b

    alpha = np.arange(2 * size, dtype=np.int64) ^ 1
    root = 0 if epsilon == -1 else 1
    qmap = build_map(size, alpha, sigma, root)

    qv = qmap.vertex_of
    correspondence = tuple(int(qv[2 * i]) for i in range(size)) + (int(qv[0]),)
    pointed = int(qv[star[0]])
    labels = [0] * qmap.vertex_count
    for i in range(size):
        labels[correspondence[i]] = c[i]
    logger.debug("forward bijection: n=%d genus=%d vertices=%d", tree.n_edges, tree.genus, qmap.vertex_count)
    return PointedQuadrangulation(qmap, pointed, epsilon, correspondence, tuple(labels), tuple(succ))


# =============================================================================
# INVERSE
# =============================================================================

def validate_quadrangulation(m: CombinatorialMap) -> None:
    """Raise NotAQuadrangulation or NotBipartite."""
    bad = np.flatnonzero(m.face_degrees != 4)
    if len(bad):
        raise NotAQuadrangulation(f"face {int(bad[0])} has degree {int(m.face_degrees[bad[0]])}")
    if not m.is_bipartite():
        raise NotBipartite("vertices cannot be 2-coloured")


def cms_inverse(pq: PointedQuadrangulation) -> Tuple[WellLabeledGTree, int]:
    """
    Recover the labeled g-tree and epsilon behind a pointed quadrangulation.

    Inside each face, with labels the distances from v*: a face with two
    corners at the top label gets a tree edge between them; otherwise the
    top corner is joined to the corner before it along the face.
    """
    m = pq.map
    validate_quadrangulation(m)
    dist = bfs_levels(m.adjacency(), pq.pointed_vertex)
    vertex_of = m.vertex_of

    after: Dict[int, int] = {}
    origin: List[int] = []
    for f in range(m.face_count):
        hs = m.face(f)
        lab = [int(dist[vertex_of[h]]) for h in hs]
        top = max(lab)
        tops = [i for i, x in enumerate(lab) if x == top]
        if len(tops) == 2:
            a, b = hs[tops[0]], hs[tops[1]]
        else:
            a, b = hs[tops[0]], hs[tops[0] - 1]
        t = len(origin) // 2
        after[a] = 2 * t
        after[b] = 2 * t + 1
        origin.extend([int(vertex_of[a]), int(vertex_of[b])])

    n_edges = len(origin) // 2
    tsigma = np.empty(2 * n_edges, dtype=np.int64)
    for v in range(m.vertex_count):
        if v == pq.pointed_vertex:
            continue
        ring = [after[h] for h in m.rotation(v) if h in after]
        if not ring:
            raise NotAQuadrangulation(f"vertex {v} receives no tree edge")
        for a, b in zip(ring, ring[1:] + ring[:1]):
            tsigma[a] = b

    root = m.root
    head_dist = int(dist[vertex_of[m.alpha[root]]])
    epsilon = -1 if int(dist[vertex_of[root]]) > head_dist else 1
    source = root if epsilon == -1 else int(m.alpha[root])
    h = int(m.sigma_inv[source])
    while h not in after:
        h = int(m.sigma_inv[h])
    troot = after[h]

    talpha = np.arange(2 * n_edges, dtype=np.int64) ^ 1
    tmap = build_map(n_edges, talpha, tsigma, troot)
    tree = GTree.from_map(tmap)

    order = []
    h = troot
    for _ in range(2 * n_edges):
        order.append(h)
        h = int(tmap.phi[h])
    base = int(dist[origin[order[0]]])
    labels = [0] * tree.vertex_count
    for i, th in enumerate(order):
        labels[int(tree.vertex_of[i])] = int(dist[origin[th]]) - base
    return validate_labels(tree, labels), epsilon


# =============================================================================
# CHECKS
# =============================================================================

def check_label_distance(pq: PointedQuadrangulation) -> bool:
    """True iff every shifted label equals the graph distance from v*."""
    dist = bfs_levels(pq.map.adjacency(), pq.pointed_vertex)
    return bool(np.array_equal(dist, np.asarray(pq.labels_shifted, dtype=np.int64)))


def cyclic_min(values: np.ndarray, i: int, j: int) -> int:
    """min of values over the cyclic arc i, i+1, ..., j (inclusive)."""
    if i <= j:
        return int(values[i:j + 1].min())
    return int(min(values[i:].min(), values[:j + 1].min()))


def distance_upper_bound(pq: PointedQuadrangulation, i: int, j: int) -> int:
    """
    l(t(i)) + l(t(j)) - 2 max(min over arc i->j, min over arc j->i) + 2.
    """
    c = pq.corner_labels()
    size = len(c)
    if not (0 <= i <= size and 0 <= j <= size):
        raise UsageError(f"corner indices must lie in [0, {size}]")
    i %= size
    j %= size
    lo = max(cyclic_min(c, i, j), cyclic_min(c, j, i))
    return int(c[i] + c[j] - 2 * lo + 2)
