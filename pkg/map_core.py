#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
map_core.py - Rooted maps on orientable surfaces as half-edge permutations

A map with n edges has half-edges 0..2n-1 and two permutations:

- alpha: the edge involution h -> reverse of h
- sigma: next half-edge counterclockwise around the origin vertex

Vertices are the cycles of sigma, faces the cycles of
phi = sigma^-1 o alpha. With this convention a one-face map numbered in
facial order has phi(i) = i + 1 mod 2n.

Usage:
    from map_core import build_map, genus, face_count

    m = build_map(2, [2, 3, 0, 1], [1, 2, 3, 0], root=0)
    genus(m)        # 1
    face_count(m)   # 1
"""

import json
from typing import List, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from errors import InvalidInvolution, Disconnected, HalfEdgeOutOfRange, UsageError


def dense_cycles(perm: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Label the cycles of a permutation densely.

    Cycles are numbered in order of their smallest element. Returns
    (labels, sizes): labels[h] is the cycle of h, sizes[c] its length.
    """
    succ = [int(x) for x in perm]
    labels = [-1] * len(succ)
    sizes: List[int] = []
    for start in range(len(succ)):
        if labels[start] != -1:
            continue
        c = len(sizes)
        size = 0
        h = start
        while labels[h] == -1:
            labels[h] = c
            size += 1
            h = succ[h]
        sizes.append(size)
    return np.asarray(labels, dtype=np.int64), np.asarray(sizes, dtype=np.int64)


def bfs_levels(adj: sparse.csr_matrix, source: int) -> np.ndarray:
    """
    Level-synchronous BFS over a CSR adjacency.

    Returns the graph distance of every vertex from source (-1 if unreachable).
    """
    dist = np.full(adj.shape[0], -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size:
        level += 1
        nbrs = np.unique(adj[frontier].indices)
        nbrs = nbrs[dist[nbrs] == -1]
        dist[nbrs] = level
        frontier = nbrs
    return dist


def invert(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm), dtype=perm.dtype)
    return inv


class CombinatorialMap:
    """
    A validated rooted map. Immutable once built.

    Derived data (vertex and face labels, degrees) is computed at
    construction, so every query below is an array lookup.
    """

    __slots__ = ['n_edges', 'alpha', 'sigma', 'root',
                 '_sigma_inv', '_phi',
                 '_vertex_of', '_vertex_degree',
                 '_face_of', '_face_degree',
                 '_adjacency']

    def __init__(self, n_edges: int, alpha: np.ndarray, sigma: np.ndarray, root: int):
        self.n_edges = int(n_edges)
        self.alpha = alpha
        self.sigma = sigma
        self.root = int(root)
        self._sigma_inv = invert(sigma)
        self._phi = self._sigma_inv[alpha]
        self._vertex_of, self._vertex_degree = dense_cycles(sigma)
        self._face_of, self._face_degree = dense_cycles(self._phi)
        self._adjacency = None
        for arr in (self.alpha, self.sigma, self._sigma_inv, self._phi,
                    self._vertex_of, self._vertex_degree,
                    self._face_of, self._face_degree):
            arr.setflags(write=False)

    # -------------------------------------------------------------------------
    # counts
    # -------------------------------------------------------------------------

    @property
    def n_half_edges(self) -> int:
        return 2 * self.n_edges

    @property
    def vertex_count(self) -> int:
        return len(self._vertex_degree)

    @property
    def face_count(self) -> int:
        return len(self._face_degree)

    @property
    def genus(self) -> int:
        return (2 - self.vertex_count + self.n_edges - self.face_count) // 2

    # -------------------------------------------------------------------------
    # lookups
    # -------------------------------------------------------------------------

    @property
    def phi(self) -> np.ndarray:
        """Facial successor permutation."""
        return self._phi

    @property
    def sigma_inv(self) -> np.ndarray:
        return self._sigma_inv

    @property
    def vertex_of(self) -> np.ndarray:
        """Origin vertex of each half-edge."""
        return self._vertex_of

    @property
    def face_of(self) -> np.ndarray:
        return self._face_of

    @property
    def vertex_degrees(self) -> np.ndarray:
        return self._vertex_degree

    @property
    def face_degrees(self) -> np.ndarray:
        return self._face_degree

    def origin(self, h: int) -> int:
        return int(self._vertex_of[h])

    def head(self, h: int) -> int:
        return int(self._vertex_of[self.alpha[h]])

    def rotation(self, v: int) -> List[int]:
        """Half-edges around vertex v, counterclockwise, from the smallest."""
        start = int(np.flatnonzero(self._vertex_of == v)[0])
        out = [start]
        h = int(self.sigma[start])
        while h != start:
            out.append(h)
            h = int(self.sigma[h])
        return out

    def face(self, f: int) -> List[int]:
        """Half-edges along face f in facial order, from the smallest."""
        start = int(np.flatnonzero(self._face_of == f)[0])
        out = [start]
        h = int(self._phi[start])
        while h != start:
            out.append(h)
            h = int(self._phi[h])
        return out

    def adjacency(self) -> sparse.csr_matrix:
        """Vertex adjacency as a CSR matrix (multi-edges collapsed, loops kept)."""
        if self._adjacency is None:
            rows = self._vertex_of
            cols = self._vertex_of[self.alpha]
            data = np.ones(len(rows), dtype=np.int8)
            n = self.vertex_count
            adj = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
            adj.data[:] = 1
            self._adjacency = adj
        return self._adjacency

    def is_bipartite(self) -> bool:
        dist = bfs_levels(self.adjacency(), 0)
        ends = dist[self._vertex_of] + dist[self._vertex_of[self.alpha]]
        return bool(np.all(ends % 2 == 1))

    # -------------------------------------------------------------------------
    # transforms
    # -------------------------------------------------------------------------

    def relabel(self, perm: Sequence[int]) -> 'CombinatorialMap':
        """
        Conjugate by a relabelling of half-edges: old h becomes perm[h].
        """
        p = np.asarray(perm, dtype=np.int64)
        inv = invert(p)
        alpha = p[self.alpha[inv]]
        sigma = p[self.sigma[inv]]
        return build_map(self.n_edges, alpha, sigma, int(p[self.root]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CombinatorialMap):
            return NotImplemented
        return (self.n_edges == other.n_edges and self.root == other.root
                and np.array_equal(self.alpha, other.alpha)
                and np.array_equal(self.sigma, other.sigma))

    def __hash__(self) -> int:
        return hash((self.n_edges, self.root, self.alpha.tobytes(), self.sigma.tobytes()))

    def __repr__(self) -> str:
        return (f"CombinatorialMap(n_edges={self.n_edges}, V={self.vertex_count}, "
                f"F={self.face_count}, genus={self.genus}, root={self.root})")

    # -------------------------------------------------------------------------
    # serialization
    # -------------------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n_edges": self.n_edges,
            "alpha": [int(x) for x in self.alpha],
            "sigma": [int(x) for x in self.sigma],
            "root": self.root,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'CombinatorialMap':
        return build_map(data["n_edges"], data["alpha"], data["sigma"], data["root"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# =============================================================================
# OPERATIONS
# =============================================================================

def build_map(n_edges: int, alpha: Sequence[int], sigma: Sequence[int], root: int) -> CombinatorialMap:
    """
    Validate permutations and build a map.

    Raises HalfEdgeOutOfRange, InvalidInvolution or Disconnected.
    """
    n_half = 2 * int(n_edges)
    if n_edges < 1:
        raise HalfEdgeOutOfRange(f"a map needs at least one edge, got {n_edges}")
    a = np.asarray(alpha, dtype=np.int64)
    s = np.asarray(sigma, dtype=np.int64)
    if a.shape != (n_half,) or s.shape != (n_half,):
        raise HalfEdgeOutOfRange(f"alpha and sigma must have length {n_half}")
    if not 0 <= root < n_half:
        raise HalfEdgeOutOfRange(f"root {root} outside [0, {n_half})")
    for name, arr in (("alpha", a), ("sigma", s)):
        if arr.min() < 0 or arr.max() >= n_half:
            raise HalfEdgeOutOfRange(f"{name} has entries outside [0, {n_half})")
        if len(np.unique(arr)) != n_half:
            raise HalfEdgeOutOfRange(f"{name} is not a permutation")

    idx = np.arange(n_half)
    fixed = np.flatnonzero(a == idx)
    if len(fixed):
        raise InvalidInvolution(int(fixed[0]))
    bad = np.flatnonzero(a[a] != idx)
    if len(bad):
        raise InvalidInvolution(int(bad[0]))

    graph = sparse.csr_matrix(
        (np.ones(2 * n_half, dtype=np.int8), (np.concatenate([idx, idx]), np.concatenate([a, s]))),
        shape=(n_half, n_half))
    n_comp, _ = connected_components(graph, directed=False)
    if n_comp != 1:
        raise Disconnected(f"half-edges fall into {n_comp} orbits")

    return CombinatorialMap(n_edges, a, s, root)


def genus(m: CombinatorialMap) -> int:
    """g = (2 - V + E - F) / 2."""
    return m.genus


def face_count(m: CombinatorialMap) -> int:
    return m.face_count


def vertex_count(m: CombinatorialMap) -> int:
    return m.vertex_count


def torus_grid_map(side: int) -> CombinatorialMap:
    """
    Square grid on a side x side torus.

    A genus 1 quadrangulation with side^2 vertices and faces; bipartite when
    side is even. Used as a dimension-2 control for ball-growth estimates.
    """
    if side < 3:
        raise UsageError(f"torus grid needs side >= 3, got {side}")
    n_vertices = side * side
    # half-edge 4*v + d leaves vertex v in direction d: 0 east, 1 north, 2 west, 3 south
    dx = (1, 0, -1, 0)
    dy = (0, 1, 0, -1)
    alpha = np.empty(4 * n_vertices, dtype=np.int64)
    sigma = np.empty(4 * n_vertices, dtype=np.int64)
    for y in range(side):
        for x in range(side):
            v = y * side + x
            for d in range(4):
                w = ((y + dy[d]) % side) * side + (x + dx[d]) % side
                alpha[4 * v + d] = 4 * w + (d + 2) % 4
                sigma[4 * v + d] = 4 * v + (d + 1) % 4
    return build_map(2 * n_vertices, alpha, sigma, 0)
