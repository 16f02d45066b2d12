#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
gtree.py - One-face maps (g-trees) as glued polygons, and their labelings

A g-tree with n edges is stored as a pairing of the sides of a 2n-gon:
side i is glued to side pairing[i]. Reading the sides in order is reading
the unique face, so half-edge i runs from corner t(i) to corner t(i+1)
and the facial successor of i is i + 1 mod 2n. The root is half-edge 0.

Vertices are numbered canonically, by their smallest outgoing half-edge,
so the root vertex is always 0.

Usage:
    from gtree import from_pairing, validate_labels, enumerate_well_labeled_gtrees

    t = from_pairing(2, [2, 3, 0, 1])   # the genus 1 bouquet
    wlt = validate_labels(t, [0])
    trees = enumerate_well_labeled_gtrees(1, 3)   # 30 trees
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from errors import (IncrementTooLarge, InvalidInvolution, OneFaceViolation,
                    RootLabelNonzero, SizeTooLargeForExhaustive, UsageError)
from map_core import CombinatorialMap, build_map
from settings import DEFAULTS

logger = logging.getLogger(__name__)


def _check_involution(pairing: Sequence[int]) -> None:
    size = len(pairing)
    for h, p in enumerate(pairing):
        if not 0 <= p < size or p == h or pairing[p] != h:
            raise InvalidInvolution(h)


def _count_vertices(pairing: Sequence[int]) -> int:
    """Cycles of h -> pairing[h - 1] without building a map."""
    size = len(pairing)
    seen = [False] * size
    count = 0
    for start in range(size):
        if seen[start]:
            continue
        count += 1
        h = start
        while not seen[h]:
            seen[h] = True
            h = pairing[h - 1]
    return count


# =============================================================================
# G-TREES
# =============================================================================

@dataclass(frozen=True)
class GTree:
    """A rooted one-face map given by its polygon gluing."""
    n_edges: int
    pairing: Tuple[int, ...]

    @cached_property
    def map(self) -> CombinatorialMap:
        p = np.asarray(self.pairing, dtype=np.int64)
        # sigma(i + 1) = alpha(i) makes phi(i) = i + 1
        sigma = np.roll(p, 1)
        return build_map(self.n_edges, p, sigma, 0)

    @property
    def n_half_edges(self) -> int:
        return 2 * self.n_edges

    @property
    def vertex_count(self) -> int:
        return self.map.vertex_count

    @property
    def genus(self) -> int:
        return (self.n_edges + 1 - self.vertex_count) // 2

    @property
    def vertex_of(self) -> np.ndarray:
        return self.map.vertex_of

    def edges(self) -> List[Tuple[int, int]]:
        """(origin, head) vertex pairs, one per edge, keyed by its smaller half-edge."""
        v = self.vertex_of
        return [(int(v[h]), int(v[p])) for h, p in enumerate(self.pairing) if h < p]

    def to_dict(self) -> dict:
        return {"genus": self.genus, "n_edges": self.n_edges, "pairing": list(self.pairing)}

    @classmethod
    def from_dict(cls, data: dict) -> 'GTree':
        return from_pairing(data["n_edges"], data["pairing"])

    @classmethod
    def from_map(cls, m: CombinatorialMap) -> 'GTree':
        """
        Re-index a one-face map in facial order from its root.

        Raises OneFaceViolation if the map has more than one face.
        """
        if m.face_count != 1:
            raise OneFaceViolation(m.face_count)
        order = np.empty(m.n_half_edges, dtype=np.int64)
        h = m.root
        for i in range(m.n_half_edges):
            order[i] = h
            h = int(m.phi[h])
        position = np.empty_like(order)
        position[order] = np.arange(len(order))
        pairing = position[m.alpha[order]]
        return cls(m.n_edges, tuple(int(x) for x in pairing))


@dataclass(frozen=True)
class WellLabeledGTree:
    """A g-tree with integer vertex labels (canonical vertex order)."""
    tree: GTree
    labels: Tuple[int, ...]

    @property
    def n_edges(self) -> int:
        return self.tree.n_edges

    @property
    def genus(self) -> int:
        return self.tree.genus

    def corner_labels(self) -> np.ndarray:
        """l(t(i)) for i in [0, 2n)."""
        return np.asarray(self.labels, dtype=np.int64)[self.tree.vertex_of]

    def to_dict(self) -> dict:
        d = self.tree.to_dict()
        d["labels"] = list(self.labels)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> 'WellLabeledGTree':
        return validate_labels(GTree.from_dict(data), data["labels"])


# =============================================================================
# OPERATIONS
# =============================================================================

def from_pairing(n_edges: int, pairing: Sequence[int]) -> GTree:
    """
    Build a g-tree from a polygon gluing.

    Every pairing glues the 2n-gon into a single-face surface, so the only
    possible failure is a malformed involution.
    """
    if n_edges < 1 or len(pairing) != 2 * n_edges:
        raise InvalidInvolution(message=f"pairing must have length {2 * n_edges} with n_edges >= 1")
    p = tuple(int(x) for x in pairing)
    _check_involution(p)
    return GTree(int(n_edges), p)


def facial_sequence(tree: GTree) -> List[int]:
    """Vertices t(0), ..., t(2n) met along the face; t(0) = t(2n) is the root vertex."""
    v = [int(x) for x in tree.vertex_of]
    return v + [v[0]]


def validate_labels(tree: GTree, labels: Sequence[int]) -> WellLabeledGTree:
    """
    Check a vertex labeling and wrap it.

    Raises RootLabelNonzero first, then IncrementTooLarge for the first
    offending edge in half-edge order.
    """
    lab = tuple(int(x) for x in labels)
    if len(lab) != tree.vertex_count:
        raise UsageError(f"expected {tree.vertex_count} labels, got {len(lab)}")
    if lab[0] != 0:
        raise RootLabelNonzero(lab[0])
    for u, v in tree.edges():
        if abs(lab[u] - lab[v]) > 1:
            raise IncrementTooLarge((u, v), (lab[u], lab[v]))
    return WellLabeledGTree(tree, lab)


def enumerate_pairings(n_edges: int) -> Iterator[Tuple[int, ...]]:
    """All fixed-point-free involutions of [0, 2n), lexicographically."""
    size = 2 * n_edges
    pairing = [-1] * size

    def extend(first: int) -> Iterator[Tuple[int, ...]]:
        while first < size and pairing[first] != -1:
            first += 1
        if first == size:
            yield tuple(pairing)
            return
        for j in range(first + 1, size):
            if pairing[j] == -1:
                pairing[first], pairing[j] = j, first
                yield from extend(first + 1)
                pairing[first] = pairing[j] = -1

    yield from extend(0)


def _spanning_tree(tree: GTree) -> List[Tuple[int, int]]:
    """(parent, child) pairs of a BFS spanning tree from the root vertex."""
    adj = [[] for _ in range(tree.vertex_count)]
    for u, v in tree.edges():
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    out = []
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in sorted(adj[u]):
            if v not in seen:
                seen.add(v)
                out.append((u, v))
                queue.append(v)
    return out


def well_labelings(tree: GTree) -> List[Tuple[int, ...]]:
    """Every valid labeling of a g-tree, sorted."""
    span = _spanning_tree(tree)
    edges = tree.edges()
    out = []
    for incs in itertools.product((-1, 0, 1), repeat=len(span)):
        lab = [0] * tree.vertex_count
        for (parent, child), d in zip(span, incs):
            lab[child] = lab[parent] + d
        if all(abs(lab[u] - lab[v]) <= 1 for u, v in edges):
            out.append(tuple(lab))
    out.sort()
    return out


def label_count(tree: GTree) -> int:
    return len(well_labelings(tree))


def enumerate_well_labeled_gtrees(genus: int, n_edges: int, cap: int = None) -> List[WellLabeledGTree]:
    """
    Every well-labeled g-tree of the given genus and size.

    Sorted by pairing, then by label vector. Raises SizeTooLargeForExhaustive
    above the enumeration cap.
    """
    if genus < 1:
        raise UsageError(f"genus must be >= 1, got {genus}")
    cap = DEFAULTS.enumeration_cap if cap is None else cap
    if n_edges > cap:
        raise SizeTooLargeForExhaustive(f"n_edges={n_edges} exceeds the exhaustive cap {cap}")
    if n_edges < 1:
        return []
    target_vertices = n_edges + 1 - 2 * genus
    if target_vertices < 1:
        return []

    out = []
    n_trees = 0
    for pairing in enumerate_pairings(n_edges):
        if _count_vertices(pairing) != target_vertices:
            continue
        tree = GTree(n_edges, pairing)
        n_trees += 1
        out.extend(WellLabeledGTree(tree, lab) for lab in well_labelings(tree))
    out.sort(key=lambda w: (w.tree.pairing, w.labels))
    logger.debug("enumerated %d g-trees, %d labeled (g=%d, n=%d)", n_trees, len(out), genus, n_edges)
    return out
