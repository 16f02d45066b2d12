#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
scheme.py - Schemes of g-trees and the scheme/bridge/forest decomposition

Pruning the leaves of a g-tree to exhaustion leaves its core; contracting
the maximal chains of degree 2 vertices of the core leaves its scheme, a
one-face map with every vertex of degree >= 3.

Along the face, the half-edges of a g-tree split into one segment per
scheme half-edge e: the segment runs from just after the last chain
half-edge of the previous scheme half-edge through the last chain
half-edge of e. Read as a contour, a segment is a labeled forest whose
floor is the chain of e (chain half-edges are the floor steps), and the
labels along the chain form a Motzkin bridge.

Scheme half-edges are numbered in facial order starting from the chain
that holds tree half-edge 0. The offset u of half-edge 0 inside its
segment completes the data needed to rebuild the tree.

Usage:
    from scheme import decompose, recompose, enumerate_schemes

    quad = decompose(wlt)
    assert recompose(quad) == wlt
    schemes = enumerate_schemes(1, dominant_only=True)
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from errors import IncompatibleQuadruple, MalformedContour, NoSchemeExists, UsageError
from forest import (ContourPair, MotzkinBridge, WellLabeledForest,
                    decode_contour, encode_contour, walk_contour)
from gtree import GTree, WellLabeledGTree, from_pairing, validate_labels

logger = logging.getLogger(__name__)


# =============================================================================
# SCHEMES
# =============================================================================

@dataclass(frozen=True)
class Scheme:
    """A one-face map with no vertex of degree 1 or 2."""
    tree: GTree

    @property
    def pairing(self) -> Tuple[int, ...]:
        return self.tree.pairing

    @property
    def n_edges(self) -> int:
        return self.tree.n_edges

    @property
    def n_half_edges(self) -> int:
        return 2 * self.tree.n_edges

    @property
    def vertex_count(self) -> int:
        return self.tree.vertex_count

    @property
    def genus(self) -> int:
        return self.tree.genus

    @property
    def vertex_degrees(self) -> List[int]:
        return [int(d) for d in self.tree.map.vertex_degrees]

    @property
    def dominant(self) -> bool:
        return all(d == 3 for d in self.vertex_degrees)

    def oriented(self) -> List[int]:
        """One half-edge per edge: the one met first along the face from the root."""
        return [e for e, p in enumerate(self.pairing) if e < p]

    def origin(self, e: int) -> int:
        return int(self.tree.vertex_of[e])

    def head(self, e: int) -> int:
        return int(self.tree.vertex_of[self.pairing[e]])

    def endpoints(self, e: int) -> Tuple[int, int]:
        return self.origin(e), self.head(e)

    def to_dict(self) -> dict:
        return {"genus": self.genus, "n_edges": self.n_edges, "pairing": list(self.pairing)}


def as_scheme(tree: GTree) -> Scheme:
    degrees = tree.map.vertex_degrees
    if degrees.min() < 3:
        raise UsageError(f"not a scheme: vertex of degree {int(degrees.min())}")
    return Scheme(tree)


# =============================================================================
# EXTRACTION
# =============================================================================

@dataclass(frozen=True)
class SchemeExtraction:
    scheme: Scheme
    node_map: Tuple[int, ...]               # scheme vertex -> tree vertex
    chains: Tuple[Tuple[int, ...], ...]     # tree half-edges per scheme half-edge
    segments: Tuple[Tuple[int, ...], ...]   # facial segment per scheme half-edge
    core: Tuple[bool, ...]                  # per tree half-edge
    root_offset: int


def scheme_extraction(tree: GTree) -> SchemeExtraction:
    """Prune, contract and record how the tree's face splits over the scheme."""
    p = tree.pairing
    size = tree.n_half_edges
    vertex_of = [int(x) for x in tree.vertex_of]
    n_vertices = tree.vertex_count

    out_edges = [[] for _ in range(n_vertices)]
    for h in range(size):
        out_edges[vertex_of[h]].append(h)
    degree = [len(hs) for hs in out_edges]
    alive = [True] * size

    leaves = deque(x for x in range(n_vertices) if degree[x] == 1)
    while leaves:
        x = leaves.popleft()
        if degree[x] != 1:
            continue
        h = next(h for h in out_edges[x] if alive[h])
        alive[h] = alive[p[h]] = False
        degree[x] = 0
        y = vertex_of[p[h]]
        degree[y] -= 1
        if degree[y] == 1:
            leaves.append(y)

    core = [h for h in range(size) if alive[h]]
    starts = [k for k, h in enumerate(core) if degree[vertex_of[h]] >= 3]
    if not core or not starts:
        raise NoSchemeExists(f"g-tree of genus {tree.genus} has no vertex of degree >= 3 in its core")

    n_chains = len(starts)
    # chain j covers core[starts[j]:starts[j+1]], the last one wrapping around
    raw = []
    for j in range(n_chains):
        a = starts[j]
        b = starts[j + 1] if j + 1 < n_chains else starts[0] + len(core)
        raw.append(tuple(core[k % len(core)] for k in range(a, b)))
    root_chain = 0 if starts[0] == 0 else n_chains - 1
    chains = [raw[(root_chain + j) % n_chains] for j in range(n_chains)]

    segments = []
    for e, chain in enumerate(chains):
        prev_last = chains[e - 1][-1]
        length = (chain[-1] - prev_last) % size
        if length == 0:
            length = size
        segments.append(tuple((prev_last + 1 + k) % size for k in range(length)))
    root_offset = segments[0].index(0)

    by_last = {chain[-1]: e for e, chain in enumerate(chains)}
    pairing = [by_last[p[chain[0]]] for chain in chains]
    scheme = Scheme(from_pairing(n_chains // 2, pairing))

    node_map = [-1] * scheme.vertex_count
    for e, chain in enumerate(chains):
        node_map[scheme.origin(e)] = vertex_of[chain[0]]

    logger.debug("extracted scheme with %d edges from g-tree with %d edges",
                 scheme.n_edges, tree.n_edges)
    return SchemeExtraction(scheme, tuple(node_map), tuple(chains), tuple(segments),
                            tuple(alive), root_offset)


def extract_scheme(tree: GTree) -> Tuple[Scheme, Tuple[int, ...]]:
    """The scheme of a g-tree and the tree vertex behind each scheme vertex."""
    ext = scheme_extraction(tree)
    return ext.scheme, ext.node_map


# =============================================================================
# ENUMERATION
# =============================================================================

def enumerate_schemes(genus: int, dominant_only: bool = False,
                      n_vertices: Optional[int] = None) -> List[Scheme]:
    """
    All rooted schemes of a genus, sorted by pairing.

    Polygon sides are glued one pair at a time (smallest free side first).
    Gluing i to j puts corner i+1 next to corner j around their vertex;
    partial vertices are followed so that a finished vertex of degree
    below 3 (or a vertex exceeding 3 when dominant_only) cuts the branch.
    """
    if genus < 1:
        raise UsageError(f"genus must be >= 1, got {genus}")
    out: List[Scheme] = []
    if dominant_only:
        edge_range = [6 * genus - 3]
    else:
        edge_range = range(2 * genus, 6 * genus - 2)
    for n_edges in edge_range:
        target_v = n_edges + 1 - 2 * genus
        if n_vertices is not None and target_v != n_vertices:
            continue
        for pairing in _scheme_pairings(n_edges, target_v, dominant_only):
            out.append(Scheme(GTree(n_edges, pairing)))
    out.sort(key=lambda s: (s.n_edges, s.pairing))
    logger.info("enumerated %d schemes of genus %d (dominant_only=%s)", len(out), genus, dominant_only)
    return out


def _scheme_pairings(n_edges: int, target_v: int, dominant: bool):
    size = 2 * n_edges
    pairing = [-1] * size

    def sigma(h: int) -> int:
        q = pairing[h - 1]
        return -1 if q == -1 else q

    def vertex_ok(s: int) -> Tuple[bool, bool]:
        """(acceptable, closed) for the partial vertex through corner s."""
        length = 1
        h = sigma(s)
        while h != -1 and h != s:
            length += 1
            h = sigma(h)
        if h == s:
            if length < 3 or (dominant and length != 3):
                return False, True
            return True, True
        if dominant:
            back = pairing[s]
            while back != -1:
                prev = (back + 1) % size
                if prev == s:
                    break
                length += 1
                back = pairing[prev]
            if length > 3:
                return False, False
        return True, False

    def count_closed() -> int:
        seen = [False] * size
        closed = 0
        for s in range(size):
            if seen[s]:
                continue
            h = s
            cycle = True
            while not seen[h]:
                seen[h] = True
                h = sigma(h)
                if h == -1:
                    cycle = False
                    break
            if cycle and h == s:
                closed += 1
        return closed

    def extend(first: int):
        while first < size and pairing[first] != -1:
            first += 1
        if first == size:
            if count_closed() == target_v:
                yield tuple(pairing)
            return
        for j in range(first + 1, size):
            if pairing[j] != -1:
                continue
            pairing[first], pairing[j] = j, first
            ok = True
            for s in ((first + 1) % size, (j + 1) % size):
                good, _ = vertex_ok(s)
                if not good:
                    ok = False
                    break
            if ok and count_closed() <= target_v:
                yield from extend(first + 1)
            pairing[first] = pairing[j] = -1

    yield from extend(0)


# =============================================================================
# DECOMPOSITION
# =============================================================================

@dataclass(frozen=True)
class DecompositionQuadruple:
    """Scheme, bridges and forests per scheme half-edge, root offset, node labels."""
    scheme: Scheme
    bridges: Tuple[MotzkinBridge, ...]
    forests: Tuple[WellLabeledForest, ...]
    root_offset: int
    vertex_labels: Tuple[int, ...]

    @property
    def m(self) -> List[int]:
        return [f.n_edges for f in self.forests]

    @property
    def sigma(self) -> List[int]:
        return [f.tree_count for f in self.forests]

    @property
    def edge_labels(self) -> List[int]:
        return [b.final for b in self.bridges]

    @property
    def n_edges(self) -> int:
        return sum(self.m) + sum(self.sigma) // 2

    def to_dict(self) -> dict:
        half_edges = {}
        for e, (b, f) in enumerate(zip(self.bridges, self.forests)):
            pair = encode_contour(f)
            half_edges[str(e)] = {"bridge": list(b.values), "contour": list(pair.contour),
                                  "spatial": list(pair.spatial)}
        return {
            "scheme": self.scheme.to_dict(),
            "root_offset": self.root_offset,
            "vertex_labels": list(self.vertex_labels),
            "half_edges": half_edges,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'DecompositionQuadruple':
        sd = data["scheme"]
        scheme = Scheme(from_pairing(sd["n_edges"], sd["pairing"]))
        items = [data["half_edges"][str(e)] for e in range(scheme.n_half_edges)]
        return cls(scheme,
                   tuple(MotzkinBridge(tuple(it["bridge"])) for it in items),
                   tuple(decode_contour(ContourPair(tuple(it["contour"]), tuple(it["spatial"])))
                         for it in items),
                   int(data["root_offset"]),
                   tuple(data["vertex_labels"]))


def decompose(wlt: WellLabeledGTree) -> DecompositionQuadruple:
    """Split a well-labeled g-tree into scheme, bridges, forests and root offset."""
    tree = wlt.tree
    ext = scheme_extraction(tree)
    scheme = ext.scheme
    size = tree.n_half_edges
    p = tree.pairing
    vertex_of = tree.vertex_of
    lab = wlt.labels

    def label_at(h: int) -> int:
        return lab[vertex_of[h % size]]

    bridges = []
    forests = []
    for e, (chain, seg) in enumerate(zip(ext.chains, ext.segments)):
        sigma = len(chain)
        contour = [sigma]
        spatial = []
        floor_label = label_at(chain[0])
        seen = set()
        for h in seg:
            spatial.append(label_at(h) - floor_label)
            if ext.core[h]:
                contour.append(contour[-1] - 1)
                floor_label = label_at(h + 1)
            elif p[h] in seen:
                contour.append(contour[-1] - 1)
            else:
                seen.add(h)
                contour.append(contour[-1] + 1)
        spatial.append(label_at(seg[-1] + 1) - floor_label)
        forests.append(decode_contour(ContourPair(tuple(contour), tuple(spatial))))

        start = label_at(chain[0])
        values = [0] + [label_at(h + 1) - start for h in chain]
        bridges.append(MotzkinBridge(tuple(values)))

    root_label = lab[ext.node_map[0]]
    vertex_labels = tuple(lab[v] - root_label for v in ext.node_map)
    return DecompositionQuadruple(scheme, tuple(bridges), tuple(forests),
                                  ext.root_offset, vertex_labels)


def _forest_reasons(e: int, wlf: WellLabeledForest) -> List[str]:
    try:
        parent = walk_contour(wlf.forest.contour).parent
    except MalformedContour as exc:
        return [f"forest of half-edge {e} has a malformed contour at index {exc.index}"]
    labels = wlf.labels
    if len(labels) != len(parent):
        return [f"forest of half-edge {e} has {len(labels)} labels for {len(parent)} nodes"]
    for v, p in enumerate(parent):
        if p == -1 and labels[v] != 0:
            return [f"forest of half-edge {e} has floor label {labels[v]} at node {v}"]
        if p != -1 and abs(labels[v] - labels[p]) > 1:
            return [f"forest of half-edge {e} is not well-labeled at node {v}"]
    if wlf.tree_count < 1:
        return [f"half-edge {e} has an empty chain"]
    return []


def validate_compatible(quad: DecompositionQuadruple,
                        n_edges: Optional[int] = None) -> Tuple[bool, List[str]]:
    """
    Check that a quadruple can be recomposed.

    The size sum(m + sigma / 2) always equals the edge count of the
    recomposed tree; it is compared with n_edges when one is given.
    Returns (ok, reasons); reasons is empty when ok.
    """
    reasons: List[str] = []
    scheme = quad.scheme
    low = [v for v, d in enumerate(scheme.vertex_degrees) if d < 3]
    if low:
        reasons.append(f"scheme vertices {low} have degree below 3")
    n_half = scheme.n_half_edges
    if len(quad.bridges) != n_half or len(quad.forests) != n_half:
        return False, reasons + [f"expected {n_half} bridges and forests, got "
                                 f"{len(quad.bridges)} and {len(quad.forests)}"]
    if len(quad.vertex_labels) != scheme.vertex_count:
        return False, reasons + [f"expected {scheme.vertex_count} vertex labels, "
                                 f"got {len(quad.vertex_labels)}"]

    for e in range(n_half):
        b = quad.bridges[e]
        f = quad.forests[e]
        reasons.extend(_forest_reasons(e, f))
        if b.values[0] != 0:
            reasons.append(f"bridge of half-edge {e} starts at {b.values[0]}, not 0")
        if any(abs(b.values[i + 1] - b.values[i]) > 1 for i in range(b.lifetime)):
            reasons.append(f"bridge of half-edge {e} has a step larger than 1")
        if b.lifetime != f.tree_count:
            reasons.append(f"bridge of half-edge {e} has lifetime {b.lifetime}, "
                           f"forest has {f.tree_count} trees")
        r = scheme.pairing[e]
        if f.tree_count != quad.forests[r].tree_count:
            reasons.append(f"chain lengths differ on edge ({e}, {r}): "
                           f"{f.tree_count} != {quad.forests[r].tree_count}")
        elif e < r and quad.bridges[r] != b.reversed_partner():
            reasons.append(f"bridge of half-edge {r} is not the reversal of half-edge {e}")
        u, v = scheme.endpoints(e)
        if b.final != quad.vertex_labels[v] - quad.vertex_labels[u]:
            reasons.append(f"bridge of half-edge {e} ends at {b.final}, vertex labels "
                           f"differ by {quad.vertex_labels[v] - quad.vertex_labels[u]}")
    if quad.vertex_labels[0] != 0:
        reasons.append(f"root vertex label is {quad.vertex_labels[0]}, not 0")
    span = 2 * quad.forests[0].n_edges + quad.forests[0].tree_count
    if not 0 <= quad.root_offset < span:
        reasons.append(f"root offset u={quad.root_offset} outside [0, {span})")
    if sum(quad.sigma) % 2:
        reasons.append("total chain length is odd")
    if n_edges is not None and quad.n_edges != n_edges:
        reasons.append(f"sizes add up to {quad.n_edges} edges, expected {n_edges}")
    return not reasons, reasons


def recompose(quad: DecompositionQuadruple) -> WellLabeledGTree:
    """
    Glue the forests along their chains back into a well-labeled g-tree.

    Raises IncompatibleQuadruple with every failed check.
    """
    ok, reasons = validate_compatible(quad)
    if not ok:
        raise IncompatibleQuadruple(reasons)
    scheme = quad.scheme
    size = 2 * quad.n_edges
    pairing = [-1] * size
    corner_label = [0] * size
    chain_pos: List[List[int]] = []

    pos = 0
    for e, (f, b) in enumerate(zip(quad.forests, quad.bridges)):
        pair = encode_contour(f)
        c = pair.contour
        base = quad.vertex_labels[scheme.origin(e)]
        stack = []
        floors = []
        low = c[0]
        for t in range(len(c) - 1):
            corner_label[pos] = base + b.values[f.tree_count - low] + pair.spatial[t]
            if c[t + 1] > c[t]:
                stack.append(pos)
            elif c[t] == low:
                floors.append(pos)
                low = c[t + 1]
            else:
                q = stack.pop()
                pairing[q], pairing[pos] = pos, q
            pos += 1
        chain_pos.append(floors)

    for e, floors in enumerate(chain_pos):
        r = scheme.pairing[e]
        if e < r:
            other = chain_pos[r]
            k_max = len(floors) - 1
            for k, a in enumerate(floors):
                b_pos = other[k_max - k]
                pairing[a], pairing[b_pos] = b_pos, a

    u = quad.root_offset
    rotated = [0] * size
    for i in range(size):
        rotated[(i - u) % size] = (pairing[i] - u) % size
    tree = from_pairing(size // 2, rotated)
    shift = corner_label[u]
    labels = [0] * tree.vertex_count
    for i in range(size):
        labels[int(tree.vertex_of[(i - u) % size])] = corner_label[i] - shift
    return validate_labels(tree, labels)
