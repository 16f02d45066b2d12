#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
forest.py - Labeled forests, contour encodings and conditioned lattice paths

A forest with sigma trees and m edges is a sequence of plane trees planted
on floor vertices 1..sigma, plus a childless sentinel floor vertex
sigma + 1. It is stored as its contour C, a +-1 path of 2m + sigma steps
from sigma that first reaches 0 at its last step:

- an up-step goes to a new child
- a down-step from a time where C equals its running minimum is a floor
  step to the next floor vertex
- any other down-step returns to the parent

Nodes are numbered in first-visit order. Labels are stored per node.

Samplers take a streams.Stream and use only exact integer draws.

Usage:
    from forest import count_forests, sample_well_labeled_forest, encode_contour
    from streams import Stream

    count_forests(2, 1)                         # 2
    wlf = sample_well_labeled_forest(3, 10, Stream(1))
    pair = encode_contour(wlf)
"""

import logging
from dataclasses import dataclass
from math import comb
from typing import List, Sequence, Tuple

import numpy as np

from errors import (IndexOutOfRange, InfeasibleParameters, LifetimeMismatch,
                    MalformedContour, UnreachableTarget, UsageError)
from streams import Stream

logger = logging.getLogger(__name__)


# =============================================================================
# WALK KERNELS
# =============================================================================

def first_passage_count(m_steps: int, sigma: int) -> int:
    """Number of +-1 paths of m_steps steps that first reach -sigma at the last step."""
    if sigma == 0:
        return int(m_steps == 0)
    if m_steps < sigma or (m_steps - sigma) % 2:
        return 0
    return sigma * comb(m_steps, (m_steps - sigma) // 2) // m_steps


def count_forests(sigma: int, m: int) -> int:
    """sigma / (2m + sigma) * binomial(2m + sigma, m)."""
    return first_passage_count(2 * m + sigma, sigma)


def count_well_labeled_forests(sigma: int, m: int) -> int:
    """Each of the m tree edges carries an increment in {-1, 0, 1}."""
    return 3 ** m * count_forests(sigma, m)


def _motzkin_flat_weights(k: int, d: int) -> List[int]:
    """Entry z counts Motzkin paths of k steps and displacement d with z flat steps."""
    out = []
    for z in range(k + 1):
        rest = k - z
        if rest < abs(d) or (rest + d) % 2:
            out.append(0)
        else:
            out.append(comb(k, z) * comb(rest, (rest + d) // 2))
    return out


def motzkin_count(k: int, d: int) -> int:
    """Number of {-1, 0, 1} paths of k steps from 0 to d."""
    if abs(d) > k:
        return 0
    return sum(_motzkin_flat_weights(k, d))


# =============================================================================
# DATA TYPES
# =============================================================================

@dataclass(frozen=True)
class MotzkinBridge:
    values: Tuple[int, ...]

    @property
    def lifetime(self) -> int:
        return len(self.values) - 1

    @property
    def final(self) -> int:
        return self.values[-1]

    def reversed_partner(self) -> 'MotzkinBridge':
        """M'(i) = M(sigma - i) - M(sigma), the bridge read from the other end."""
        end = self.final
        return MotzkinBridge(tuple(v - end for v in reversed(self.values)))


@dataclass(frozen=True)
class LatticeBridgePath:
    values: Tuple[int, ...]

    @property
    def steps(self) -> Tuple[int, ...]:
        v = self.values
        return tuple(v[i + 1] - v[i] for i in range(len(v) - 1))


@dataclass(frozen=True)
class ContourPair:
    contour: Tuple[int, ...]
    spatial: Tuple[int, ...]

    @property
    def lifetime(self) -> int:
        return len(self.contour) - 1

    def to_dict(self) -> dict:
        return {"contour": list(self.contour), "spatial": list(self.spatial)}

    @classmethod
    def from_dict(cls, data: dict) -> 'ContourPair':
        return cls(tuple(data["contour"]), tuple(data["spatial"]))


@dataclass
class ContourWalk:
    """Node bookkeeping of one pass along a contour."""
    visits: List[int]       # node at each time
    parent: List[int]       # -1 for floor vertices
    floor_steps: List[int]  # times i where step i -> i+1 is a floor step


def walk_contour(contour: Sequence[int]) -> ContourWalk:
    """
    Follow a contour, numbering nodes in first-visit order.

    Raises MalformedContour at the first index that breaks the encoding.
    """
    c = [int(x) for x in contour]
    if not c:
        raise MalformedContour(0, "empty contour")
    if c[0] < 1 and len(c) > 1:
        raise MalformedContour(0, f"contour must start at sigma >= 1, got {c[0]}")
    if c[-1] != 0:
        raise MalformedContour(len(c) - 1, "contour must end at 0")
    parent = [-1]
    visits = [0]
    floor_steps = []
    stack = []
    cur = 0
    low = c[0]
    for i in range(len(c) - 1):
        step = c[i + 1] - c[i]
        if step == 1:
            stack.append(cur)
            cur = len(parent)
            parent.append(stack[-1])
        elif step == -1:
            if c[i] == low:
                floor_steps.append(i)
                cur = len(parent)
                parent.append(-1)
                low = c[i + 1]
            else:
                cur = stack.pop()
        else:
            raise MalformedContour(i + 1, f"step {step} is not +-1")
        if c[i + 1] <= 0 and i + 1 < len(c) - 1:
            raise MalformedContour(i + 1, "contour reaches 0 before its last index")
        visits.append(cur)
    return ContourWalk(visits, parent, floor_steps)


@dataclass(frozen=True)
class Forest:
    """A forest stored as its contour."""
    contour: Tuple[int, ...]

    @property
    def tree_count(self) -> int:
        return self.contour[0]

    @property
    def n_edges(self) -> int:
        return (len(self.contour) - 1 - self.tree_count) // 2

    @property
    def lifetime(self) -> int:
        return len(self.contour) - 1

    @property
    def node_count(self) -> int:
        return self.n_edges + self.tree_count + 1

    def words(self) -> List[Tuple[int, ...]]:
        """Neveu words of the nodes, in first-visit order."""
        walk = walk_contour(self.contour)
        words: List[Tuple[int, ...]] = []
        children = [0] * len(walk.parent)
        n_floor = 0
        for node, p in enumerate(walk.parent):
            if p == -1:
                n_floor += 1
                words.append((n_floor,))
            else:
                children[p] += 1
                words.append(words[p] + (children[p],))
        return words

    @classmethod
    def from_words(cls, words) -> 'Forest':
        """Build a forest from a set of Neveu words, checking closure."""
        ws = set(tuple(w) for w in words)
        floor = sorted(w[0] for w in ws if len(w) == 1)
        if not floor or floor != list(range(1, len(floor) + 1)):
            raise UsageError("floor words must be exactly 1..sigma+1")
        sigma = len(floor) - 1
        kids = {}
        for w in ws:
            if not w or min(w) < 1:
                raise UsageError(f"invalid word {w}")
            if len(w) > 1:
                if w[:-1] not in ws:
                    raise UsageError(f"parent of {w} missing")
                kids.setdefault(w[:-1], []).append(w[-1])
        for p, ks in kids.items():
            if sorted(ks) != list(range(1, len(ks) + 1)):
                raise UsageError(f"children of {p} have gaps")
        if (sigma + 1,) in kids:
            raise UsageError("the sentinel floor vertex has children")

        contour = [sigma]
        for k in range(1, sigma + 1):
            # iterative depth-first contour of the tree rooted at (k,)
            stack = [((k,), 0)]
            while stack:
                node, nxt = stack.pop()
                n_kids = len(kids.get(node, ()))
                if nxt < n_kids:
                    stack.append((node, nxt + 1))
                    stack.append((node + (nxt + 1,), 0))
                    contour.append(contour[-1] + 1)
                elif stack:
                    contour.append(contour[-1] - 1)
            contour.append(contour[-1] - 1)
        return cls(tuple(contour))


@dataclass(frozen=True)
class WellLabeledForest:
    """A forest with node labels (first-visit order), zero on the floor."""
    forest: Forest
    labels: Tuple[int, ...]

    @property
    def tree_count(self) -> int:
        return self.forest.tree_count

    @property
    def n_edges(self) -> int:
        return self.forest.n_edges

    def to_dict(self) -> dict:
        return encode_contour(self).to_dict()


# =============================================================================
# ENUMERATION
# =============================================================================

def enumerate_forests(sigma: int, m: int) -> List[Forest]:
    """Every forest with sigma trees and m edges, by contour in lexicographic order."""
    length = 2 * m + sigma
    out = []
    path = [sigma]

    def extend() -> None:
        i = len(path) - 1
        h = path[-1]
        if i == length:
            if h == 0:
                out.append(Forest(tuple(path)))
            return
        remaining = length - i
        for step in (-1, 1):
            nh = h + step
            # must stay positive until the end and still be able to reach 0
            if nh < 0 or (nh == 0 and remaining > 1) or nh > remaining - 1:
                continue
            path.append(nh)
            extend()
            path.pop()

    extend()
    logger.debug("enumerated %d forests with sigma=%d, m=%d", len(out), sigma, m)
    return out


# =============================================================================
# CONTOUR ENCODING
# =============================================================================

def encode_contour(wlf: WellLabeledForest) -> ContourPair:
    walk = walk_contour(wlf.forest.contour)
    lab = wlf.labels
    return ContourPair(wlf.forest.contour, tuple(lab[v] for v in walk.visits))


def decode_contour(pair: ContourPair) -> WellLabeledForest:
    """
    Rebuild the well-labeled forest of a contour pair.

    Raises MalformedContour naming the first offending index.
    """
    if len(pair.spatial) != len(pair.contour):
        raise MalformedContour(min(len(pair.spatial), len(pair.contour)),
                               "contour and spatial lengths differ")
    walk = walk_contour(pair.contour)
    labels = [None] * len(walk.parent)
    spatial = [int(x) for x in pair.spatial]
    for i, node in enumerate(walk.visits):
        value = spatial[i]
        if labels[node] is None:
            if walk.parent[node] == -1:
                if value != 0:
                    raise MalformedContour(i, f"floor label {value} is not 0")
            elif abs(value - labels[walk.parent[node]]) > 1:
                raise MalformedContour(i, "label increment exceeds 1")
            labels[node] = value
        elif labels[node] != value:
            raise MalformedContour(i, "label changes on a revisit")
    return WellLabeledForest(Forest(tuple(int(x) for x in pair.contour)), tuple(labels))


# =============================================================================
# SAMPLERS
# =============================================================================

def sample_lattice_bridge(m_steps: int, target: int, rng: Stream) -> LatticeBridgePath:
    """Uniform +-1 path of m_steps steps from 0 to target."""
    if abs(target) > m_steps or (m_steps + target) % 2:
        raise UnreachableTarget(f"no +-1 path of {m_steps} steps reaches {target}")
    ups = (m_steps + target) // 2
    downs = m_steps - ups
    values = [0]
    for _ in range(m_steps):
        if rng.pick((downs, ups)):
            ups -= 1
            values.append(values[-1] + 1)
        else:
            downs -= 1
            values.append(values[-1] - 1)
    return LatticeBridgePath(tuple(values))


def sample_motzkin_bridge(sigma: int, target: int, rng: Stream) -> MotzkinBridge:
    """
    Uniform {-1, 0, 1} path of sigma steps from 0 to target.

    The flat-step count is drawn from its exact marginal, then the steps
    are laid out as a uniform arrangement of the resulting multiset.
    """
    if abs(target) > sigma:
        raise UnreachableTarget(f"no Motzkin path of {sigma} steps reaches {target}")
    flats = rng.pick(_motzkin_flat_weights(sigma, target)) if sigma else 0
    ups = (sigma - flats + target) // 2
    downs = sigma - flats - ups
    left = [downs, flats, ups]
    values = [0]
    for _ in range(sigma):
        kind = rng.pick(left)
        left[kind] -= 1
        values.append(values[-1] + kind - 1)
    return MotzkinBridge(tuple(values))


def bcp_transform(bridge: LatticeBridgePath, nu: int) -> LatticeBridgePath:
    """
    Cyclic shift of a bridge to -sigma at the first time it hits min + nu.

    For nu in [0, sigma) this is a sigma-to-one map from bridges onto
    first-passage paths.
    """
    sigma = -bridge.values[-1]
    if not 0 <= nu < sigma:
        raise InfeasibleParameters(f"nu={nu} outside [0, {sigma})")
    r = bridge.values.index(min(bridge.values) + nu)
    steps = bridge.steps
    values = [0]
    for s in steps[r:] + steps[:r]:
        values.append(values[-1] + s)
    return LatticeBridgePath(tuple(values))


def bcp_first_passage_bridge(m_steps: int, sigma: int, rng: Stream) -> LatticeBridgePath:
    """Uniform +-1 path of m_steps steps first reaching -sigma at its end."""
    if sigma < 1 or m_steps < sigma or (m_steps - sigma) % 2:
        raise InfeasibleParameters(f"no first-passage path with m={m_steps}, sigma={sigma}")
    bridge = sample_lattice_bridge(m_steps, -sigma, rng)
    return bcp_transform(bridge, rng.below(sigma))


def sample_well_labeled_forest(sigma: int, m: int, rng: Stream) -> WellLabeledForest:
    """Uniform well-labeled forest with sigma trees and m edges."""
    if sigma < 1 or m < 0:
        raise InfeasibleParameters(f"no forest with sigma={sigma}, m={m}")
    path = bcp_first_passage_bridge(2 * m + sigma, sigma, rng).values
    contour = tuple(sigma + s for s in path)
    walk = walk_contour(contour)
    labels = [0] * len(walk.parent)
    for node, p in enumerate(walk.parent):
        if p != -1:
            labels[node] = labels[p] + rng.below(3) - 1
    return WellLabeledForest(Forest(contour), tuple(labels))


# =============================================================================
# LABEL PROCESSES
# =============================================================================

def shifted_label_process(wlf: WellLabeledForest, bridge: MotzkinBridge) -> np.ndarray:
    """
    Lambda(t) = L(t) + M(sigma - min_{s <= t} C(s)) for t in [0, 2m + sigma].

    Each tree's labels are shifted by the bridge value of its floor vertex.
    """
    sigma = wlf.tree_count
    if bridge.lifetime != sigma:
        raise LifetimeMismatch(f"bridge lifetime {bridge.lifetime} != tree count {sigma}")
    pair = encode_contour(wlf)
    c = np.asarray(pair.contour, dtype=np.int64)
    running = np.minimum.accumulate(c)
    m = np.asarray(bridge.values, dtype=np.int64)
    return np.asarray(pair.spatial, dtype=np.int64) + m[sigma - running]


def discrete_snake_path(pair: ContourPair, i: int) -> List[int]:
    """
    Labels along the ancestral line of the node visited at time i.

    Entry j is L at the last time k <= i with C(k) = j; levels below the
    running minimum are floor vertices not reached yet and read 0.
    """
    if not 0 <= i <= pair.lifetime:
        raise IndexOutOfRange(f"time {i} outside [0, {pair.lifetime}]")
    c = pair.contour
    top = c[i]
    out = [0] * (top + 1)
    out[top] = pair.spatial[i]
    low = top
    for k in range(i - 1, -1, -1):
        if c[k] < low:
            low = c[k]
            out[low] = pair.spatial[k]
            if low == 0:
                break
    return out
