#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
metrics.py - Distances, label-process bounds and ball growth on sampled quadrangulations

Corner indices follow the re-rooted order: index i in [0, 2n] is the
corner reached i steps after the first corner of the first forest, so the
tree root sits at index u and t'(i) = t((i - u) mod 2n). The same order
is used by the global label process Lambda, the global contour c, and the
distance process d_n(i, j) = d_q(q'(i), q'(j)).

Sandwich checked by the tests on every pair:

    Lambda(i) - min over the ancestral lineage  <=  d_n(i, j)  <=  d_circ(i, j)

Usage:
    from metrics import SampleBundle, d_circ, distance_lower_bound

    b = SampleBundle.from_seed(genus=1, n=1000, seed=7)
    b.distances.d(0, 1000)
    d_circ(b.label_process, 0, 1000)
"""

import logging
import math
import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from cms import PointedQuadrangulation, cms_forward
from errors import IndexOutOfRange, RadiusGridTooCoarse, UsageError
from forest import encode_contour, shifted_label_process
from gtree import WellLabeledGTree
from map_core import CombinatorialMap, bfs_levels
from sampler import sample_gtree
from scheme import DecompositionQuadruple, decompose
from streams import Stream

logger = logging.getLogger(__name__)

# Rescaling constant of distances: d_n / (GAMMA * n^(1/4))
GAMMA = (8.0 / 9.0) ** 0.25


def rescale_factor(n: int) -> float:
    return GAMMA * n ** 0.25


# =============================================================================
# BFS, PROFILE
# =============================================================================

def bfs_distances(m: CombinatorialMap, source: int) -> np.ndarray:
    """Graph distance from source to every vertex."""
    return bfs_levels(m.adjacency(), source)


def profile_and_radius(pq: PointedQuadrangulation, base: str = "pointed") -> Tuple[np.ndarray, int]:
    """
    Vertex counts per distance from the base vertex, and the largest distance.

    base is "pointed" (v*) or "root" (origin of the root half-edge).
    """
    if base == "pointed":
        source = pq.pointed_vertex
    elif base == "root":
        source = pq.map.origin(pq.map.root)
    else:
        raise UsageError(f"base must be 'pointed' or 'root', got {base!r}")
    dist = bfs_distances(pq.map, source)
    hist = np.bincount(dist)
    return hist, int(len(hist) - 1)


# =============================================================================
# LABEL PROCESS
# =============================================================================

class SparseTableMin:
    """Range minimum over a fixed integer array, O(1) per query."""

    def __init__(self, values: Sequence[int]):
        base = np.asarray(values, dtype=np.int64)
        if base.size == 0:
            raise ValueError("SparseTableMin needs at least one value")
        self.size = len(base)
        self._levels = [base]
        width = 1
        while 2 * width <= self.size:
            prev = self._levels[-1]
            self._levels.append(np.minimum(prev[:-width], prev[width:]))
            width *= 2

    def query(self, i: int, j: int) -> int:
        """min of values[i..j], inclusive, i <= j."""
        if not 0 <= i <= j < self.size:
            raise IndexOutOfRange(f"range [{i}, {j}] outside [0, {self.size})")
        k = (j - i + 1).bit_length() - 1
        level = self._levels[k]
        return int(min(level[i], level[j - (1 << k) + 1]))

    def cyclic(self, i: int, j: int) -> int:
        """min over the cyclic arc i, i+1, ..., j."""
        if i <= j:
            return self.query(i, j)
        return min(self.query(i, self.size - 1), self.query(0, j))


@dataclass(frozen=True)
class GlobalLabelProcess:
    """Lambda(0..2n): corner labels in re-rooted order, Lambda(0) = 0."""
    values: Tuple[int, ...]

    @property
    def lifetime(self) -> int:
        return len(self.values) - 1

    @property
    def n_edges(self) -> int:
        return self.lifetime // 2

    def rescaled(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64) / rescale_factor(self.n_edges)

    @cached_property
    def rmq(self) -> SparseTableMin:
        # the cycle has 2n corners; index 2n is index 0 again
        return SparseTableMin(self.values[:-1])


def build_global_label_process(quad: DecompositionQuadruple) -> GlobalLabelProcess:
    """Concatenate the per-half-edge label processes in scheme facial order."""
    out: List[int] = []
    for e, (f, b) in enumerate(zip(quad.forests, quad.bridges)):
        base = quad.vertex_labels[quad.scheme.origin(e)]
        lam = shifted_label_process(f, b)
        out.extend(int(x) + base for x in lam[:-1])
    out.append(out[0])
    first = out[0]
    return GlobalLabelProcess(tuple(x - first for x in out))


def global_contour(quad: DecompositionQuadruple) -> np.ndarray:
    """
    Contour of the forest made by concatenating every half-edge forest.

    In segment e the value is C^e(t) plus the chain lengths of all later
    half-edges, so the process starts at the total chain length and ends at 0.
    """
    sigmas = quad.sigma
    later = np.concatenate([np.cumsum(sigmas[::-1])[::-1][1:], [0]])
    parts = []
    for f, tail in zip(quad.forests, later):
        c = np.asarray(encode_contour(f).contour, dtype=np.int64)
        parts.append(c[:-1] + tail)
    parts.append(np.zeros(1, dtype=np.int64))
    return np.concatenate(parts)


def _check_index(proc: GlobalLabelProcess, *indices: int) -> None:
    for i in indices:
        if not 0 <= i <= proc.lifetime:
            raise IndexOutOfRange(f"index {i} outside [0, {proc.lifetime}]")


def d_circ(proc: GlobalLabelProcess, i: int, j: int) -> int:
    """Lambda(i) + Lambda(j) - 2 max(min over arc i->j, min over arc j->i) + 2."""
    _check_index(proc, i, j)
    lam = proc.values
    size = proc.lifetime
    a, b = i % size, j % size
    lo = max(proc.rmq.cyclic(a, b), proc.rmq.cyclic(b, a))
    return lam[i] + lam[j] - 2 * lo + 2


def lineage(contour: np.ndarray, i: int, j: int) -> List[int]:
    """
    Indices k between i and j whose node is an ancestor of the node at i.

    k qualifies when its running contour minimum equals that of i (same
    tree of the large forest) and contour(k) is the minimum of the contour
    between k and i.
    """
    running = np.minimum.accumulate(contour)
    target = running[i]
    step = 1 if j >= i else -1
    out = []
    low = contour[i]
    for k in range(i, j + step, step):
        low = min(low, contour[k])
        if contour[k] == low and running[k] == target:
            out.append(k)
    return out


def distance_lower_bound(proc: GlobalLabelProcess, contour: np.ndarray, i: int, j: int) -> int:
    """Lambda(i) minus the smallest label on the ancestral lineage of i towards j."""
    _check_index(proc, i, j)
    if len(contour) != len(proc.values):
        raise UsageError("contour and label process come from different samples")
    lam = proc.values
    return lam[i] - min(lam[k] for k in lineage(contour, i, j))


def lower_bound_row(proc: GlobalLabelProcess, contour: np.ndarray, i: int) -> np.ndarray:
    """distance_lower_bound(proc, contour, i, j) for every j in [0, 2n] at once."""
    _check_index(proc, i, i)
    if len(contour) != len(proc.values):
        raise UsageError("contour and label process come from different samples")
    c = np.asarray(contour, dtype=np.int64)
    lam = np.asarray(proc.values, dtype=np.int64)
    running = np.minimum.accumulate(c)
    never = np.iinfo(np.int64).max
    out = np.empty(len(c), dtype=np.int64)
    for side in (slice(i, None), slice(i, None, -1)):
        seg = c[side]
        on_lineage = (seg == np.minimum.accumulate(seg)) & (running[side] == running[i])
        out[side] = lam[i] - np.minimum.accumulate(np.where(on_lineage, lam[side], never))
    return out


# =============================================================================
# DISTANCE PROCESS
# =============================================================================

class DistanceProcess:
    """
    d_n(i, j) on re-rooted corner indices, with BFS memoised per source vertex.

    Safe to query from several threads: the memo is guarded by a lock.
    """

    def __init__(self, pq: PointedQuadrangulation, root_offset: int):
        self.pq = pq
        size = len(pq.correspondence) - 1
        self.n = size // 2
        self.root_offset = root_offset
        q = pq.correspondence
        self.base_point_order = tuple(q[(i - root_offset) % size] for i in range(size + 1))
        self.scale = rescale_factor(self.n)
        self._memo: Dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def _levels(self, vertex: int) -> np.ndarray:
        with self._lock:
            levels = self._memo.get(vertex)
        if levels is None:
            levels = bfs_distances(self.pq.map, vertex)
            with self._lock:
                self._memo[vertex] = levels
        return levels

    def d(self, i: int, j: int) -> int:
        size = 2 * self.n
        if not (0 <= i <= size and 0 <= j <= size):
            raise IndexOutOfRange(f"corner index outside [0, {size}]")
        vi = self.base_point_order[i]
        vj = self.base_point_order[j]
        return int(self._levels(vi)[vj])

    def interpolated(self, s: float, t: float) -> float:
        """
        d_n extended to real s, t in [0, 2n].

        Each unit square is cut along its diagonal and d_n is linear on
        both triangles, so d_n(s, s) = 0. The corner weights are the joint
        law of ([U < frac s], [U < frac t]) for one uniform U, which keeps
        the triangle inequality for real arguments.
        """
        size = 2 * self.n
        if not (0 <= s <= size and 0 <= t <= size):
            raise IndexOutOfRange(f"real index outside [0, {size}]: {s}, {t}")
        fs, ft = math.floor(s), math.floor(t)
        ws, wt = s - fs, t - ft
        cs, ct = min(fs + 1, size), min(ft + 1, size)
        both = min(ws, wt)
        return ((1.0 - max(ws, wt)) * self.d(fs, ft) + both * self.d(cs, ct)
                + (ws - both) * self.d(cs, ft) + (wt - both) * self.d(fs, ct))


def rescaled_distance(dproc: DistanceProcess, s: float, t: float) -> float:
    """d_n(2ns, 2nt) / (gamma n^(1/4)) for s, t in [0, 1]."""
    if not (0.0 <= s <= 1.0 and 0.0 <= t <= 1.0):
        raise UsageError(f"s and t must lie in [0, 1], got {s}, {t}")
    size = 2 * dproc.n
    return dproc.interpolated(size * s, size * t) / dproc.scale


# =============================================================================
# SAMPLES
# =============================================================================

@dataclass(frozen=True)
class SampleBundle:
    """A sampled labeled g-tree with its decomposition and quadrangulation."""
    seed: int
    tree: WellLabeledGTree
    quad: DecompositionQuadruple
    pq: PointedQuadrangulation

    @classmethod
    def from_seed(cls, genus: int, n: int, seed: int, mode: str = "auto") -> 'SampleBundle':
        rng = Stream(seed)
        wlt = sample_gtree(genus, n, rng, mode)
        epsilon = 1 if rng.below(2) else -1
        return cls(seed, wlt, decompose(wlt), cms_forward(wlt, epsilon))

    @property
    def n(self) -> int:
        return self.tree.n_edges

    @cached_property
    def label_process(self) -> GlobalLabelProcess:
        return build_global_label_process(self.quad)

    @cached_property
    def contour(self) -> np.ndarray:
        return global_contour(self.quad)

    @cached_property
    def distances(self) -> DistanceProcess:
        return DistanceProcess(self.pq, self.quad.root_offset)


def two_point_statistic(samples: Sequence[SampleBundle], n: int) -> dict:
    """Empirical law of d_n(0, n) / (gamma n^(1/4)) over a batch."""
    values = [b.distances.d(0, n) / rescale_factor(n) for b in samples]
    arr = np.asarray(values, dtype=np.float64)
    summary = {"n": n, "count": len(values), "values": values}
    if len(values):
        q1, median, q3 = np.quantile(arr, [0.25, 0.5, 0.75])
        summary.update(mean=float(arr.mean()), median=float(median),
                       q1=float(q1), q3=float(q3), min=float(arr.min()), max=float(arr.max()))
    return summary


def compare_batches(a: Sequence[float], b: Sequence[float]) -> dict:
    """Two-sample Kolmogorov-Smirnov comparison; reported, never thresholded."""
    res = stats.ks_2samp(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    return {"statistic": float(res.statistic), "pvalue": float(res.pvalue),
            "n_a": len(a), "n_b": len(b)}


# =============================================================================
# BALL GROWTH
# =============================================================================

@dataclass
class DimensionEstimate:
    slope: float
    slopes: List[float]
    radii: List[int]
    rows: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"slope": self.slope, "slopes": self.slopes, "radii": self.radii, "rows": self.rows}


def radius_grid(n: int, radius: int, points: int = 8) -> List[int]:
    """Geometric integer grid from n^(1/8) to radius / 2."""
    lo = n ** 0.125
    hi = radius / 2.0
    if hi <= lo:
        raise RadiusGridTooCoarse(f"radius {radius} too small for a grid above n^(1/8) = {lo:.2f}")
    grid = sorted({int(round(r)) for r in np.geomspace(lo, hi, points)})
    if len(grid) < 6:
        raise RadiusGridTooCoarse(f"only {len(grid)} distinct radii between {lo:.2f} and {hi:.2f}")
    return grid


def dimension_estimate(target: Union[PointedQuadrangulation, CombinatorialMap], centers: int,
                       rng: Stream, radii: Optional[Sequence[int]] = None) -> DimensionEstimate:
    """
    Least-squares slope of log ball volume against log radius.

    One slope per random center; the estimate is their mean. Without an
    explicit grid the radii run geometrically from n^(1/8) to half the
    radius seen from the root vertex.
    """
    m = target.map if isinstance(target, PointedQuadrangulation) else target
    if centers < 1:
        raise UsageError("dimension estimate needs at least one center")
    if radii is None:
        radius = int(bfs_distances(m, m.origin(m.root)).max())
        radii = radius_grid(m.face_count, radius)
    grid = sorted({int(r) for r in radii if r > 0})
    if len(grid) < 2:
        raise RadiusGridTooCoarse(f"need at least two distinct positive radii, got {list(radii)}")

    log_r = np.log(np.asarray(grid, dtype=np.float64))
    slopes: List[float] = []
    rows: List[dict] = []
    for k in range(centers):
        c = rng.below(m.vertex_count)
        dist = bfs_distances(m, c)
        volume = np.cumsum(np.bincount(dist, minlength=grid[-1] + 1))
        vols = volume[grid]
        slope = float(stats.linregress(log_r, np.log(vols)).slope)
        slopes.append(slope)
        rows.extend({"center": c, "radius": r, "volume": int(v), "slope": slope}
                    for r, v in zip(grid, vols))
        logger.debug("center %d (%d/%d): slope %.3f", c, k + 1, centers, slope)
    return DimensionEstimate(float(np.mean(slopes)), slopes, grid, rows)
