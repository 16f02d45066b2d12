#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
sampler.py - Exact counting and uniform sampling of well-labeled g-trees

A well-labeled g-tree is its scheme plus, per scheme edge, a chain length
sigma, two forest sizes and a Motzkin bridge, plus node labels and the
root offset. Summing over those data edge by edge gives |T_n|:

    per edge of total size s (forest edges + chain length),
    H(d)[s] = sum_sigma B(sigma, d) 3^(s - sigma) F(2 sigma, s - sigma)

with B the Motzkin bridge count and F the forest count; the root edge is
weighted by s for the choice of the root offset. Node labels are summed
out by variable elimination, keeping polynomials in the size.

Sampling draws the label-free part of a structure from closed-form size
weights and accepts the node labels with the exact bridge probabilities
on the edges outside a spanning tree, so the accepted structure follows
the exact structure law.

Modes: "exact" uses Python integers throughout, "float" scales every
weight by 12^-s and uses float64; "auto" picks exact up to
LabSettings.exact_max_n.

Usage:
    from sampler import count_gtrees, sample_gtree
    from streams import Stream

    count_gtrees(1, 3)                   # 30
    wlt = sample_gtree(1, 500, Stream(7))
"""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammaln

from errors import EmptySupport, FloatModePrecisionLoss, NonIntegerResult, UsageError
from forest import (count_forests, motzkin_count, sample_motzkin_bridge,
                    sample_well_labeled_forest)
from gtree import WellLabeledGTree
from scheme import DecompositionQuadruple, Scheme, enumerate_schemes, recompose
from settings import DEFAULTS
from streams import Stream, derive_seed

logger = logging.getLogger(__name__)

MODES = ("exact", "float", "auto")


def resolve_mode(mode: str, n: int) -> str:
    if mode not in MODES:
        raise UsageError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "auto":
        return "exact" if n <= DEFAULTS.exact_max_n else "float"
    return mode


def _zeros(length: int, mode: str) -> np.ndarray:
    if mode == "exact":
        return np.array([0] * length, dtype=object)
    return np.zeros(length)


def bounded_convol(a: np.ndarray, b: np.ndarray, length: int) -> np.ndarray:
    """First `length` coefficients of the product of two size series."""
    if a.dtype == object:
        out = np.array([0] * length, dtype=object)
        nz_a = np.flatnonzero(a != 0)
        nz_b = np.flatnonzero(b != 0)
        if not len(nz_a) or not len(nz_b):
            return out
        ia, ib = int(nz_a[0]), int(nz_b[0])
        if ia + ib >= length:
            return out
        prod = np.convolve(a[ia:length - ib], b[ib:length - ia])[:length - ia - ib]
        out[ia + ib:ia + ib + len(prod)] = prod
        return out
    out = fftconvolve(a, b)[:length] if min(len(a), len(b)) > 64 else np.convolve(a, b)[:length]
    return np.clip(out, 0.0, None)


@lru_cache(maxsize=None)
def schemes_of_genus(genus: int) -> Tuple[Scheme, ...]:
    return tuple(enumerate_schemes(genus))


# =============================================================================
# EDGE SERIES
# =============================================================================

@lru_cache(maxsize=8)
def _edge_series(n: int, mode: str) -> Tuple[np.ndarray, np.ndarray]:
    """
    (H, H_root): row d holds the size series of one scheme edge whose end
    labels differ by d (0 <= d <= n). Float mode is scaled by 12^-s.
    """
    size = n + 1
    if mode == "exact":
        bridge = np.array([[0] * size for _ in range(size)], dtype=object)   # [d, sigma]
        row = [1]
        for sigma in range(1, size):
            prev = row + [0, 0]
            row = [(prev[d - 1] if d >= 1 else prev[1]) + prev[d] + prev[d + 1]
                   for d in range(sigma + 1)]
            for d in range(sigma + 1):
                bridge[d, sigma] = row[d]
        forest = np.array([[0] * size for _ in range(size)], dtype=object)   # [sigma, s]
        for sigma in range(1, size):
            for s in range(sigma, size):
                forest[sigma, s] = 3 ** (s - sigma) * count_forests(2 * sigma, s - sigma)
    else:
        # Motzkin probabilities P(sigma, d) = B(sigma, d) / 3^sigma
        bridge = np.zeros((size, size))
        row = np.array([1.0])
        for sigma in range(1, size):
            padded = np.concatenate([[row[1] if len(row) > 1 else 0.0], row, [0.0, 0.0]])
            # padded[d + 1] = P(sigma - 1, d), with P(., -1) = P(., 1)
            row = (padded[0:sigma + 1] + padded[1:sigma + 2] + padded[2:sigma + 3]) / 3.0
            bridge[:sigma + 1, sigma] = row
        forest = np.zeros((size, size))
        s = np.arange(size, dtype=float)
        for sigma in range(1, size):
            k = s[sigma:] - sigma
            big = k + sigma
            # F(2 sigma, k) / 4^(k + sigma) with F(2 sigma, k) = sigma / big * C(2 big, k)
            logw = (np.log(sigma) - np.log(big) + gammaln(2 * big + 1) - gammaln(k + 1)
                    - gammaln(big + sigma + 1) - big * np.log(4.0))
            forest[sigma, sigma:] = np.exp(logw)
    series = bridge.dot(forest)
    sizes = np.arange(size, dtype=object if mode == "exact" else float)
    return series, series * sizes


def _scheme_series(scheme: Scheme, n: int, mode: str) -> np.ndarray:
    """Size series of the well-labeled g-trees built on one rooted scheme, truncated at n."""
    series, root_series = _edge_series(n, mode)
    length = n + 1
    const = _zeros(length, mode)
    const[0] = 1
    # factors: (scope, lookup) where lookup(labels) -> series or None
    factors = []
    for e in scheme.oriented():
        table = root_series if e == 0 else series
        a, b = scheme.endpoints(e)
        if a == b:
            const = bounded_convol(const, table[0], length)
            continue
        factors.append((tuple(sorted({a, b} - {0})), _edge_lookup(a, b, table, n)))

    remaining = sorted({v for scope, _ in factors for v in scope})
    labels_range = range(-n, n + 1)
    while remaining:
        # eliminate the variable with the fewest neighbours
        def width(v):
            return len({w for scope, _ in factors if v in scope for w in scope})
        v = min(remaining, key=width)
        remaining.remove(v)
        touching = [f for f in factors if v in f[0]]
        factors = [f for f in factors if v not in f[0]]
        scope = tuple(sorted({w for s, _ in touching for w in s} - {v}))
        entries: Dict[tuple, np.ndarray] = {}
        for assign in itertools.product(labels_range, repeat=len(scope)):
            labels = dict(zip(scope, assign))
            acc = None
            for lv in labels_range:
                labels[v] = lv
                prod = None
                for _, lookup in touching:
                    term = lookup(labels)
                    if term is None:
                        prod = None
                        break
                    prod = term if prod is None else bounded_convol(prod, term, length)
                if prod is not None:
                    acc = prod.copy() if acc is None else acc + prod
            if acc is not None:
                entries[assign] = acc
        logger.debug("eliminated vertex %d, new scope %s, %d entries", v, scope, len(entries))
        factors.append((scope, _table_lookup(scope, entries)))

    for scope, lookup in factors:
        term = lookup({})
        if term is None:
            return _zeros(length, mode)
        const = bounded_convol(const, term, length)
    return const


def _edge_lookup(a: int, b: int, table: np.ndarray, n: int):
    def lookup(labels: dict):
        d = abs(labels.get(b, 0) - labels.get(a, 0))
        return table[d] if d <= n else None
    return lookup


def _table_lookup(scope: tuple, table: dict):
    def lookup(labels: dict):
        return table.get(tuple(labels[w] for w in scope))
    return lookup


# =============================================================================
# COUNTING
# =============================================================================

def _check_args(genus: int, n: int) -> None:
    if genus < 1:
        raise UsageError(f"genus must be >= 1, got {genus}")
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")


def count_series(genus: int, n_max: int, mode: str = "exact") -> np.ndarray:
    """
    |T_n| for n = 0..n_max (exact integers), or |T_n| / 12^n in float mode.
    """
    _check_args(genus, n_max)
    if mode not in ("exact", "float"):
        raise UsageError(f"count mode must be exact or float, got {mode!r}")
    total = _zeros(n_max + 1, mode)
    for scheme in schemes_of_genus(genus):
        if scheme.n_edges <= n_max:
            total = total + _scheme_series(scheme, n_max, mode)
    return total


def scheme_weights(genus: int, n: int, mode: str = "exact") -> List[Tuple[Scheme, object]]:
    """Number of well-labeled g-trees of size n built on each rooted scheme."""
    _check_args(genus, n)
    return [(s, _scheme_series(s, n, mode)[n] if s.n_edges <= n else 0)
            for s in schemes_of_genus(genus)]


def count_gtrees(genus: int, n: int, mode: str = "exact"):
    """
    |T_n|. Exact mode returns an int; float mode a float, refused above
    LabSettings.float_count_max_n where 12^n leaves the double range.
    """
    _check_args(genus, n)
    if mode == "float" and n > DEFAULTS.float_count_max_n:
        raise FloatModePrecisionLoss(
            f"float counts overflow above n={DEFAULTS.float_count_max_n}; use exact mode")
    if n < 2 * genus:
        return 0 if mode == "exact" else 0.0
    value = count_series(genus, n, mode)[n]
    if mode == "exact":
        return int(value)
    return float(value) * 12.0 ** n


def count_quadrangulations(genus: int, n: int) -> int:
    """|Q_n| = 2 |T_n| / (n + 2 - 2g)."""
    _check_args(genus, n)
    vertices = n + 2 - 2 * genus
    if vertices < 1:
        raise UsageError(f"no quadrangulation of genus {genus} with {n} faces")
    trees = count_gtrees(genus, n)
    if (2 * trees) % vertices:
        raise NonIntegerResult(f"2 * {trees} is not divisible by {vertices}")
    return 2 * trees // vertices


# =============================================================================
# STRUCTURE SAMPLING
# =============================================================================

@dataclass(frozen=True)
class StructureVector:
    scheme: Scheme
    m: Tuple[int, ...]          # forest size per scheme half-edge
    sigma: Tuple[int, ...]      # chain length per scheme half-edge
    labels: Tuple[int, ...]     # node labels, root node 0
    u: int

    def edge_label(self, e: int) -> int:
        a, b = self.scheme.endpoints(e)
        return self.labels[b] - self.labels[a]

    def to_dict(self) -> dict:
        return {"scheme": list(self.scheme.pairing), "m": list(self.m),
                "sigma": list(self.sigma), "labels": list(self.labels), "u": self.u}


@dataclass
class WeightTable:
    """Label-free size weights of the structure law for one (genus, n, mode)."""
    genus: int
    n: int
    mode: str
    schemes: Tuple[Scheme, ...]
    scheme_weights: list
    edge_weight: np.ndarray
    root_weight: np.ndarray
    suffix: Dict[int, List[np.ndarray]] = field(default_factory=dict)


def _size_weights(n: int, mode: str) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-edge weight of total size s once chain lengths and forests are
    summed out with unit label weight: C(2s, s)/2, and s times that on
    the root edge. Float mode divides by 4^s.
    """
    if mode == "exact":
        w = np.array([0] + [comb(2 * s, s) // 2 for s in range(1, n + 1)], dtype=object)
        sizes = np.arange(n + 1, dtype=object)
    else:
        s = np.arange(n + 1, dtype=float)
        w = np.exp(gammaln(2 * s + 1) - 2 * gammaln(s + 1) - s * np.log(4.0) - np.log(2.0))
        w[0] = 0.0
        sizes = s
    return w, w * sizes


@lru_cache(maxsize=16)
def weight_table(genus: int, n: int, mode: str) -> WeightTable:
    w, w_root = _size_weights(n, mode)
    schemes = tuple(s for s in schemes_of_genus(genus) if s.n_edges <= n)
    length = n + 1
    suffix: Dict[int, List[np.ndarray]] = {}
    for n_e in sorted({s.n_edges for s in schemes}):
        chain = [None] * n_e
        chain[n_e - 1] = w
        for k in range(n_e - 2, 0, -1):
            chain[k] = bounded_convol(w, chain[k + 1], length)
        chain[0] = bounded_convol(w_root, chain[1], length) if n_e > 1 else w_root
        suffix[n_e] = chain
    weights = [suffix[s.n_edges][0][n] for s in schemes]
    logger.info("weight table built: genus=%d n=%d mode=%s schemes=%d", genus, n, mode, len(schemes))
    return WeightTable(genus, n, mode, schemes, weights, w, w_root, suffix)


def _pick(rng: Stream, weights, mode: str) -> int:
    if mode == "exact":
        return rng.pick([int(x) for x in weights])
    return rng.pick_cumulative(np.cumsum(np.asarray(weights, dtype=float)))


def _log_forest(sigma: int, m: np.ndarray) -> np.ndarray:
    big = 2 * m + sigma
    return (np.log(sigma) - np.log(big) + gammaln(big + 1) - gammaln(m + 1) - gammaln(m + sigma + 1))


def _chain_length(s: int, rng: Stream, mode: str) -> int:
    """sigma in [1, s] with weight sigma * C(2s, s - sigma)."""
    if mode == "exact":
        return 1 + rng.pick([sig * comb(2 * s, s - sig) for sig in range(1, s + 1)])
    sig = np.arange(1, s + 1, dtype=float)
    logw = np.log(sig) - gammaln(s - sig + 1) - gammaln(s + sig + 1)
    return 1 + rng.pick_cumulative(np.cumsum(np.exp(logw - logw.max())))


def _forest_split(sigma: int, k: int, root: bool, rng: Stream, mode: str) -> int:
    """m1 in [0, k] with weight F(sigma, m1) F(sigma, k - m1), times (2 m1 + sigma) on the root."""
    if mode == "exact":
        weights = [count_forests(sigma, m1) * count_forests(sigma, k - m1) for m1 in range(k + 1)]
        if root:
            weights = [w * (2 * m1 + sigma) for m1, w in enumerate(weights)]
        return rng.pick(weights)
    m1 = np.arange(k + 1, dtype=float)
    logw = _log_forest(sigma, m1) + _log_forest(sigma, k - m1)
    if root:
        logw = logw + np.log(2 * m1 + sigma)
    return rng.pick_cumulative(np.cumsum(np.exp(logw - logw.max())))


def _spanning_edges(scheme: Scheme) -> List[int]:
    """Oriented half-edges of a BFS spanning tree of the scheme, from vertex 0."""
    reached = {0}
    tree = []
    frontier = [0]
    oriented = scheme.oriented()
    while frontier:
        nxt = []
        for v in frontier:
            for e in oriented:
                a, b = scheme.endpoints(e)
                for x, y in ((a, b), (b, a)):
                    if x == v and y not in reached:
                        reached.add(y)
                        tree.append(e)
                        nxt.append(y)
        frontier = nxt
    return tree


def propose_structure(table: WeightTable, rng: Stream) -> Optional[StructureVector]:
    """
    One proposal round of the structure sampler; None when rejected.

    Label differences are proposed as sums of uniform {-1, 0, 1} steps on
    spanning-tree edges and accepted on the other edges with probability
    (Motzkin count) / 3^sigma.
    """
    mode = table.mode
    n = table.n
    scheme = table.schemes[_pick(rng, table.scheme_weights, mode)]
    oriented = scheme.oriented()
    chain = table.suffix[scheme.n_edges]

    sizes = []
    remaining = n
    for k in range(len(oriented)):
        wk = table.root_weight if k == 0 else table.edge_weight
        if k == len(oriented) - 1:
            sizes.append(remaining)
            break
        rest = chain[k + 1]
        weights = wk[1:remaining + 1] * rest[:remaining][::-1]
        s = 1 + _pick(rng, weights, mode)
        sizes.append(s)
        remaining -= s

    m = [0] * scheme.n_half_edges
    sig = [0] * scheme.n_half_edges
    for k, e in enumerate(oriented):
        s = sizes[k]
        chain_len = _chain_length(s, rng, mode)
        m1 = _forest_split(chain_len, s - chain_len, k == 0, rng, mode)
        r = scheme.pairing[e]
        sig[e] = sig[r] = chain_len
        m[e] = m1
        m[r] = s - chain_len - m1
    u = rng.below(2 * m[0] + sig[0])

    labels = [0] * scheme.vertex_count
    tree_edges = _spanning_edges(scheme)
    placed = {0}
    pending = list(tree_edges)
    while pending:
        for e in list(pending):
            a, b = scheme.endpoints(e)
            if a in placed or b in placed:
                d = sum(rng.below(3) - 1 for _ in range(sig[e]))
                if a in placed:
                    labels[b] = labels[a] + d
                    placed.add(b)
                else:
                    labels[a] = labels[b] - d
                    placed.add(a)
                pending.remove(e)

    tree_set = set(tree_edges)
    for e in oriented:
        if e in tree_set:
            continue
        a, b = scheme.endpoints(e)
        if rng.below(3 ** sig[e]) >= motzkin_count(sig[e], labels[b] - labels[a]):
            return None
    return StructureVector(scheme, tuple(m), tuple(sig), tuple(labels), u)


def sample_structure(genus: int, n: int, rng: Stream, mode: str = "auto") -> StructureVector:
    """
    Draw (scheme, m, sigma, labels, u) from the structure law of size n.

    Raises EmptySupport when no g-tree of this size exists.
    """
    _check_args(genus, n)
    mode = resolve_mode(mode, n)
    table = weight_table(genus, n, mode)
    if not table.schemes or not any(w > 0 for w in table.scheme_weights):
        raise EmptySupport(f"no well-labeled g-tree with genus {genus} and {n} edges")

    attempts = 0
    while True:
        attempts += 1
        sv = propose_structure(table, rng)
        if sv is not None:
            logger.debug("structure accepted after %d attempts", attempts)
            return sv


def sample_gtree(genus: int, n: int, rng: Stream, mode: str = "auto") -> WellLabeledGTree:
    """Uniform well-labeled g-tree of genus g with n edges."""
    sv = sample_structure(genus, n, rng, mode)
    scheme = sv.scheme
    bridges = [None] * scheme.n_half_edges
    for e in scheme.oriented():
        b = sample_motzkin_bridge(sv.sigma[e], sv.edge_label(e), rng)
        bridges[e] = b
        bridges[scheme.pairing[e]] = b.reversed_partner()
    forests = [sample_well_labeled_forest(sv.sigma[e], sv.m[e], rng)
               for e in range(scheme.n_half_edges)]
    quad = DecompositionQuadruple(scheme, tuple(bridges), tuple(forests), sv.u, sv.labels)
    return recompose(quad)


def _sample_task(task: tuple) -> WellLabeledGTree:
    genus, n, seed, index, mode = task
    return sample_gtree(genus, n, Stream(derive_seed(seed, index)), mode)


def sample_batch(genus: int, n: int, count: int, seed: int,
                 mode: str = "auto", workers: int = 1) -> List[WellLabeledGTree]:
    """
    count independent samples; sample i uses the stream derived from
    (seed, i), so the batch does not depend on the worker count.
    """
    tasks = [(genus, n, seed, i, mode) for i in range(count)]
    if workers <= 1:
        return [_sample_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(_sample_task, tasks, chunksize=4))
