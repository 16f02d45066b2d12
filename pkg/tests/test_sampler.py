"""Tests for sampler: exact counts and the uniform g-tree sampler."""

from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from errors import EmptySupport, FloatModePrecisionLoss, UsageError
from gtree import enumerate_well_labeled_gtrees
from sampler import (bounded_convol, count_gtrees, count_quadrangulations, count_series,
                     propose_structure, resolve_mode, sample_batch, sample_gtree, sample_structure,
                     scheme_weights, weight_table)
from scheme import decompose
from streams import Stream

# rooted genus 1 quadrangulations with n faces, n = 2..5
TORUS_QUADRANGULATIONS = {2: 1, 3: 20, 4: 307, 5: 4280}


def test_small_counts():
    assert count_gtrees(1, 1) == 0
    assert count_gtrees(1, 2) == 1
    assert count_gtrees(1, 3) == 30


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_counts_match_enumeration(n):
    assert count_gtrees(1, n) == len(enumerate_well_labeled_gtrees(1, n))


def test_torus_quadrangulation_counts():
    for n, q in TORUS_QUADRANGULATIONS.items():
        assert count_quadrangulations(1, n) == q
        assert (n + 2 - 2) * q == 2 * count_gtrees(1, n)


@pytest.mark.slow
def test_genus_two_counts_start_at_four_edges():
    assert count_gtrees(2, 3) == 0
    assert count_gtrees(2, 4) == len(enumerate_well_labeled_gtrees(2, 4))


def test_count_series_matches_pointwise_counts():
    series = count_series(1, 8)
    assert [int(series[n]) for n in range(2, 9)] == [count_gtrees(1, n) for n in range(2, 9)]


def test_float_mode_tracks_exact():
    for n in (10, 40, 120):
        exact = count_gtrees(1, n)
        approx = count_gtrees(1, n, "float")
        assert approx == pytest.approx(float(exact), rel=1e-8)
    scaled = count_series(1, 40, "float")
    assert scaled[40] == pytest.approx(count_gtrees(1, 40) / 12 ** 40, rel=1e-8)


def test_float_mode_refuses_overflow():
    with pytest.raises(FloatModePrecisionLoss):
        count_gtrees(1, 400, "float")


def test_scheme_weights_add_up():
    n = 6
    weights = scheme_weights(1, n)
    assert sum(w for _, w in weights) == count_gtrees(1, n)


def test_argument_errors():
    with pytest.raises(UsageError):
        count_gtrees(0, 5)
    with pytest.raises(UsageError):
        count_gtrees(1, 0)
    with pytest.raises(UsageError):
        resolve_mode("fast", 10)
    with pytest.raises(UsageError):
        count_quadrangulations(3, 2)


def test_resolve_mode():
    assert resolve_mode("auto", 100) == "exact"
    assert resolve_mode("auto", 10 ** 6) == "float"
    assert resolve_mode("float", 5) == "float"


def test_bounded_convol_exact_and_float():
    a = np.array([0, 1, 2], dtype=object)
    b = np.array([1, 1, 0], dtype=object)
    assert list(bounded_convol(a, b, 3)) == [0, 1, 3]
    af = np.array([0.0, 1.0, 2.0])
    bf = np.array([1.0, 1.0, 0.0])
    assert list(bounded_convol(af, bf, 3)) == [0.0, 1.0, 3.0]


def test_empty_support():
    with pytest.raises(EmptySupport):
        sample_structure(1, 1, Stream(0))


def test_sampled_trees_are_valid():
    rng = Stream(4)
    for n in (2, 5, 40, 200):
        w = sample_gtree(1, n, rng)
        assert w.n_edges == n
        assert w.genus == 1
        assert w.labels[0] == 0


def test_float_mode_sampler_returns_valid_trees():
    w = sample_gtree(1, 300, Stream(8), mode="float")
    assert w.n_edges == 300 and w.genus == 1


def structure_key(scheme, m, sigma, labels, u):
    return (tuple(scheme.pairing), tuple(m), tuple(sigma), tuple(labels), u)


def enumerated_structure_law(n):
    trees = enumerate_well_labeled_gtrees(1, n)
    counts = Counter()
    for w in trees:
        q = decompose(w)
        counts[structure_key(q.scheme, q.m, q.sigma, q.vertex_labels, q.root_offset)] += 1
    return {k: Fraction(c, len(trees)) for k, c in counts.items()}


def accepted_structure_law(law, n):
    table = weight_table(1, n, "exact")

    def one_round(stream):
        sv = propose_structure(table, stream)
        if sv is None:
            return None
        return structure_key(sv.scheme, sv.m, sv.sigma, sv.labels, sv.u)

    dist = law(one_round)
    accept = 1 - dist.pop(None, Fraction(0))
    return {k: p / accept for k, p in dist.items()}


@pytest.mark.parametrize("n", [3, pytest.param(4, marks=pytest.mark.slow)])
def test_structure_law_is_exact(law, n):
    assert accepted_structure_law(law, n) == enumerated_structure_law(n)


def test_scheme_marginal_is_exact(law):
    n = 3
    total = count_gtrees(1, n)
    marginal = Counter()
    for key, p in accepted_structure_law(law, n).items():
        marginal[key[0]] += p
    expected = {tuple(s.pairing): Fraction(int(w), total)
                for s, w in scheme_weights(1, n) if w}
    assert dict(marginal) == expected
    assert sum(expected.values()) == 1


def chi_square_on_thirty_trees(seed, draws):
    trees = enumerate_well_labeled_gtrees(1, 3)
    index = {w: i for i, w in enumerate(trees)}
    rng = Stream(seed)
    counts = Counter(index[sample_gtree(1, 3, rng)] for _ in range(draws))
    observed = [counts.get(i, 0) for i in range(len(trees))]
    assert sum(observed) == draws
    return stats.chisquare(observed).pvalue


def test_sampler_uniform_on_thirty_trees():
    assert chi_square_on_thirty_trees(2024, 1500) > 1e-4


@pytest.mark.slow
def test_sampler_uniform_on_thirty_trees_at_full_size():
    assert chi_square_on_thirty_trees(31, 30000) > 1e-3


@pytest.mark.slow
def test_sampler_uniform_on_size_four():
    trees = enumerate_well_labeled_gtrees(1, 4)
    index = {w: i for i, w in enumerate(trees)}
    rng = Stream(77)
    draws = 20 * len(trees)
    counts = Counter(index[sample_gtree(1, 4, rng)] for _ in range(draws))
    observed = [counts.get(i, 0) for i in range(len(trees))]
    assert stats.chisquare(observed).pvalue > 1e-4


def test_batch_reproducible_and_worker_independent():
    one = sample_batch(1, 30, 6, seed=99)
    again = sample_batch(1, 30, 6, seed=99)
    assert one == again
    pooled = sample_batch(1, 30, 6, seed=99, workers=2)
    assert pooled == one
    assert sample_batch(1, 30, 6, seed=100) != one
