#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
conftest.py - Shared pytest options and fixtures

Tests marked slow run only with --runslow.

exact_law(fn) runs fn once per branch of every below()/pick() decision
it makes on the stream it is handed, returning {result: probability}
with Fraction probabilities. It only suits samplers with finitely many
branches (no rejection loops).
"""

import sys
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="Run slow tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running statistical or numerical test")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# =============================================================================
# EXACT LAWS
# =============================================================================

class EnumeratingStream:
    """Replays a prefix of choices, then takes the first allowed branch."""

    def __init__(self, prefix):
        self.prefix = prefix
        self.trail = []

    def _choose(self, weights):
        weights = [int(w) for w in weights]
        depth = len(self.trail)
        if depth < len(self.prefix):
            choice = self.prefix[depth]
        else:
            choice = next(i for i, w in enumerate(weights) if w > 0)
        self.trail.append((choice, weights))
        return choice

    def below(self, n):
        return self._choose([1] * n)

    def pick(self, weights):
        return self._choose(weights)

    def probability(self):
        p = Fraction(1)
        for choice, weights in self.trail:
            p *= Fraction(weights[choice], sum(weights))
        return p


def exact_law(fn):
    law = defaultdict(Fraction)
    pending = [()]
    while pending:
        prefix = pending.pop()
        stream = EnumeratingStream(prefix)
        law[fn(stream)] += stream.probability()
        for depth in range(len(prefix), len(stream.trail)):
            choice, weights = stream.trail[depth]
            head = tuple(c for c, _ in stream.trail[:depth])
            for alt in range(choice + 1, len(weights)):
                if weights[alt] > 0:
                    pending.append(head + (alt,))
    return dict(law)


@pytest.fixture
def law():
    return exact_law
