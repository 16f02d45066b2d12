#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
errors.py - Exception hierarchy for the quadrangulation lab

Every failure a library call can signal is a QuadLabError. Errors about
malformed input also derive from ValueError.

Usage:
    from errors import QuadLabError, InvalidInvolution

    try:
        build_map(2, alpha, sigma, 0)
    except QuadLabError as e:
        print(f"Error: {e}")
"""

from typing import Optional


class QuadLabError(Exception):
    """Base class for all lab errors."""


# =============================================================================
# MAPS AND G-TREES
# =============================================================================

class InvalidInvolution(QuadLabError, ValueError):
    def __init__(self, half_edge: Optional[int] = None, message: str = ""):
        self.half_edge = half_edge
        super().__init__(message or f"alpha is not a fixed-point-free involution at half-edge {half_edge}")


class Disconnected(QuadLabError, ValueError):
    pass


class HalfEdgeOutOfRange(QuadLabError, ValueError):
    pass


class OneFaceViolation(QuadLabError, ValueError):
    def __init__(self, faces: int):
        self.faces = faces
        super().__init__(f"expected a one-face map, got {faces} faces")


class RootLabelNonzero(QuadLabError, ValueError):
    def __init__(self, label: int):
        self.label = label
        super().__init__(f"root vertex label is {label}, expected 0")


class IncrementTooLarge(QuadLabError, ValueError):
    def __init__(self, edge: tuple, labels: tuple):
        self.edge = edge
        self.labels = labels
        super().__init__(f"label increment {labels} across edge {edge} exceeds 1")


class SizeTooLargeForExhaustive(QuadLabError, ValueError):
    pass


# =============================================================================
# FORESTS AND PATHS
# =============================================================================

class MalformedContour(QuadLabError, ValueError):
    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"malformed contour at index {index}: {reason}")


class UnreachableTarget(QuadLabError, ValueError):
    pass


class InfeasibleParameters(QuadLabError, ValueError):
    pass


class LifetimeMismatch(QuadLabError, ValueError):
    pass


class IndexOutOfRange(QuadLabError, IndexError):
    pass


# =============================================================================
# SCHEMES, COUNTING, SAMPLING
# =============================================================================

class NoSchemeExists(QuadLabError):
    pass


class IncompatibleQuadruple(QuadLabError, ValueError):
    def __init__(self, reasons: list):
        self.reasons = list(reasons)
        super().__init__("; ".join(self.reasons))


class FloatModePrecisionLoss(QuadLabError):
    pass


class NonIntegerResult(QuadLabError):
    pass


class EmptySupport(QuadLabError, ValueError):
    pass


# =============================================================================
# QUADRANGULATIONS AND METRICS
# =============================================================================

class NotAQuadrangulation(QuadLabError, ValueError):
    pass


class NotBipartite(QuadLabError, ValueError):
    pass


class RadiusGridTooCoarse(QuadLabError, ValueError):
    pass


# =============================================================================
# ENUMERATION CONSTANT
# =============================================================================

class NotDominant(QuadLabError, ValueError):
    pass


class QuadratureNonconvergence(QuadLabError):
    pass


class ZeroSamples(QuadLabError, ValueError):
    pass


class CountsUnavailable(QuadLabError, ValueError):
    pass


class UsageError(QuadLabError, ValueError):
    pass
