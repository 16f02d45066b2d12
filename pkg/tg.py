#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
tg.py - The constant t_g in |Q_n| ~ t_g n^(5(g-1)/2) 12^n, and numerical cross-checks

Closed form over dominant schemes s and vertex orderings lambda:

    t_g = 3^g / (2^(11g-7) (6g-3) Gamma((5g-3)/2))
          * sum_s sum_lambda prod_{k=1}^{4g-3} 1 / d(lambda, k)

    d(lambda, k) = #{half-edges e : pos(e-) < k <= pos(e+)}

The sum is accumulated as an exact fraction; only the prefactor is
evaluated in floating point, with mpmath at a chosen precision.

Cross-checks:
    - check_lemag: convolution identity of Gaussian kernels, by quadrature
    - check_p_bracket: p^[10g-4](0) closed form against its moment integral
    - estimate_upsilon: Monte Carlo of the normalization constant Upsilon,
      t_g = 2^((3g+1)/2) 3^g Upsilon
    - asymptotic_ratio: |T_n| 12^-n n^-((5g-3)/2) against t_g / 2

Usage:
    from tg import tg_closed_form

    res = tg_closed_form(1)
    res.rational_part    # Fraction(2, 3)
    res.value            # 1/24
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import integrate
from scipy.special import gammaln

from errors import (CountsUnavailable, NotDominant, QuadratureNonconvergence,
                    UsageError, ZeroSamples)
from sampler import count_series
from scheme import Scheme, enumerate_schemes
from settings import DEFAULTS
from streams import Stream

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)


# =============================================================================
# GAUSSIAN KERNELS
# =============================================================================

def gaussian_density(a, x):
    """p_a(x): centered Gaussian density with variance a."""
    a = np.asarray(a, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-x * x / (2.0 * a)) / np.sqrt(2.0 * np.pi * a)


def gaussian_density_derivative(a, x):
    """p'_a(x) = -x / a^(3/2) p(x / sqrt(a))."""
    a = np.asarray(a, dtype=np.float64)
    return -np.asarray(x, dtype=np.float64) / a * gaussian_density(a, x)


# =============================================================================
# ORDERINGS
# =============================================================================

def orderings(scheme: Scheme):
    """Every bijection lambda from [0, |V| - 1] onto the vertices; lambda[i] is a vertex."""
    return itertools.permutations(range(scheme.vertex_count))


def _positions(lam: Sequence[int]) -> List[int]:
    pos = [0] * len(lam)
    for i, v in enumerate(lam):
        pos[v] = i
    return pos


def _check_ordering(scheme: Scheme, lam: Sequence[int], k: int) -> None:
    if not scheme.dominant:
        raise NotDominant(f"scheme with degrees {scheme.vertex_degrees} is not dominant")
    if sorted(lam) != list(range(scheme.vertex_count)):
        raise UsageError(f"ordering {tuple(lam)} is not a bijection onto the vertices")
    if not 1 <= k <= scheme.vertex_count - 1:
        raise UsageError(f"k must lie in [1, {scheme.vertex_count - 1}], got {k}")


def d_lambda_k(scheme: Scheme, lam: Sequence[int], k: int) -> int:
    """Half-edges whose origin comes before the cut at k and whose head comes after."""
    _check_ordering(scheme, lam, k)
    pos = _positions(lam)
    return sum(1 for h in range(scheme.n_half_edges)
               if pos[scheme.origin(h)] < k <= pos[scheme.head(h)])


def d_lambda_k_by_coefficients(scheme: Scheme, lam: Sequence[int], k: int) -> int:
    """
    Same quantity through the coefficients of the sorted label sum.

    c(lambda, v) is +1 per neighbour placed before v and -1 per neighbour
    placed after it; loops are skipped.
    """
    _check_ordering(scheme, lam, k)
    pos = _positions(lam)
    coef = [0] * scheme.vertex_count
    for h in range(scheme.n_half_edges):
        v, w = scheme.origin(h), scheme.head(h)
        if v != w:
            coef[v] += 1 if pos[w] < pos[v] else -1
    return sum(coef[lam[i]] for i in range(k, len(lam)))


def ordering_weight(scheme: Scheme, lam: Sequence[int]) -> Fraction:
    """prod_{k=1}^{|V|-1} 1 / d(lambda, k)."""
    w = Fraction(1)
    for k in range(1, scheme.vertex_count):
        w /= d_lambda_k(scheme, lam, k)
    return w


# =============================================================================
# CLOSED FORM
# =============================================================================

def prefactor(genus: int, precision: int = None):
    """3^g / (2^(11g-7) (6g-3) Gamma((5g-3)/2)) as an mpmath number."""
    precision = DEFAULTS.precision_bits if precision is None else precision
    with mpmath.workprec(precision):
        return mpmath.mpf(3) ** genus / (mpmath.mpf(2) ** (11 * genus - 7) * (6 * genus - 3)
                                         * mpmath.gamma(mpmath.mpf(5 * genus - 3) / 2))


@dataclass
class TgResult:
    genus: int
    rational_part: Fraction
    prefactor: object
    value: object
    precision_bits: int
    n_schemes: int = 0

    def digits(self) -> int:
        return max(15, int(self.precision_bits * math.log10(2)))

    def to_dict(self) -> dict:
        return {
            "genus": self.genus,
            "rational_part": f"{self.rational_part.numerator}/{self.rational_part.denominator}",
            "t_g": mpmath.nstr(self.value, self.digits()),
            "precision_bits": self.precision_bits,
        }


def rational_part(genus: int, schemes: Optional[Sequence[Scheme]] = None) -> Tuple[Fraction, int]:
    """Sum over dominant schemes and orderings of prod 1 / d(lambda, k)."""
    if schemes is None:
        schemes = enumerate_schemes(genus, dominant_only=True)
    total = Fraction(0)
    for s in schemes:
        for lam in orderings(s):
            total += ordering_weight(s, lam)
    return total, len(schemes)


def tg_closed_form(genus: int, precision: int = None) -> TgResult:
    if genus < 1:
        raise UsageError(f"genus must be >= 1, got {genus}")
    precision = DEFAULTS.precision_bits if precision is None else precision
    rat, count = rational_part(genus)
    pre = prefactor(genus, precision)
    with mpmath.workprec(precision):
        value = pre * mpmath.mpf(rat.numerator) / rat.denominator
    logger.info("t_%d from %d dominant schemes: rational part %s", genus, count, rat)
    return TgResult(genus, rat, pre, value, precision, count)


def upsilon_from_tg(genus: int, t_g) -> float:
    """Upsilon = t_g / (2^((3g+1)/2) 3^g)."""
    return float(t_g) / (2.0 ** ((3 * genus + 1) / 2.0) * 3.0 ** genus)


# =============================================================================
# ANALYTIC CHECKS
# =============================================================================

def _quad(f, lo, hi, tol: float, what: str) -> float:
    out = integrate.quad(f, lo, hi, epsabs=tol * 1e-3, epsrel=1e-12, limit=400, full_output=1)
    value, abserr = out[0], out[1]
    if len(out) > 3:
        logger.debug("%s: quadrature reported %r", what, out[3])
    if abserr > tol:
        raise QuadratureNonconvergence(f"{what}: error estimate {abserr:.3g} above {tol:.3g}")
    return float(value)


def lemag_integral(a: float, b: float, t: float, tol: float = 1e-8) -> float:
    """
    int_0^t p_{t-m}(a) (-p'_m(b)) dm.

    Integrated in x = m / (t - m) over [0, inf), which moves both kernel
    endpoints to smooth tails.
    """
    if min(a, b, t) <= 0:
        raise UsageError("a, b and t must be positive")

    def integrand(x: float) -> float:
        m = t * x / (1.0 + x)
        jac = t / (1.0 + x) ** 2
        return float(gaussian_density(t - m, a) * -gaussian_density_derivative(m, b)) * jac

    return _quad(integrand, 0.0, np.inf, tol, f"kernel convolution at ({a}, {b}, {t})")


def check_lemag(a: float, b: float, t: float, tol: float = 1e-8) -> float:
    """|int_0^t p_{t-m}(a) (-p'_m(b)) dm - p_t(a + b)|."""
    residual = abs(lemag_integral(a, b, t, tol) - float(gaussian_density(t, a + b)))
    logger.debug("kernel identity at (%g, %g, %g): residual %.3g", a, b, t, residual)
    return residual


def p_bracket_at_zero(n: int) -> Fraction:
    """p^[n](0) for even n >= 2: p^[2](0) = 1/2 and p^[n](0) = p^[n-2](0) / (n - 2)."""
    if n < 2 or n % 2:
        raise UsageError(f"closed form needs an even n >= 2, got {n}")
    value = Fraction(1, 2)
    for k in range(4, n + 1, 2):
        value /= k - 2
    return value


def p_bracket_moment(n: int, tol: float = 1e-12) -> float:
    """p^[n](0) = int_0^inf y^(n-2) / (n-2)! p(y) dy, by quadrature."""
    if n < 2:
        raise UsageError(f"n must be >= 2, got {n}")
    lg = math.lgamma(n - 1)

    def integrand(y: float) -> float:
        if y == 0.0:
            return 1.0 / SQRT_2PI if n == 2 else 0.0
        return math.exp((n - 2) * math.log(y) - lg - y * y / 2.0) / SQRT_2PI

    return _quad(integrand, 0.0, np.inf, tol, f"moment of order {n - 2}")


def check_p_bracket(genus: int, tol: float = 1e-10) -> float:
    """|1 / (2^(5g-2) (5g-3)!) - moment integral for n = 10g - 4|."""
    if genus < 1:
        raise UsageError(f"genus must be >= 1, got {genus}")
    n = 10 * genus - 4
    closed = Fraction(1, 2 ** (5 * genus - 2) * math.factorial(5 * genus - 3))
    return abs(float(closed) - p_bracket_moment(n, tol))


# =============================================================================
# MONTE CARLO UPSILON
# =============================================================================

@dataclass
class _SchemeGeometry:
    edges: List[Tuple[int, int]]      # (origin, head) per scheme edge, root edge first
    n_vertices: int

    @classmethod
    def of(cls, scheme: Scheme) -> '_SchemeGeometry':
        return cls([scheme.endpoints(e) for e in scheme.oriented()], scheme.vertex_count)


def _log_label_integral(geo: _SchemeGeometry, sigma: np.ndarray) -> np.ndarray:
    """
    log int prod_e p_{sigma_e}(l_head - l_origin) dl with the root label fixed.

    The Gaussian integral equals (2 pi)^((V-1)/2) det(L)^(-1/2) prod (2 pi sigma_e)^(-1/2)
    with L the Laplacian weighted by 1 / sigma_e, root row and column removed.
    """
    batch = sigma.shape[0]
    v = geo.n_vertices
    lap = np.zeros((batch, v, v))
    for e, (a, b) in enumerate(geo.edges):
        if a == b:
            continue
        w = 1.0 / sigma[:, e]
        lap[:, a, a] += w
        lap[:, b, b] += w
        lap[:, a, b] -= w
        lap[:, b, a] -= w
    _, logdet = np.linalg.slogdet(lap[:, 1:, 1:])
    return (0.5 * (v - 1) * math.log(2 * math.pi) - 0.5 * logdet
            - 0.5 * np.log(2 * math.pi * sigma).sum(axis=1))


def _log_label_isotropic(geo: _SchemeGeometry, sigma: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """One-sample estimate of the same integral from l ~ N(0, sum(sigma) I)."""
    batch = sigma.shape[0]
    spread = sigma.sum(axis=1)
    labels = np.zeros((batch, geo.n_vertices))
    labels[:, 1:] = gen.standard_normal((batch, geo.n_vertices - 1)) * np.sqrt(spread)[:, None]
    out = np.zeros(batch)
    for e, (a, b) in enumerate(geo.edges):
        out += np.log(gaussian_density(sigma[:, e], labels[:, b] - labels[:, a]))
    out -= np.log(gaussian_density(spread[:, None], labels[:, 1:])).sum(axis=1)
    return out


def _upsilon_weights(geo: _SchemeGeometry, batch: int, gen: np.random.Generator,
                     alpha: float, label_proposal: str) -> np.ndarray:
    """
    Importance weights for one scheme.

    Edge masses M ~ Dirichlet(alpha), split uniformly between the two
    half-edges; sigma = sqrt(h W) with W ~ chi2(3) and h = m m' / (m + m'),
    which matches the product of the two -p' kernels up to M^(-3/2) / (2 sqrt(2 pi)).
    u is integrated out (factor m of the root half-edge).
    """
    n_e = len(geo.edges)
    mass = gen.dirichlet(np.full(n_e, alpha), size=batch)
    mass = np.maximum(mass, np.finfo(np.float64).tiny)
    split = gen.random((batch, n_e))
    h = mass * split * (1.0 - split)
    sigma = np.sqrt(h * gen.chisquare(3, size=(batch, n_e)))
    sigma = np.maximum(sigma, np.finfo(np.float64).tiny)

    log_dir = (gammaln(n_e * alpha) - n_e * gammaln(alpha)
               + (alpha - 1.0) * np.log(mass).sum(axis=1))
    log_w = (np.log(mass[:, 0] * split[:, 0])
             - 0.5 * np.log(mass).sum(axis=1)
             - n_e * math.log(2.0 * SQRT_2PI)
             - log_dir)
    if label_proposal == "laplacian":
        log_w += _log_label_integral(geo, sigma)
    else:
        log_w += _log_label_isotropic(geo, sigma, gen)
    return np.exp(log_w)


def estimate_upsilon(genus: int, mc_samples: int, rng: Stream, alpha: float = None,
                     label_proposal: str = "laplacian") -> Tuple[float, float]:
    """
    Monte Carlo estimate of Upsilon and its standard error.

    Each sample picks a dominant scheme uniformly and returns K times its
    importance weight, K the number of dominant schemes.
    """
    if mc_samples < 1:
        raise ZeroSamples("estimate_upsilon needs mc_samples >= 1")
    if label_proposal not in ("laplacian", "isotropic"):
        raise UsageError(f"label_proposal must be laplacian or isotropic, got {label_proposal!r}")
    alpha = DEFAULTS.dirichlet_alpha if alpha is None else alpha
    geos = [_SchemeGeometry.of(s) for s in enumerate_schemes(genus, dominant_only=True)]
    k = len(geos)
    gen = rng.numpy()

    total = 0.0
    total_sq = 0.0
    done = 0
    while done < mc_samples:
        chunk = min(DEFAULTS.mc_chunk, mc_samples - done)
        per_scheme = gen.multinomial(chunk, np.full(k, 1.0 / k))
        for geo, count in zip(geos, per_scheme):
            if count:
                w = k * _upsilon_weights(geo, int(count), gen, alpha, label_proposal)
                total += float(w.sum())
                total_sq += float((w * w).sum())
        done += chunk
    mean = total / mc_samples
    var = max(total_sq / mc_samples - mean * mean, 0.0)
    stderr = math.sqrt(var / mc_samples) if mc_samples > 1 else float("inf")
    logger.info("Upsilon (g=%d, %d samples): %.6g +/- %.2g", genus, mc_samples, mean, stderr)
    return mean, stderr


# =============================================================================
# ASYMPTOTIC RATIO
# =============================================================================

@dataclass
class RatioReport:
    genus: int
    target: float
    rows: List[dict] = field(default_factory=list)
    monotone: bool = True

    def to_dict(self) -> dict:
        return {"genus": self.genus, "target": self.target, "monotone": self.monotone, "rows": self.rows}


def asymptotic_ratio(genus: int, n_list: Sequence[int], target: float = None) -> RatioReport:
    """
    r(n) = |T_n| 12^-n n^-((5g-3)/2) against its limit t_g / 2.

    monotone is False when the relative deviation fails to shrink along
    the sorted n values.
    """
    ns = sorted({int(n) for n in n_list})
    if not ns:
        raise CountsUnavailable("asymptotic_ratio needs at least one n")
    if ns[0] < 2 * genus:
        raise CountsUnavailable(f"no g-trees of genus {genus} with {ns[0]} edges")
    if target is None:
        target = float(tg_closed_form(genus).value) / 2.0
    series = count_series(genus, ns[-1], "exact")
    exponent = (5 * genus - 3) / 2.0
    report = RatioReport(genus, target)
    previous = None
    for n in ns:
        count = int(series[n])
        ratio = float(Fraction(count, 12 ** n)) * n ** -exponent
        deviation = abs(ratio / target - 1.0)
        report.rows.append({"n": n, "ratio": ratio, "deviation": deviation})
        if previous is not None and deviation > previous:
            report.monotone = False
        previous = deviation
    return report
