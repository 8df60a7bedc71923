"""Entropy gap of self-convolution for integer-valued distributions.

For any pmf p over the integers, the entropy of p * p (independent sum of two
copies) exceeds the entropy of p by at least g(H(p)), where

    g(c) = min over y in [0, 1] of max( (1-y)^4 / (8 ln 2),  c y - (1+y) h2(y) )

with h2 the binary entropy in bits.  g is nondecreasing, vanishes only at
c = 0, and saturates at 1 / (8 ln 2) ~ 0.1803 bits.  This module evaluates the
two branch functions, solves the minimax, and provides a direct numerical
check of the inequality for concrete distributions.

The quartic branch comes from an l1 separation argument applied to the two
scaled restrictions of p on either side of a median-like cut: carving mass
alpha off one side forces ||p*p1 - p*p2||_1 >= 2 alpha, and Pinsker converts
that separation into an entropy increase of at least 2 alpha^4 / ln 2 bits.
The linear-entropy branch covers distributions dominated by a single heavy
atom of mass y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .zdist import ZDist, binary_entropy, convolve, entropy

#: Saturation value of the gap function, 1 / (8 ln 2) bits.
GAP_LIMIT = 1.0 / (8.0 * math.log(2.0))

_GRID_SIZE = 1024
_Y_GRID = np.linspace(0.0, 1.0, _GRID_SIZE + 1)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _h2_vec(y: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    inner = (y > 0.0) & (y < 1.0)
    t = y[inner]
    out[inner] = -(t * np.log2(t) + (1.0 - t) * np.log1p(-t) / math.log(2.0))
    return out


_QUARTIC_GRID = (1.0 - _Y_GRID) ** 4 / (8.0 * math.log(2.0))
_H2_TERM_GRID = (1.0 + _Y_GRID) * _h2_vec(_Y_GRID)


def lemma2_bound(c: float, x: float) -> float:
    """Lower bound c*x - (1+x)*h2(x) on the self-convolution entropy gap.

    Valid for any pmf with entropy c having an atom of mass x; may be
    negative, in which case it says nothing.
    """
    if c < 0.0:
        raise ValueError(f"entropy c must be nonnegative, got {c!r}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"atom mass x must lie in [0, 1], got {x!r}")
    return c * x - (1.0 + x) * binary_entropy(x)


def quartic_bound(y: float) -> float:
    """(1-y)^4 / (8 ln 2): the separation-based gap bound at heaviest atom y."""
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"y must lie in [0, 1], got {y!r}")
    return (1.0 - y) ** 4 / (8.0 * math.log(2.0))


@dataclass(frozen=True)
class EpiGapPoint:
    """Solved minimax at one entropy value c."""

    c: float
    g_of_c: float
    argmin_y: float
    active_branch: str  # "quartic" or "linear-entropy"


@dataclass(frozen=True)
class EpiCheck:
    """Result of testing gap >= g(H(p)) on a concrete distribution."""

    gap: float
    bound: float
    holds: bool


def _branch_max(c: float, y: float) -> float:
    return max(quartic_bound(y), c * y - (1.0 + y) * binary_entropy(y))


def _golden_min(f, lo: float, hi: float, tol: float) -> float:
    """Golden-section argmin of f on [lo, hi] down to interval width tol."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


def gap_function_g(c: float, tol: float = 1e-10) -> EpiGapPoint:
    """Solve the gap minimax over the full interval y in [0, 1].

    A 1024-point grid brackets the minimizer and golden-section refinement
    localizes it; the two branch functions cross exactly once in the region
    that attains the minimum, so a bracketed local search is global here.
    ``tol`` is the absolute accuracy requested for the returned g value.
    """
    if c < 0.0:
        raise ValueError(f"entropy c must be nonnegative, got {c!r}")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    return _solve_minimax(c, 0.0, 1.0, tol)


def gap_function_t(c: float, tol: float = 1e-10) -> float:
    """Same minimax restricted to y >= 2^(-c); always >= g(c)."""
    if c <= 0.0:
        raise ValueError(f"t(c) needs c > 0, got {c!r}")
    return _solve_minimax(c, min(2.0 ** (-c), 1.0), 1.0, tol).g_of_c


def _solve_minimax(c: float, y_lo: float, y_hi: float, tol: float) -> EpiGapPoint:
    if y_hi - y_lo < 1e-15:
        return _point(c, y_hi, _branch_max(c, y_hi))
    if y_lo == 0.0 and y_hi == 1.0:
        ys = _Y_GRID
        vals = np.maximum(_QUARTIC_GRID, c * _Y_GRID - _H2_TERM_GRID)
    else:
        ys = np.linspace(y_lo, y_hi, _GRID_SIZE + 1)
        vals = np.maximum((1.0 - ys) ** 4 / (8.0 * math.log(2.0)),
                          c * ys - (1.0 + ys) * _h2_vec(ys))
    k = int(np.argmin(vals))
    lo = ys[max(k - 1, 0)]
    hi = ys[min(k + 1, ys.size - 1)]
    # A bound on |dF/dy| converts the requested g accuracy into a y interval.
    slope = max(c + 4.0, 4.0 / (8.0 * math.log(2.0)), 1.0)
    y_star = _golden_min(lambda y: _branch_max(c, y), lo, hi,
                         max(tol / slope, 1e-15))
    g = _branch_max(c, y_star)
    g = min(g, float(vals[k]))
    if g < 0.0:
        g = 0.0
    return _point(c, y_star, g)


def _point(c: float, y: float, g: float) -> EpiGapPoint:
    quartic = quartic_bound(y)
    linear = c * y - (1.0 + y) * binary_entropy(y)
    branch = "quartic" if quartic >= linear else "linear-entropy"
    return EpiGapPoint(c=c, g_of_c=g, argmin_y=y, active_branch=branch)


def verify_epi(p: ZDist, tol: float = 1e-9) -> EpiCheck:
    """Check H(p*p) - H(p) >= g(H(p)) - tol for a concrete pmf."""
    h = entropy(p)
    gap = entropy(convolve(p, p)) - h
    bound = gap_function_g(h, min(tol, 1e-10)).g_of_c
    return EpiCheck(gap=gap, bound=bound, holds=gap >= bound - tol)


def epi_curve(c_max: float, steps: int, tol: float = 1e-10) -> list[EpiGapPoint]:
    """Sample g on a uniform entropy grid from 0 to c_max."""
    if c_max <= 0.0:
        raise ValueError("c_max must be positive")
    if steps < 2:
        raise ValueError("steps must be at least 2")
    return [gap_function_g(float(c), tol) for c in np.linspace(0.0, c_max, steps)]
