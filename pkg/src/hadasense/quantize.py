"""Uniform scalar quantization of Uniform[-1, 1] sources.

Mapping a continuous source into integer cells before measurement caps the
achievable compression: with q cells the residual error is uniform on
[-1/q, 1/q] and independent of the cell index, and preserving the quantized
source to within epsilon bits per symbol forces the measurement rate above
1 - epsilon / log2(q).  As epsilon shrinks the bound climbs to one, so no
reduced-dimension measurement family preserves a continuous source the way
it can a discrete one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class UniformQuantizer:
    """q equal cells partitioning [-1, 1]; q must be at least 2."""

    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"level count q must be at least 2, got {self.q}")


def quantize(x: float, quantizer: UniformQuantizer) -> int:
    """Cell index of x in [-1, 1].

    Interior boundaries belong to the cell on their right; x = 1 maps to the
    last cell.
    """
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"input {x!r} outside [-1, 1]")
    q = quantizer.q
    return min(int(math.floor((x + 1.0) * q / 2.0)), q - 1)


def dequantize(d: int, quantizer: UniformQuantizer) -> float:
    """Cell midpoint: (2d - q + 1) / q."""
    q = quantizer.q
    if not 0 <= d < q:
        raise ValueError(f"cell index {d} outside [0, {q - 1}]")
    return (2.0 * d - q + 1.0) / q


def mmse(quantizer: UniformQuantizer) -> float:
    """Mean squared reconstruction error, exactly 1 / (3 q^2).

    The residual x - dequantize(quantize(x)) is uniform on [-1/q, 1/q], whose
    variance is this value.
    """
    return 1.0 / (3.0 * quantizer.q * quantizer.q)


def rate_lower_bound(epsilon: float, q: int) -> float:
    """Minimal asymptotic measurement rate: max(0, 1 - epsilon / log2(q))."""
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if q < 2:
        raise ValueError("q must be at least 2")
    return max(0.0, 1.0 - epsilon / math.log2(q))
