"""Fast application of the two Kronecker transform families and their inverses.

Both transforms are n-fold Kronecker powers of a 2x2 kernel acting on vectors
of length N = 2^n:

* kind "J": kernel ((1, 1), (-1, 1)) -- a signed Hadamard family with
  mutually orthogonal rows (J J^T = N I).
* kind "G": kernel ((1, 1), (0, 1)) -- unit upper triangular, hence
  invertible over the integers.

Outputs are kept in the natural row order of the Kronecker matrix (no
bit-reversal permutation), so output i is literally row i of the dense
matrix times the input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_KERNELS = {
    "J": np.array([[1, 1], [-1, 1]], dtype=np.int64),
    "G": np.array([[1, 1], [0, 1]], dtype=np.int64),
}

_MAX_DEPTH = 20
_MAX_DENSE_DEPTH = 12


@dataclass(frozen=True)
class TransformPlan:
    """Size and kind of one transform: N = 2^n, kind in {"J", "G"}."""

    n: int
    kind: str

    def __post_init__(self):
        if not 0 <= self.n <= _MAX_DEPTH:
            raise ValueError(f"depth n must lie in [0, {_MAX_DEPTH}], got {self.n}")
        if self.kind not in _KERNELS:
            raise ValueError(f"kind must be 'J' or 'G', got {self.kind!r}")

    @property
    def N(self) -> int:
        return 1 << self.n


@dataclass(frozen=True)
class BitPath:
    """MSB-first binary expansion of index - 1; 0 marks a sum stage, 1 a
    conditioning stage."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")

    @property
    def index(self) -> int:
        """1-based output index this path addresses."""
        v = 0
        for b in self.bits:
            v = (v << 1) | b
        return v + 1


def bit_path(i: int, n: int) -> BitPath:
    """Path of output i (1-based) through a depth-n transform."""
    if not 1 <= i <= (1 << n):
        raise ValueError(f"index {i} out of range [1, {1 << n}]")
    return BitPath(tuple((i - 1 >> (n - 1 - k)) & 1 for k in range(n)))


def _check_length(plan: TransformPlan, x: np.ndarray):
    if x.shape[-1] != plan.N:
        raise ValueError(f"expected vectors of length {plan.N}, got {x.shape[-1]}")


def apply_fast(plan: TransformPlan, x) -> np.ndarray:
    """Butterfly evaluation of the transform, O(N log N).

    Accepts a vector or a batch with vectors along the last axis.  Integer
    input is processed in int64 (exact for n <= 20 with small alphabets),
    anything else in float64.
    """
    x = np.asarray(x)
    _check_length(plan, x)
    dtype = np.int64 if np.issubdtype(x.dtype, np.integer) else np.float64
    y = x.astype(dtype).copy()
    lead = y.shape[:-1]
    for d in range(plan.n):
        v = y.reshape(lead + (1 << d, 2, -1))
        a = v[..., 0, :].copy()
        b = v[..., 1, :]
        v[..., 0, :] = a + b
        v[..., 1, :] = b if plan.kind == "G" else b - a
    return y


def apply_naive(plan: TransformPlan, x) -> np.ndarray:
    """Dense matrix product; the O(N^2) oracle for apply_fast."""
    x = np.asarray(x)
    _check_length(plan, x)
    m = build_matrix(plan)
    if not np.issubdtype(x.dtype, np.integer):
        m = m.astype(np.float64)
    return np.einsum("ij,...j->...i", m, x)


def invert(plan: TransformPlan, y) -> np.ndarray:
    """Inverse transform; exact over the integers for kind G, floating for J."""
    y = np.asarray(y)
    _check_length(plan, y)
    if plan.kind == "G":
        dtype = np.int64 if np.issubdtype(y.dtype, np.integer) else np.float64
    else:
        dtype = np.float64
    x = y.astype(dtype).copy()
    lead = x.shape[:-1]
    for d in reversed(range(plan.n)):
        v = x.reshape(lead + (1 << d, 2, -1))
        u = v[..., 0, :].copy()
        w = v[..., 1, :].copy()
        if plan.kind == "G":
            v[..., 0, :] = u - w
            v[..., 1, :] = w
        else:
            v[..., 0, :] = (u - w) / 2
            v[..., 1, :] = (u + w) / 2
    return x


def build_matrix(plan: TransformPlan) -> np.ndarray:
    """Dense Kronecker matrix, int64.  Refused above N = 2^12."""
    if plan.n > _MAX_DENSE_DEPTH:
        raise ValueError(f"dense matrix refused for n > {_MAX_DENSE_DEPTH}")
    m = np.array([[1]], dtype=np.int64)
    for _ in range(plan.n):
        m = np.kron(_KERNELS[plan.kind], m)
    return m


def hadamard_row(i: int, n: int) -> np.ndarray:
    """Row i (1-based) of the kind-J matrix of size 2^n, entries in {-1, 1}.

    Built as the Kronecker product of the kernel rows selected by the bit
    path of i, so no dense matrix is materialized.
    """
    row = np.array([1], dtype=np.int64)
    for b in bit_path(i, n).bits:
        row = np.kron(row, _KERNELS["J"][b])
    return row


def gram(plan: TransformPlan) -> np.ndarray:
    """J_N J_N^T, which equals N times the identity (rows are orthogonal)."""
    if plan.kind != "J":
        raise ValueError("gram is only defined for kind J; G rows are not orthogonal")
    m = build_matrix(plan)
    return m @ m.T
