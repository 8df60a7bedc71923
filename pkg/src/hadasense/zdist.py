"""Exact arithmetic on finitely supported probability distributions over the integers.

A distribution is stored densely as a mass vector plus the integer value of its
first entry (``offset``).  This keeps convolution a plain sliding dot product
and makes supports explicit; every operation returns a new, canonically trimmed
distribution (no zero mass at either end, masses renormalized to one).

Entropies are reported in bits throughout.  Divergences are computed in nats
internally and converted at the boundary, which keeps Pinsker-style bounds
free of stray log(2) factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_LN2 = math.log(2.0)
_NORM_TOL = 1e-12


class InvalidCutError(ValueError):
    """Raised when a split point leaves no mass on one of the two sides."""


def _canonical(offset: int, masses: np.ndarray) -> tuple[int, np.ndarray]:
    """Trim zero tails and renormalize; masses must already be valid weights."""
    nz = np.flatnonzero(masses > 0.0)
    if nz.size == 0:
        raise ValueError("distribution has no positive mass")
    lo, hi = int(nz[0]), int(nz[-1]) + 1
    out = masses[lo:hi] / math.fsum(masses[lo:hi])
    out.setflags(write=False)
    return offset + lo, out


@dataclass(frozen=True)
class ZDist:
    """Finitely supported pmf over the integers.

    ``masses[k]`` is the probability of the integer ``offset + k``.  The vector
    is trimmed (first and last entries positive) and sums to one within 1e-12;
    the constructor renormalizes to enforce this after floating-point drift.
    Instances are immutable and safe to share across threads.
    """

    offset: int
    masses: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=np.float64)
        if m.ndim != 1 or m.size == 0:
            raise ValueError("masses must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(m)):
            raise ValueError("masses must be finite")
        if np.any(m < 0.0):
            raise ValueError("masses must be nonnegative")
        total = math.fsum(m)
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"masses sum to {total!r}, expected 1 (use from_weights "
                             "for unnormalized input)")
        off, m = _canonical(int(self.offset), m)
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "masses", m)

    @classmethod
    def from_weights(cls, offset: int, weights) -> "ZDist":
        """Build from nonnegative weights, normalizing them to a pmf."""
        w = np.asarray(weights, dtype=np.float64)
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        total = math.fsum(w)
        if total <= 0.0:
            raise ValueError("weights must have positive total mass")
        return cls(offset, w / total)

    @classmethod
    def delta(cls, k: int) -> "ZDist":
        """Point mass at ``k``."""
        return cls(k, np.array([1.0]))

    @classmethod
    def bernoulli(cls, p: float) -> "ZDist":
        """Two-point source with P(X=1) = p and P(X=0) = 1 - p."""
        if not 0.0 < p < 1.0:
            raise ValueError("p must lie strictly between 0 and 1")
        return cls(0, np.array([1.0 - p, p]))

    @classmethod
    def from_dict(cls, pmf: dict) -> "ZDist":
        """Build from a mapping {integer value: probability}."""
        keys = sorted(int(k) for k in pmf)
        lo, hi = keys[0], keys[-1]
        m = np.zeros(hi - lo + 1)
        for k in keys:
            m[k - lo] = float(pmf[k])
        return cls(lo, m)

    @property
    def support(self) -> np.ndarray:
        """Integer values carrying the mass vector (including interior zeros)."""
        return np.arange(self.offset, self.offset + self.masses.size)

    @property
    def last(self) -> int:
        return self.offset + self.masses.size - 1

    def pm(self, k: int) -> float:
        """Probability of the integer ``k``."""
        i = k - self.offset
        if 0 <= i < self.masses.size:
            return float(self.masses[i])
        return 0.0

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        """Draw i.i.d. values using the given generator."""
        return rng.choice(self.masses.size, size=size, p=self.masses) + self.offset

    def to_dict(self) -> dict:
        """JSON form: {"offset": int, "masses": [...]}."""
        return {"offset": int(self.offset), "masses": [float(x) for x in self.masses]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "ZDist":
        return cls(int(d["offset"]), np.asarray(d["masses"], dtype=np.float64))


@dataclass(frozen=True)
class SplitResult:
    """Two-sided restriction of a pmf at an integer cut.

    ``alpha1 * left + (1 - alpha1) * right`` reconstructs the original pmf;
    ``left`` lives on values <= cut and ``right`` on values >= cut + 1.
    """

    alpha1: float
    left: ZDist
    right: ZDist
    cut: int


def entropy(d: ZDist) -> float:
    """Shannon entropy in bits, with zero-mass terms contributing zero."""
    m = d.masses[d.masses > 0.0]
    return -math.fsum(m * np.log2(m))


def binary_entropy(x: float) -> float:
    """h2(x) = -x log2 x - (1-x) log2(1-x), defined as 0 at the endpoints."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy needs x in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -(x * math.log2(x) + (1.0 - x) * math.log1p(-x) / _LN2)


def convolve(p: ZDist, q: ZDist) -> ZDist:
    """Distribution of X + Y for independent X ~ p, Y ~ q."""
    return ZDist.from_weights(p.offset + q.offset, np.convolve(p.masses, q.masses))


def reflect(d: ZDist) -> ZDist:
    """Distribution of -X."""
    return ZDist(-(d.offset + d.masses.size - 1), d.masses[::-1].copy())


def split(d: ZDist, cut: int) -> SplitResult:
    """Split into scaled restrictions to (-inf, cut] and [cut+1, inf).

    Raises InvalidCutError when either side carries no mass.
    """
    k = cut - d.offset + 1
    if k <= 0 or k >= d.masses.size:
        raise InvalidCutError(f"cut {cut} leaves all mass on one side of {d!r}")
    alpha1 = math.fsum(d.masses[:k])
    if alpha1 <= 0.0 or alpha1 >= 1.0:
        raise InvalidCutError(f"cut {cut} leaves zero mass on one side")
    left = ZDist.from_weights(d.offset, d.masses[:k])
    right = ZDist.from_weights(d.offset + k, d.masses[k:])
    return SplitResult(alpha1, left, right, cut)


def _aligned(p: ZDist, q: ZDist) -> tuple[np.ndarray, np.ndarray]:
    """Mass vectors of p and q on the common union grid."""
    lo = min(p.offset, q.offset)
    hi = max(p.last, q.last)
    a = np.zeros(hi - lo + 1)
    b = np.zeros(hi - lo + 1)
    a[p.offset - lo:p.offset - lo + p.masses.size] = p.masses
    b[q.offset - lo:q.offset - lo + q.masses.size] = q.masses
    return a, b


def l1_distance(p: ZDist, q: ZDist) -> float:
    """Total-variation style l1 norm of p - q over the union support, in [0, 2]."""
    a, b = _aligned(p, q)
    return math.fsum(np.abs(a - b))


def kl_divergence(p: ZDist, q: ZDist) -> float:
    """D(p || q) in bits; +inf when p has mass outside q's support."""
    a, b = _aligned(p, q)
    pos = a > 0.0
    if np.any(b[pos] == 0.0):
        return math.inf
    nats = math.fsum(a[pos] * np.log(a[pos] / b[pos]))
    return nats / _LN2


def prune(d: ZDist, tau: float) -> tuple[ZDist, float]:
    """Drop low-mass tails and renormalize.

    From each end, the longest run whose cumulative mass is <= tau is removed.
    Returns the pruned distribution together with the total mass removed.
    """
    if not 0.0 <= tau < 0.5:
        raise ValueError(f"tau must lie in [0, 0.5), got {tau!r}")
    m = d.masses
    if tau == 0.0:
        return d, 0.0
    csum = np.cumsum(m)
    lo = int(np.searchsorted(csum, tau, side="right"))
    rsum = np.cumsum(m[::-1])
    hi = m.size - int(np.searchsorted(rsum, tau, side="right"))
    if lo >= hi:  # degenerate request: keep the single heaviest entry
        keep = int(np.argmax(m))
        lo, hi = keep, keep + 1
    removed = math.fsum(m[:lo]) + math.fsum(m[hi:])
    return ZDist.from_weights(d.offset + lo, m[lo:hi].copy()), removed
