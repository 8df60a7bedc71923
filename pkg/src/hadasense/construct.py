"""Synthesized conditional entropies and deterministic row selection.

Sending an i.i.d. integer source through the depth-n Kronecker transform
turns the N = 2^n outputs into a chain of synthesized variables whose
conditional entropies H_i = H(Y_i | Y_1..Y_{i-1}) decide which transform rows
are worth measuring: rows with H_i above a threshold epsilon are kept, the
rest are dropped.  Two routes compute the H_i:

* exact density evolution: a synthesized variable is represented as a
  weighted family of conditional pmfs, one per realized past (`SynthSource`);
  the two child stages of the transform map this family forward exactly, so
  small depths give reference values good to arithmetic precision;
* Monte-Carlo estimation: sample source vectors, run the successive
  conditional recursion to get P(y_i | y_1..y_{i-1}) for the realized values,
  and average -log2 of those probabilities.

Both routes run on the triangular ("G") butterfly, whose conditional
entropies coincide with those of the signed Hadamard ("J") family for every
index; exported measurement rows are always J rows, since those are mutually
orthogonal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .sc import InconsistentEvidenceError, leaf_message, run_sc
from .transform import TransformPlan, apply_fast, hadamard_row
from .zdist import ZDist, convolve, entropy

__all__ = [
    "BudgetError", "SynthSource", "RowSelection", "McEntropies",
    "ExactEntropies", "AbsorptionPoint", "MartingaleReport", "NestedReport",
    "evolve_minus", "evolve_plus", "entropy_of", "compute_entropies_exact",
    "estimate_entropies_mc", "sc_conditional_pmf", "select_rows",
    "absorption_trace", "martingale_check", "nested_report", "export_matrix",
    "InconsistentEvidenceError",
]

DEFAULT_PRUNE_TAU = 1e-12
DEFAULT_MERGE_TOL = 1e-9
DEFAULT_MAX_CONTEXTS = 10 ** 6

# Coarse per-bit cap used to turn pruned probability mass into an entropy
# error indicator; contexts in any tested regime carry far fewer bits.
_BITS_CAP = 40.0


class BudgetError(RuntimeError):
    """A declared resource cap (context count, enumeration size) was hit."""


@dataclass(frozen=True)
class SynthSource:
    """Weighted family of conditional pmfs representing one synthesized variable.

    Each (weight, cond) pair is the probability of some class of realized
    pasts together with the conditional law of the variable given such a
    past.  ``dropped_mass`` accumulates the probability removed by context
    pruning anywhere upstream (doubled per stage, since each stage combines
    two independent copies).
    """

    contexts: tuple[tuple[float, ZDist], ...]
    dropped_mass: float = 0.0

    def __post_init__(self):
        if not self.contexts:
            raise ValueError("SynthSource needs at least one context")
        total = math.fsum(w for w, _ in self.contexts)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"context weights sum to {total!r}, expected 1")
        if any(w <= 0.0 for w, _ in self.contexts):
            raise ValueError("context weights must be positive")

    @classmethod
    def from_pmf(cls, p: ZDist) -> "SynthSource":
        """Single-context source: the unconditioned law of one variable."""
        return cls(((1.0, p),))


class _ContextAccumulator:
    """Merges emitted (weight, cond) pairs on the fly.

    Conds are bucketed by a rounded fingerprint of their mass vector, which
    collapses the numerically identical duplicates that dominate density
    evolution.  A final clustering pass inside each (offset, width) group
    additionally merges conds within ``merge_tol`` in l1.  With
    ``shift_merge`` enabled, conds equal up to translation share a bucket;
    translation commutes with both evolution stages and never changes any
    entropy, so this canonicalization is exact for entropy computation.
    """

    def __init__(self, merge_tol: float, shift_merge: bool, max_contexts: int | None):
        self.merge_tol = merge_tol
        self.shift_merge = shift_merge
        self.max_contexts = max_contexts
        self._buckets: dict = {}

    def add(self, w: float, cond: ZDist):
        off = 0 if self.shift_merge else cond.offset
        key = (off, cond.masses.size, np.round(cond.masses, 12).tobytes())
        slot = self._buckets.get(key)
        if slot is None:
            if self.max_contexts is not None and len(self._buckets) >= self.max_contexts:
                raise BudgetError(
                    f"context count exceeded the cap of {self.max_contexts}")
            if self.shift_merge and cond.offset != 0:
                cond = ZDist(0, cond.masses)
            self._buckets[key] = [w, cond]
        else:
            slot[0] += w

    def finalize(self, prune_tau: float, carried_drop: float) -> SynthSource:
        items = list(self._buckets.values())
        if self.merge_tol > 0.0 and len(items) > 1:
            items = self._cluster(items)
        dropped = 0.0
        if prune_tau > 0.0:
            kept = [it for it in items if it[0] >= prune_tau]
            if kept:
                dropped = math.fsum(it[0] for it in items) - \
                    math.fsum(it[0] for it in kept)
                items = kept
        total = math.fsum(it[0] for it in items)
        contexts = tuple((w / total, c) for w, c in items)
        return SynthSource(contexts, dropped_mass=min(1.0, 2.0 * carried_drop + dropped))

    def _cluster(self, items):
        groups: dict = {}
        for w, c in items:
            groups.setdefault((c.offset, c.masses.size), []).append([w, c])
        out = []
        for group in groups.values():
            if len(group) == 1:
                out.extend(group)
                continue
            group.sort(key=lambda it: it[1].masses.astype(">f8").tobytes())
            reps = [group[0]]
            for w, c in group[1:]:
                rep = reps[-1]
                if float(np.abs(c.masses - rep[1].masses).sum()) <= self.merge_tol:
                    rep[0] += w
                else:
                    reps.append([w, c])
            out.extend(reps)
        return out


def evolve_minus(s: SynthSource, prune_tau: float = 0.0,
                 merge_tol: float = DEFAULT_MERGE_TOL,
                 shift_merge: bool = False,
                 max_contexts: int | None = None) -> SynthSource:
    """Sum stage: the variable becomes the sum of two independent copies.

    Contexts pair up across the two copies (weights multiply) and the
    conditional laws convolve.
    """
    acc = _ContextAccumulator(merge_tol, shift_merge, max_contexts)
    ctx = s.contexts
    for i, (wi, ci) in enumerate(ctx):
        acc.add(wi * wi, convolve(ci, ci))
        for j in range(i + 1, len(ctx)):
            wj, cj = ctx[j]
            acc.add(2.0 * wi * wj, convolve(ci, cj))
    return acc.finalize(prune_tau, s.dropped_mass)


def evolve_plus(s: SynthSource, prune_tau: float = 0.0,
                merge_tol: float = DEFAULT_MERGE_TOL,
                shift_merge: bool = False,
                max_contexts: int | None = None) -> SynthSource:
    """Conditioning stage: the second copy given the revealed sum.

    For each ordered context pair (a, b) and each sum value with positive
    probability, one context is emitted whose weight is the joint probability
    of the pair and the sum, and whose conditional law over b is proportional
    to cond_a(sum - b) * cond_b(b).
    """
    acc = _ContextAccumulator(merge_tol, shift_merge, max_contexts)
    ctx = s.contexts
    for wi, ci in ctx:
        for wj, cj in ctx:
            w = wi * wj
            outer = np.outer(ci.masses, cj.masses)
            ai = outer.shape[0]
            flipped = outer[::-1]
            for o in range(-(ai - 1), outer.shape[1]):
                diag = np.diagonal(flipped, offset=o)
                mass = float(diag.sum())
                if mass <= 0.0:
                    continue
                b_lo = max(0, o)
                acc.add(w * mass,
                        ZDist.from_weights(cj.offset + b_lo, diag))
    return acc.finalize(prune_tau, s.dropped_mass)


def entropy_of(s: SynthSource) -> float:
    """Conditional entropy in bits: the weighted mean of context entropies."""
    return math.fsum(w * entropy(c) for w, c in s.contexts)


def _pair_sweep_entropy(s: SynthSource) -> float:
    """Weighted mean over ordered context pairs of H(conv(c_i, c_j)).

    This equals the sum-stage child's entropy directly, and by
    H(B | A + B) = H(A) + H(B) - H(A + B) per independent pair it also gives
    the conditioning-stage child's entropy as 2 H(parent) minus this value.
    Evaluating both children this way avoids materializing the final level of
    contexts, whose count is quadratic in the parent's.
    """
    ws = np.array([w for w, _ in s.contexts])
    k = ws.size
    wmax = max(c.masses.size for _, c in s.contexts)
    mat = np.zeros((k, wmax))
    for r, (_, c) in enumerate(s.contexts):
        mat[r, :c.masses.size] = c.masses
    width = 2 * wmax - 1
    nfft = 1 << (width - 1).bit_length()
    spec = np.fft.rfft(mat, n=nfft, axis=1)
    parts = []
    for i in range(k):
        block = np.fft.irfft(spec[i] * spec[i:], n=nfft, axis=1)[:, :width]
        np.clip(block, 0.0, None, out=block)
        block /= block.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = block * np.log2(block)
        ent = -np.where(block > 0.0, terms, 0.0).sum(axis=1)
        wrow = 2.0 * ws[i] * ws[i:]
        wrow[0] = ws[i] * ws[i]
        parts.append(float((wrow * ent).sum()))
    return math.fsum(parts)


@dataclass(frozen=True)
class ExactEntropies:
    """Output of exact density evolution over a depth-n transform."""

    entropies: np.ndarray            # shape (2^n,), bits, natural index order
    pruned_mass_bound: float         # max over leaves of accumulated dropped mass
    tree: list | None = None         # tree[d][k]: entropy of node k at depth d


def compute_entropies_exact(p_X: ZDist, n: int,
                            prune_tau: float = DEFAULT_PRUNE_TAU,
                            merge_tol: float = DEFAULT_MERGE_TOL,
                            max_contexts: int = DEFAULT_MAX_CONTEXTS,
                            shift_merge: bool = True,
                            collect_tree: bool = False) -> ExactEntropies:
    """All 2^n synthesized conditional entropies by exact density evolution.

    Entropy index i (1-based) is reached by reading the binary expansion of
    i - 1 most significant bit first and applying the sum stage for each 0
    and the conditioning stage for each 1.  Raises BudgetError when the
    context count along any path would exceed ``max_contexts``.
    """
    size = 1 << n
    ents = np.empty(size)
    tree = [np.empty(1 << d) for d in range(n + 1)] if collect_tree else None
    worst = [0.0]

    def walk(src: SynthSource, depth: int, idx: int):
        h = entropy_of(src)
        if tree is not None:
            tree[depth][idx] = h
        if depth == n:
            ents[idx] = h
            worst[0] = max(worst[0], src.dropped_mass)
            return
        if depth == n - 1:
            h_minus = _pair_sweep_entropy(src)
            h_plus = 2.0 * h - h_minus
            ents[2 * idx] = h_minus
            ents[2 * idx + 1] = h_plus
            if tree is not None:
                tree[n][2 * idx] = h_minus
                tree[n][2 * idx + 1] = h_plus
            worst[0] = max(worst[0], min(1.0, 2.0 * src.dropped_mass))
            return
        kw = dict(prune_tau=prune_tau, merge_tol=merge_tol,
                  shift_merge=shift_merge, max_contexts=max_contexts)
        try:
            minus = evolve_minus(src, **kw)
        except BudgetError as e:
            raise BudgetError(f"sum stage at depth {depth + 1} "
                              f"(node {2 * idx}): {e}") from None
        walk(minus, depth + 1, 2 * idx)
        del minus
        try:
            plus = evolve_plus(src, **kw)
        except BudgetError as e:
            raise BudgetError(f"conditioning stage at depth {depth + 1} "
                              f"(node {2 * idx + 1}): {e}") from None
        walk(plus, depth + 1, 2 * idx + 1)

    walk(SynthSource.from_pmf(p_X), 0, 0)
    return ExactEntropies(ents, worst[0], tree)


@dataclass(frozen=True)
class McEntropies:
    """Monte-Carlo estimates of the synthesized conditional entropies."""

    entropies: np.ndarray
    stderr: np.ndarray
    samples: int
    seed: int


def estimate_entropies_mc(p_X: ZDist, n: int, samples: int, seed: int,
                          chunk_size: int = 1024) -> McEntropies:
    """Estimate every H_i as the sample mean of -log2 P(y_i | y_1..y_{i-1}).

    Source vectors are drawn in one block from a generator seeded with
    ``seed``, so results are bit-identical for identical (seed, samples, n)
    regardless of scheduling.  The per-index standard error of the mean is
    reported alongside.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    size = 1 << n
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    x = p_X.sample(rng, size=(samples, size)).astype(np.int64)
    y = apply_fast(TransformPlan(n, "G"), x)
    leaf = leaf_message(p_X.offset, p_X.masses)

    sum_lp = np.zeros(size)
    sum_lp2 = np.zeros(size)
    for start in range(0, samples, chunk_size):
        yc = y[start:start + chunk_size]
        rows = yc.shape[0]
        logp = np.empty((rows, size))

        def decide(i, off, pr):
            vals = yc[:, i]
            idx = vals - off
            sel = np.zeros(rows, dtype=np.intp) if pr.shape[0] == 1 \
                else np.arange(rows)
            p = pr[sel, np.clip(idx, 0, pr.shape[1] - 1)]
            p[(idx < 0) | (idx >= pr.shape[1])] = 0.0
            if np.any(p <= 0.0):
                raise InconsistentEvidenceError(
                    "sampled output fell outside its conditional support")
            logp[:, i] = np.log2(p)
            return vals

        run_sc("G", n, leaf, decide, rows)
        nll = -logp
        sum_lp += nll.sum(axis=0)
        sum_lp2 += (nll * nll).sum(axis=0)

    mean = sum_lp / samples
    var = np.maximum(sum_lp2 - samples * mean * mean, 0.0) / max(samples - 1, 1)
    return McEntropies(mean, np.sqrt(var / samples), samples, seed)


def sc_conditional_pmf(plan: TransformPlan, p_X: ZDist,
                       observed_prefix, i: int) -> ZDist:
    """Exact law of output i (1-based) given outputs 1..i-1.

    ``observed_prefix`` supplies the i-1 earlier output values.  Raises
    InconsistentEvidenceError when the prefix has zero probability.
    """
    if not 1 <= i <= plan.N:
        raise ValueError(f"index {i} out of range [1, {plan.N}]")
    prefix = np.asarray(observed_prefix, dtype=np.int64)
    if prefix.size != i - 1:
        raise ValueError(f"expected {i - 1} prefix values, got {prefix.size}")

    captured: dict = {}

    class _Captured(Exception):
        pass

    def decide(j, off, pr):
        if j == i - 1:
            captured["offset"], captured["probs"] = off, pr[0].copy()
            raise _Captured
        val = int(prefix[j])
        k = val - off
        if not (0 <= k < pr.shape[1]) or pr[0, k] <= 0.0:
            raise InconsistentEvidenceError(
                f"prefix value {val} for output {j + 1} has zero probability")
        return np.array([val], dtype=np.int64)

    try:
        run_sc(plan.kind, plan.n, leaf_message(p_X.offset, p_X.masses), decide, 1)
    except _Captured:
        pass
    return ZDist.from_weights(captured["offset"], captured["probs"])


@dataclass(frozen=True)
class RowSelection:
    """Indices whose synthesized conditional entropy exceeds epsilon.

    ``kept`` holds 1-based row indices in ascending order; the selection rule
    is the strict inequality entropies[i-1] > epsilon.
    """

    n: int
    epsilon: float
    entropies: np.ndarray
    kept: np.ndarray
    method: str
    mc_stderr: np.ndarray | None = None

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if self.method not in ("exact", "monte-carlo"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.entropies.size != 1 << self.n:
            raise ValueError("entropies length must be 2^n")
        expect = np.flatnonzero(self.entropies > self.epsilon) + 1
        if not np.array_equal(np.asarray(self.kept), expect):
            raise ValueError("kept indices disagree with the threshold rule")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def m_N(self) -> int:
        return int(self.kept.size)

    @property
    def rate(self) -> float:
        return self.m_N / self.N


def select_rows(entropies, epsilon: float, method: str = "exact",
                mc_stderr=None) -> RowSelection:
    """Threshold the entropy vector; strict inequality, ascending indices."""
    ents = np.asarray(entropies, dtype=np.float64)
    n = int(ents.size).bit_length() - 1
    if 1 << n != ents.size:
        raise ValueError("entropies length must be a power of two")
    kept = np.flatnonzero(ents > epsilon).astype(np.int64) + 1
    return RowSelection(n=n, epsilon=float(epsilon), entropies=ents,
                        kept=kept, method=method,
                        mc_stderr=None if mc_stderr is None
                        else np.asarray(mc_stderr, dtype=np.float64))


def _entropies_for(p_X: ZDist, n: int, method: str, samples: int, seed: int,
                   prune_tau: float, merge_tol: float, max_contexts: int):
    """Dispatch to the exact or Monte-Carlo route; returns a RowSelection feed."""
    if method == "exact":
        res = compute_entropies_exact(p_X, n, prune_tau=prune_tau,
                                      merge_tol=merge_tol,
                                      max_contexts=max_contexts)
        return res.entropies, None, res.pruned_mass_bound
    if method in ("mc", "monte-carlo"):
        res = estimate_entropies_mc(p_X, n, samples, seed)
        return res.entropies, res.stderr, 0.0
    raise ValueError(f"unknown method {method!r}")


def _method_name(method: str) -> str:
    return "exact" if method == "exact" else "monte-carlo"


@dataclass(frozen=True)
class AbsorptionPoint:
    n: int
    N: int
    m_N: int
    rate: float


def absorption_trace(p_X: ZDist, epsilon: float, n_list, method: str = "exact",
                     samples: int = 10_000, seed: int = 0,
                     prune_tau: float = DEFAULT_PRUNE_TAU,
                     merge_tol: float = DEFAULT_MERGE_TOL,
                     max_contexts: int = DEFAULT_MAX_CONTEXTS) -> list[AbsorptionPoint]:
    """Kept-row counts across sizes: one (N, m_N, m_N / N) row per depth.

    Monte-Carlo runs at different depths use independent substreams derived
    from ``seed``, so the trace is reproducible and extending ``n_list``
    leaves earlier rows unchanged.
    """
    if not n_list:
        raise ValueError("n_list must be nonempty")
    out = []
    for n in n_list:
        sub = np.random.SeedSequence(entropy=seed, spawn_key=(int(n),))
        ents, stderr, _ = _entropies_for(
            p_X, n, method, samples, int(sub.generate_state(1)[0]),
            prune_tau, merge_tol, max_contexts)
        sel = select_rows(ents, epsilon, method=_method_name(method),
                          mc_stderr=stderr)
        out.append(AbsorptionPoint(n=n, N=sel.N, m_N=sel.m_N, rate=sel.rate))
    return out


@dataclass(frozen=True)
class MartingaleReport:
    """Tree-consistency diagnostics of the conditional entropy process."""

    max_deviation: float      # max |parent - (child0 + child1)/2| over nodes
    chain_rule_gap: float     # |sum of leaf entropies - N * H(source)|
    pruned_mass_bound: float
    holds: bool


def martingale_check(p_X: ZDist, n: int, method: str = "exact",
                     tol: float = 1e-9, samples: int = 10_000, seed: int = 0,
                     prune_tau: float = DEFAULT_PRUNE_TAU,
                     merge_tol: float = DEFAULT_MERGE_TOL,
                     max_contexts: int = DEFAULT_MAX_CONTEXTS) -> MartingaleReport:
    """Verify that each node's entropy is the mean of its two children's.

    Also reports the chain-rule identity: the 2^n leaf entropies sum to
    N times the source entropy.  ``holds`` allows ``tol`` plus a coarse
    entropy-error allowance derived from any pruned context mass.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if method == "exact":
        res = compute_entropies_exact(p_X, n, prune_tau=prune_tau,
                                      merge_tol=merge_tol,
                                      max_contexts=max_contexts,
                                      collect_tree=True)
        tree = res.tree
        pruned = res.pruned_mass_bound
    else:
        tree = []
        for depth in range(n + 1):
            if depth == 0:
                tree.append(np.array([entropy(p_X)]))
                continue
            sub = np.random.SeedSequence(entropy=seed, spawn_key=(depth,))
            est = estimate_entropies_mc(p_X, depth, samples,
                                        int(sub.generate_state(1)[0]))
            tree.append(est.entropies)
        pruned = 0.0
    dev = 0.0
    for depth in range(n):
        kids = tree[depth + 1].reshape(-1, 2).mean(axis=1)
        dev = max(dev, float(np.max(np.abs(tree[depth] - kids))))
    chain = abs(math.fsum(tree[n]) - (1 << n) * entropy(p_X))
    allowance = tol + _BITS_CAP * pruned
    return MartingaleReport(max_deviation=dev, chain_rule_gap=chain,
                            pruned_mass_bound=pruned,
                            holds=dev <= allowance and chain <= allowance * (1 << n))


@dataclass(frozen=True)
class NestedReport:
    """Containment of kept-row sets across source parameters.

    ``inclusion[i][j]`` is the fraction of rows kept at p_list[i] that are
    also kept at p_list[j] (1.0 when the former set is empty); ``jaccard``
    is the symmetric overlap.  ``adjacent_inclusion`` walks consecutive
    parameter pairs, sparser source first.
    """

    p_list: tuple[float, ...]
    selections: tuple[RowSelection, ...]
    inclusion: np.ndarray
    jaccard: np.ndarray

    @property
    def adjacent_inclusion(self) -> list[float]:
        return [float(self.inclusion[i, i + 1])
                for i in range(len(self.p_list) - 1)]


def nested_report(p_list, n: int, epsilon: float, method: str = "mc",
                  samples: int = 10_000, seed: int = 0,
                  prune_tau: float = DEFAULT_PRUNE_TAU,
                  merge_tol: float = DEFAULT_MERGE_TOL,
                  max_contexts: int = DEFAULT_MAX_CONTEXTS) -> NestedReport:
    """Compare kept-row sets across two-point sources of increasing weight."""
    ps = [float(p) for p in p_list]
    if not ps:
        raise ValueError("p_list must be nonempty")
    if any(not 0.0 < p <= 0.5 for p in ps):
        raise ValueError("each p must lie in (0, 0.5]")
    if sorted(ps) != ps:
        raise ValueError("p_list must be sorted ascending")
    sels = []
    for k, p in enumerate(ps):
        sub = np.random.SeedSequence(entropy=seed, spawn_key=(k,))
        ents, stderr, _ = _entropies_for(
            ZDist.bernoulli(p), n, method, samples, int(sub.generate_state(1)[0]),
            prune_tau, merge_tol, max_contexts)
        sels.append(select_rows(ents, epsilon, method=_method_name(method),
                                mc_stderr=stderr))
    m = len(ps)
    inclusion = np.ones((m, m))
    jaccard = np.ones((m, m))
    kept_sets = [set(int(i) for i in s.kept) for s in sels]
    for a in range(m):
        for b in range(m):
            inter = len(kept_sets[a] & kept_sets[b])
            union = len(kept_sets[a] | kept_sets[b])
            inclusion[a, b] = inter / len(kept_sets[a]) if kept_sets[a] else 1.0
            jaccard[a, b] = inter / union if union else 1.0
    return NestedReport(tuple(ps), tuple(sels), inclusion, jaccard)


def export_matrix(selection: RowSelection, plan: TransformPlan,
                  csv_path, sidecar_path=None) -> np.ndarray:
    """Materialize the kept signed Hadamard rows.

    Writes one CSV row of {-1, 1} entries per kept index, plus a JSON sidecar
    with the kept indices and their entropies.  Returns the row matrix.
    """
    if plan.kind != "J":
        raise ValueError("measurement rows are rows of the kind-J matrix")
    if plan.n != selection.n:
        raise ValueError(f"plan depth {plan.n} does not match selection "
                         f"depth {selection.n}")
    rows = np.array([hadamard_row(int(i), plan.n) for i in selection.kept],
                    dtype=np.int64).reshape(selection.m_N, plan.N)
    with open(csv_path, "w", newline="\n") as fh:
        for row in rows:
            fh.write(",".join(str(int(v)) for v in row) + "\n")
    if sidecar_path is not None:
        payload = {
            "n": selection.n,
            "epsilon": selection.epsilon,
            "method": selection.method,
            "m_N": selection.m_N,
            "kept": [int(i) for i in selection.kept],
            "entropies": [float(h) for h in selection.entropies],
        }
        with open(sidecar_path, "w", newline="\n") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return rows
