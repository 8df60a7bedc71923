"""Encoding through kept Hadamard rows and sequential MAP decoding.

The encoder applies the signed Hadamard transform and keeps the selected
components; optionally Gaussian noise is added to the kept values.  The
primary decoder is successive cancellation: it walks the synthesized outputs
in order, forms the exact conditional pmf of each output given the decisions
taken so far, multiplies in the measurement likelihood of that output (a
Gaussian density at the measured value for kept rows, a constant for dropped
ones), and commits to the argmax.  Like its channel-coding counterpart it
ignores measurements of not-yet-decoded outputs, so it is suboptimal; an
exhaustive enumeration decoder bounds that suboptimality at small sizes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .construct import BudgetError, RowSelection
from .sc import leaf_message, run_sc
from .transform import TransformPlan, apply_fast, hadamard_row
from .zdist import ZDist

__all__ = [
    "Measurement", "SnrPoint", "DecodeFailure", "encode", "add_noise",
    "decode_sc", "decode_sc_batch", "decode_ml_exhaustive", "map_logscore",
    "snr_sim", "rep_check",
]

_NOISELESS_SNAP = 1e-6  # noiseless measured values must sit on integers


class DecodeFailure(RuntimeError):
    """Measurement evidence has zero probability under the source model."""


@dataclass(frozen=True)
class Measurement:
    """Measured transform components: 1-based row indices and their values."""

    kept: np.ndarray
    values: np.ndarray
    sigma: float = 0.0

    def __post_init__(self):
        kept = np.asarray(self.kept, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        if kept.shape != values.shape or kept.ndim != 1:
            raise ValueError("kept and values must be 1-D and the same length")
        if kept.size and (np.any(kept < 1) or np.any(np.diff(kept) <= 0)):
            raise ValueError("kept must be ascending 1-based indices")
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")
        object.__setattr__(self, "kept", kept)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SnrPoint:
    """One grid point of the noise-robustness experiment.

    ``snr_in_db`` and ``snr_out_db`` use the standard convention (signal
    power over noise power, resp. signal power over reconstruction MSE);
    ``noise_to_signal_in`` is the reciprocal input ratio and ``mse_out`` the
    raw per-component reconstruction error, for the inverted bookkeeping
    some treatments use.
    """

    snr_in_db: float
    mse_out: float
    snr_out_db: float
    trials: int
    decode_failures: int = 0
    sigma: float = 0.0
    noise_to_signal_in: float = 0.0


def encode(x, selection: RowSelection) -> Measurement:
    """Noiseless measurement: kept components of the Hadamard transform."""
    x = np.asarray(x)
    if x.shape != (selection.N,):
        raise ValueError(f"expected an input vector of length {selection.N}")
    y = apply_fast(TransformPlan(selection.n, "J"), x)
    return Measurement(kept=selection.kept.copy(),
                       values=y[selection.kept - 1].astype(np.float64),
                       sigma=0.0)


def add_noise(m: Measurement, sigma: float, seed: int) -> Measurement:
    """Add i.i.d. zero-mean Gaussian noise to the measured values."""
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0.0:
        return replace(m, sigma=0.0)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return replace(m, values=m.values + rng.normal(0.0, sigma, m.values.shape),
                   sigma=sigma)


class _MapPolicy:
    """Per-output decision rule: argmax of conditional pmf times likelihood."""

    def __init__(self, kept, values, sigma, batch):
        self.slot = {int(i) - 1: k for k, i in enumerate(kept)}
        self.values = values            # (batch, m)
        self.sigma = float(sigma)
        self.batch = batch

    def __call__(self, i, off, pr):
        slot = self.slot.get(i)
        if slot is None:
            best = off + np.argmax(pr, axis=1)
            if pr.shape[0] == 1:
                return np.full(self.batch, best[0], dtype=np.int64)
            return best
        v = self.values[:, slot]
        if self.sigma == 0.0:
            target = np.rint(v).astype(np.int64)
            if np.any(np.abs(v - target) > _NOISELESS_SNAP):
                raise DecodeFailure("noiseless measurement is not integral")
            idx = target - off
            rows = np.zeros(self.batch, dtype=np.intp) if pr.shape[0] == 1 \
                else np.arange(self.batch)
            ok = (idx >= 0) & (idx < pr.shape[1])
            p = np.where(ok, pr[rows, np.clip(idx, 0, pr.shape[1] - 1)], 0.0)
            if np.any(p <= 0.0):
                raise DecodeFailure(
                    f"measured value for output {i + 1} has zero probability")
            return target
        grid = off + np.arange(pr.shape[1])
        with np.errstate(divide="ignore"):
            post = np.log(pr) - (grid[None, :] - v[:, None]) ** 2 \
                / (2.0 * self.sigma * self.sigma)
        return off + np.argmax(post, axis=1)


def decode_sc_batch(values, kept, sigma, p_X: ZDist,
                    plan: TransformPlan) -> np.ndarray:
    """Successive-cancellation decoding of many measurement vectors at once.

    ``values`` has one row per instance, columns matching the 1-based row
    indices in ``kept``.  Rows are decoded independently and in lockstep, so
    the result matches row-by-row calls to decode_sc.
    """
    values = np.asarray(values, dtype=np.float64)
    kept = np.asarray(kept, dtype=np.int64)
    batch = values.shape[0]
    policy = _MapPolicy(kept, values, sigma, batch)
    return run_sc(plan.kind, plan.n, leaf_message(p_X.offset, p_X.masses),
                  policy, batch)


def decode_sc(m: Measurement, p_X: ZDist, plan: TransformPlan) -> np.ndarray:
    """Successive-cancellation MAP estimate of the source vector.

    Decisions always land on the conditional support, so the returned vector
    has every entry in the support of p_X and, when sigma is zero, reproduces
    the measured values exactly.  Raises DecodeFailure on noiseless evidence
    of zero probability.
    """
    if plan.kind != "J":
        raise ValueError("measurements are rows of the kind-J matrix")
    if m.kept.size and m.kept[-1] > plan.N:
        raise ValueError("measurement indices exceed the plan size")
    return decode_sc_batch(m.values.reshape(1, -1), m.kept, m.sigma, p_X,
                           plan)[0]


def decode_ml_exhaustive(m: Measurement, p_X: ZDist, plan: TransformPlan,
                         max_candidates: int = 1 << 20) -> np.ndarray:
    """Exact MAP decoding by scoring every source vector in the support.

    Feasible only while |support|^N stays within ``max_candidates``
    (BudgetError otherwise).  Ties break to the lexicographically smallest
    candidate.
    """
    if plan.kind != "J":
        raise ValueError("measurements are rows of the kind-J matrix")
    size = plan.N
    keep = p_X.masses > 0.0
    vals = p_X.support[keep]
    logp = np.log(p_X.masses[keep])
    q = vals.size
    total = q ** size
    if total > max_candidates:
        raise BudgetError(f"{q}^{size} candidates exceed the cap "
                          f"of {max_candidates}")
    rows = np.array([hadamard_row(int(i), plan.n) for i in m.kept],
                    dtype=np.float64).reshape(m.kept.size, size)
    best_score = -math.inf
    best_x = None
    powers = q ** np.arange(size - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, 1 << 16):
        codes = np.arange(start, min(start + (1 << 16), total), dtype=np.int64)
        digits = (codes[:, None] // powers[None, :]) % q
        cand = vals[digits]
        score = logp[digits].sum(axis=1)
        if m.kept.size:
            meas = cand @ rows.T
            if m.sigma == 0.0:
                bad = np.any(np.abs(meas - m.values[None, :]) > 1e-9, axis=1)
                score = np.where(bad, -np.inf, score)
            else:
                score -= ((meas - m.values[None, :]) ** 2).sum(axis=1) \
                    / (2.0 * m.sigma * m.sigma)
        k = int(np.argmax(score))
        if score[k] > best_score:
            best_score = float(score[k])
            best_x = cand[k].astype(np.int64)
    if best_x is None or best_score == -math.inf:
        raise DecodeFailure("no candidate is consistent with the measurement")
    return best_x


def map_logscore(x, m: Measurement, p_X: ZDist, plan: TransformPlan) -> float:
    """Natural-log posterior score (prior times likelihood, up to a constant)."""
    x = np.asarray(x, dtype=np.int64)
    prior = np.array([p_X.pm(int(v)) for v in x])
    if np.any(prior <= 0.0):
        return -math.inf
    score = float(np.log(prior).sum())
    if m.kept.size == 0:
        return score
    y = apply_fast(TransformPlan(plan.n, "J"), x)
    meas = y[m.kept - 1].astype(np.float64)
    if m.sigma == 0.0:
        if np.any(np.abs(meas - m.values) > 1e-9):
            return -math.inf
        return score
    return score - float(((meas - m.values) ** 2).sum()) \
        / (2.0 * m.sigma * m.sigma)


def rep_check(p_X: ZDist, n: int, selection: RowSelection) -> float:
    """Per-symbol conditional entropy left in the dropped rows.

    Returns the mean of the dropped entropies, which bounds the information
    lost by not measuring them; by the selection rule it never exceeds
    epsilon * (N - m_N) / N.
    """
    if selection.n != n:
        raise ValueError(f"selection depth {selection.n} does not match n={n}")
    size = selection.N
    mask = np.ones(size, dtype=bool)
    mask[selection.kept - 1] = False
    value = math.fsum(selection.entropies[mask]) / size
    cap = selection.epsilon * (size - selection.m_N) / size
    if value > cap + 1e-12:
        raise ValueError(f"dropped-entropy mean {value} exceeds its cap {cap}; "
                         "selection is inconsistent")
    return value


def snr_sim(p_X: ZDist, n: int, epsilon: float, snr_grid_db, trials: int,
            seed: int, selection: RowSelection | None = None,
            construction_samples: int = 10_000, calibration_trials: int = 4096,
            decode_chunk: int = 256, trace=None) -> list[SnrPoint]:
    """Noise-robustness sweep: encode, add Gaussian noise, decode, average.

    For each grid point the noise level is set from the standard input SNR
    definition, sigma^2 = (mean kept-component power) / snr, with the power
    estimated once from ``calibration_trials`` fresh source draws so that
    changing ``trials`` never changes sigma.  Per-trial inputs and noise come
    from substreams derived from ``seed`` keyed by trial (and grid) index, so
    growing the trial count keeps the common prefix of records identical.
    ``trace``, if given, is a file-like object receiving one JSON line per
    (grid point, trial).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    plan = TransformPlan(n, "J")
    if selection is None:
        from .construct import estimate_entropies_mc, select_rows
        sub = np.random.SeedSequence(entropy=seed, spawn_key=(0,))
        est = estimate_entropies_mc(p_X, n, construction_samples,
                                    int(sub.generate_state(1)[0]))
        selection = select_rows(est.entropies, epsilon, method="monte-carlo",
                                mc_stderr=est.stderr)
    if selection.m_N == 0:
        raise ValueError("selection keeps no rows; SNR is undefined")

    size = plan.N
    x = np.empty((trials, size), dtype=np.int64)
    for t in range(trials):
        g = np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                         spawn_key=(1, t)))
        x[t] = p_X.sample(g, size=size)
    y_kept = apply_fast(plan, x)[:, selection.kept - 1].astype(np.float64)

    calib = np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                         spawn_key=(3,)))
    xc = p_X.sample(calib, size=(calibration_trials, size))
    yc = apply_fast(plan, xc)[:, selection.kept - 1]
    power_y = float(np.mean(yc.astype(np.float64) ** 2))
    power_x = float(np.mean(xc.astype(np.float64) ** 2))

    points = []
    for gi, db in enumerate(snr_grid_db):
        snr_lin = 10.0 ** (float(db) / 10.0)
        sigma = math.sqrt(power_y / snr_lin)
        noisy = np.empty_like(y_kept)
        for t in range(trials):
            g = np.random.default_rng(np.random.SeedSequence(
                entropy=seed, spawn_key=(2, t, gi)))
            noisy[t] = y_kept[t] + g.normal(0.0, sigma, selection.m_N)
        failures = 0
        sq_sum = 0.0
        decoded = 0
        for start in range(0, trials, decode_chunk):
            block = slice(start, min(start + decode_chunk, trials))
            try:
                xhat = decode_sc_batch(noisy[block], selection.kept, sigma,
                                       p_X, plan)
            except DecodeFailure:
                xhat = np.empty((block.stop - block.start, size), dtype=np.int64)
                for t in range(block.start, block.stop):
                    try:
                        xhat[t - block.start] = decode_sc_batch(
                            noisy[t:t + 1], selection.kept, sigma, p_X, plan)[0]
                    except DecodeFailure:
                        failures += 1
                        xhat[t - block.start] = x[t]  # excluded from MSE below
                        noisy[t, :] = np.nan
            err = (xhat - x[block]) ** 2
            good = ~np.isnan(noisy[block, 0]) if selection.m_N else \
                np.ones(err.shape[0], dtype=bool)
            sq_sum += float(err[good].sum())
            decoded += int(good.sum())
            if trace is not None:
                for t in range(block.start, block.stop):
                    rec = {"snr_in_db": float(db), "trial": t,
                           "se": float(err[t - block.start].mean()),
                           "failed": bool(not good[t - block.start])}
                    trace.write(json.dumps(rec) + "\n")
        mse = sq_sum / (decoded * size) if decoded else math.inf
        snr_out = 10.0 * math.log10(power_x / mse) if 0.0 < mse < math.inf \
            else math.inf
        points.append(SnrPoint(snr_in_db=float(db), mse_out=mse,
                               snr_out_db=snr_out, trials=trials,
                               decode_failures=failures, sigma=sigma,
                               noise_to_signal_in=1.0 / snr_lin))
    return points
