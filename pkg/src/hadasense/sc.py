"""Successive conditional inference on the Kronecker transform tree.

One batched message-passing engine serves three callers: exact conditional
pmfs of synthesized outputs given earlier outputs, Monte-Carlo estimation of
the synthesized conditional entropies, and sequential MAP decoding from
partial measurements.

The generative model is X_1..X_N i.i.d. over a finite integer support and
Y = T X for T the depth-n Kronecker transform of kind "J" or "G".  Both kinds
split recursively: with the input halved into (a_k) and (b_k), the first N/2
outputs are the half-size transform of the pairwise sums u_k = a_k + b_k and
the last N/2 outputs are the half-size transform of v_k, where v_k = b_k for
kind G and v_k = b_k - a_k for kind J.  Conditioned on everything decided
before a node starts, its input variables are independent with known pmfs, so
the engine only ever manipulates per-position (and per-batch-element) mass
vectors:

* descending into the first child convolves paired pmfs;
* once the first child's outputs are all decided, its input values u_k are
  recovered exactly by running the pair inversions upward, and the second
  child's input pmfs are the conditionals of v_k given u_k;
* when a node covers a single output, its input pmf *is* the conditional law
  of that output given all earlier decisions, and a caller-supplied policy
  decides the value.

Messages are (offset, probs) pairs with probs of shape (1, A) while a pmf is
still common to the whole batch and (S, A) once conditioning has made it
sample specific.  Probabilities stay in the linear domain; rows are
renormalized after every convolution and conditioning step.
"""

from __future__ import annotations

import numpy as np

_FFT_MIN = 32  # below this support width, sliding dot products beat FFT


class InconsistentEvidenceError(ValueError):
    """Conditioning information has zero probability under the model."""


def leaf_message(offset: int, masses: np.ndarray) -> tuple[int, np.ndarray]:
    """Shared-prior message for one input position."""
    return int(offset), np.asarray(masses, dtype=np.float64).reshape(1, -1)


def _convolve_pair(ma, mb):
    """Message for the sum of two independent message variables."""
    oa, pa = ma
    ob, pb = mb
    if pa.shape[1] > pb.shape[1]:
        pa, pb = pb, pa
    aw, bw = pa.shape[1], pb.shape[1]
    width = aw + bw - 1
    if aw <= _FFT_MIN:
        rows = max(pa.shape[0], pb.shape[0])
        out = np.zeros((rows, width))
        for j in range(aw):
            out[:, j:j + bw] += pa[:, j:j + 1] * pb
    else:
        nfft = 1 << (width - 1).bit_length()
        spec = np.fft.rfft(pa, n=nfft, axis=1) * np.fft.rfft(pb, n=nfft, axis=1)
        out = np.fft.irfft(spec, n=nfft, axis=1)[:, :width]
        # FFT roundoff leaves ~1e-16 junk where the true mass is zero; a junk
        # entry must never look decidable, so floor everything below FFT
        # resolution (rows sum to one, making the cutoff absolute).
        out[out < 1e-14] = 0.0
    out /= out.sum(axis=1, keepdims=True)
    return oa + ob, out


def _gather(probs: np.ndarray, idx: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """probs[s, idx[s, j]] with out-of-range entries masked to zero."""
    rows = np.zeros(idx.shape[0], dtype=np.intp) if probs.shape[0] == 1 \
        else np.arange(idx.shape[0])
    safe = np.clip(idx, 0, probs.shape[1] - 1)
    vals = probs[rows[:, None], safe]
    vals[~valid] = 0.0
    return vals

def _condition_pair(kind, ma, mb, u):
    """Message for v given a + b = u, where v = b (G) or v = b - a (J)."""
    oa, pa = ma
    ob, pb = mb
    aw, bw = pa.shape[1], pb.shape[1]
    u = u[:, None]
    if kind == "G":
        off_v = ob
        v = off_v + np.arange(bw)[None, :]
        idx_a = u - v - oa
        vals = _gather(pa, idx_a, (idx_a >= 0) & (idx_a < aw))
        vals = vals * pb
    else:
        off_v = ob - (oa + aw - 1)
        v = off_v + np.arange(aw + bw - 1)[None, :]
        diff = u - v
        even = (diff & 1) == 0
        idx_a = (diff >> 1) - oa
        idx_b = ((u + v) >> 1) - ob
        vals = _gather(pa, idx_a, even & (idx_a >= 0) & (idx_a < aw)) \
            * _gather(pb, idx_b, even & (idx_b >= 0) & (idx_b < bw))
    tot = vals.sum(axis=1, keepdims=True)
    if np.any(tot <= 0.0):
        raise InconsistentEvidenceError(
            "decided sum value has zero probability under the pair prior")
    vals /= tot
    return off_v, vals


def _reconstruct(kind, u, v):
    """Recover the pair (a, b) from its decided sum u and second output v."""
    if kind == "G":
        return u - v, v
    return (u - v) >> 1, (u + v) >> 1


def run_sc(kind: str, n: int, leaf, decide, batch: int) -> np.ndarray:
    """Drive one successive-cancellation sweep over all N = 2^n outputs.

    ``decide(i, offset, probs)`` is called once per output index i (0-based,
    natural order) with the exact conditional pmf of output i given all
    previously decided outputs, and returns the decided integer values as an
    array of shape (batch,).  Returns the reconstructed input vectors, shape
    (batch, N).
    """
    if kind not in ("J", "G"):
        raise ValueError(f"kind must be 'J' or 'G', got {kind!r}")

    def rec(msgs, i0):
        m = len(msgs)
        if m == 1:
            off, pr = msgs[0]
            vals = np.asarray(decide(i0, off, pr), dtype=np.int64)
            return [vals]
        half = m // 2
        cache = {}
        sums = []
        for k in range(half):
            key = (id(msgs[k]), id(msgs[k + half]))
            if key not in cache:
                cache[key] = _convolve_pair(msgs[k], msgs[k + half])
            sums.append(cache[key])
        cache = None
        u = rec(sums, i0)
        sums = None
        conds = [_condition_pair(kind, msgs[k], msgs[k + half], u[k])
                 for k in range(half)]
        v = rec(conds, i0 + half)
        out = [None] * m
        for k in range(half):
            out[k], out[k + half] = _reconstruct(kind, u[k], v[k])
        return out

    cols = rec([leaf] * (1 << n), 0)
    return np.stack(cols, axis=1)
