"""Batch command-line front end.

One subcommand per experiment: ``construct`` builds and exports a measurement
matrix, ``trace`` tabulates kept-row counts across sizes, ``nested`` compares
kept sets across source parameters, ``epi-curve`` samples the entropy-gap
bound, ``noise-sim`` runs the Gaussian-noise robustness sweep, ``roundtrip``
measures noiseless recovery, and ``rep-check`` evaluates the dropped-entropy
budget of a selection.

Every command is deterministic given its flags (seed included): artifacts are
written atomically with '\\n' line endings and '.' decimals, and each embeds
(or carries in a .meta.json sidecar) the fully resolved configuration.

Exit codes: 0 success, 2 usage error, 3 resource budget exceeded, 4 numeric
or evidence failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass

import numpy as np

from .codec import (DecodeFailure, Measurement, decode_sc_batch, rep_check,
                    snr_sim)
from .construct import (BudgetError, InconsistentEvidenceError,
                        compute_entropies_exact, estimate_entropies_mc,
                        export_matrix, nested_report, absorption_trace,
                        select_rows)
from .epi import epi_curve
from .transform import TransformPlan, apply_fast
from .zdist import ZDist


class UsageError(ValueError):
    """Bad flag values or inconsistent options."""


@dataclass
class ExperimentConfig:
    """Resolved description of one run; serializable and round-trip stable."""

    command: str
    source: str | None = None
    n: int | None = None
    epsilon: float | None = None
    method: str = "exact"
    samples: int = 10_000
    seed: int = 0
    prune_tau: float = 1e-12
    merge_tol: float = 1e-9
    max_contexts: int = 10 ** 6
    output_path: str | None = None
    matrix_path: str | None = None
    n_list: list[int] | None = None
    p_list: list[float] | None = None
    c_max: float | None = None
    steps: int | None = None
    tol: float | None = None
    trials: int | None = None
    snr_grid_db: list[float] | None = None
    sigma: float | None = None
    kept_all: bool = False
    trace_path: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(**d)


def parse_source(text: str) -> ZDist:
    """Accept 'bernoulli:p', 'delta:k', inline JSON, or '@file.json'."""
    if text.startswith("bernoulli:"):
        return ZDist.bernoulli(float(text.split(":", 1)[1]))
    if text.startswith("delta:"):
        return ZDist.delta(int(text.split(":", 1)[1]))
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return ZDist.from_json_dict(json.load(fh))
    if text.lstrip().startswith("{"):
        return ZDist.from_json_dict(json.loads(text))
    raise UsageError(f"cannot parse source {text!r}")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, header: str, rows, cfg: ExperimentConfig):
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")
    _atomic_write(path + ".meta.json",
                  json.dumps({"config": cfg.to_dict()}, indent=2,
                             sort_keys=True) + "\n")


def _write_json(path: str, payload: dict):
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _selection_for(cfg: ExperimentConfig, p_X: ZDist, n: int):
    if cfg.method == "exact":
        res = compute_entropies_exact(p_X, n, prune_tau=cfg.prune_tau,
                                      merge_tol=cfg.merge_tol,
                                      max_contexts=cfg.max_contexts)
        sel = select_rows(res.entropies, cfg.epsilon, method="exact")
        return sel, res.pruned_mass_bound
    est = estimate_entropies_mc(p_X, n, cfg.samples, cfg.seed)
    sel = select_rows(est.entropies, cfg.epsilon, method="monte-carlo",
                      mc_stderr=est.stderr)
    return sel, 0.0


def cmd_construct(cfg: ExperimentConfig) -> int:
    p_X = parse_source(cfg.source)
    sel, pruned = _selection_for(cfg, p_X, cfg.n)
    matrix_path = cfg.matrix_path or cfg.output_path + ".matrix.csv"
    tmp = matrix_path + ".partial"
    export_matrix(sel, TransformPlan(cfg.n, "J"), tmp)
    os.replace(tmp, matrix_path)
    _write_json(cfg.output_path, {
        "n": sel.n,
        "epsilon": sel.epsilon,
        "method": sel.method,
        "entropies": [float(h) for h in sel.entropies],
        "kept": [int(i) for i in sel.kept],
        "m_N": sel.m_N,
        "pruned_mass_bound": pruned,
        "matrix_path": matrix_path,
        "config": cfg.to_dict(),
    })
    return 0


def cmd_trace(cfg: ExperimentConfig) -> int:
    p_X = parse_source(cfg.source)
    points = absorption_trace(p_X, cfg.epsilon, cfg.n_list, method=cfg.method,
                              samples=cfg.samples, seed=cfg.seed,
                              prune_tau=cfg.prune_tau, merge_tol=cfg.merge_tol,
                              max_contexts=cfg.max_contexts)
    _write_csv(cfg.output_path, "n,N,m_N,rate",
               [(p.n, p.N, p.m_N, p.rate) for p in points], cfg)
    return 0


def cmd_nested(cfg: ExperimentConfig) -> int:
    rep = nested_report(cfg.p_list, cfg.n, cfg.epsilon, method=cfg.method,
                        samples=cfg.samples, seed=cfg.seed,
                        prune_tau=cfg.prune_tau, merge_tol=cfg.merge_tol,
                        max_contexts=cfg.max_contexts)
    rows = []
    for i in range(len(rep.p_list) - 1):
        rows.append((rep.p_list[i], rep.p_list[i + 1],
                     float(rep.inclusion[i, i + 1]),
                     float(rep.jaccard[i, i + 1])))
    _write_csv(cfg.output_path, "p_small,p_large,inclusion,jaccard", rows, cfg)
    return 0


def cmd_epi_curve(cfg: ExperimentConfig) -> int:
    points = epi_curve(cfg.c_max, cfg.steps, cfg.tol)
    _write_csv(cfg.output_path, "c,g,argmin_y,branch",
               [(p.c, p.g_of_c, p.argmin_y, p.active_branch) for p in points],
               cfg)
    return 0


def cmd_noise_sim(cfg: ExperimentConfig) -> int:
    p_X = parse_source(cfg.source)
    trace_fh = open(cfg.trace_path, "w", newline="\n") if cfg.trace_path else None
    try:
        points = snr_sim(p_X, cfg.n, cfg.epsilon, cfg.snr_grid_db, cfg.trials,
                         cfg.seed, construction_samples=cfg.samples,
                         trace=trace_fh)
    finally:
        if trace_fh:
            trace_fh.close()
    _write_csv(cfg.output_path, "snr_in_db,mse_out,snr_out_db,trials,decode_failures",
               [(p.snr_in_db, p.mse_out, p.snr_out_db, p.trials,
                 p.decode_failures) for p in points], cfg)
    return 0


def cmd_roundtrip(cfg: ExperimentConfig) -> int:
    p_X = parse_source(cfg.source)
    size = 1 << cfg.n
    plan = TransformPlan(cfg.n, "J")
    if cfg.kept_all:
        kept = np.arange(1, size + 1, dtype=np.int64)
        m_n = size
    else:
        sel, _ = _selection_for(cfg, p_X, cfg.n)
        kept = sel.kept
        m_n = sel.m_N
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    x = p_X.sample(rng, size=(cfg.trials, size)).astype(np.int64)
    values = apply_fast(plan, x)[:, kept - 1].astype(np.float64)
    sigma = cfg.sigma or 0.0
    if sigma > 0.0:
        noise_rng = np.random.default_rng(
            np.random.SeedSequence(entropy=cfg.seed, spawn_key=(1,)))
        values = values + noise_rng.normal(0.0, sigma, values.shape)
    xhat = decode_sc_batch(values, kept, sigma, p_X, plan)
    exact = int(np.all(xhat == x, axis=1).sum())
    _write_json(cfg.output_path, {
        "trials": cfg.trials,
        "exact_recoveries": exact,
        "recovery_rate": exact / cfg.trials,
        "kept_rows": m_n,
        "sigma": sigma,
        "config": cfg.to_dict(),
    })
    return 0


def cmd_rep_check(cfg: ExperimentConfig) -> int:
    p_X = parse_source(cfg.source)
    sel, _ = _selection_for(cfg, p_X, cfg.n)
    value = rep_check(p_X, cfg.n, sel)
    _write_json(cfg.output_path, {
        "value": value,
        "epsilon": sel.epsilon,
        "n": sel.n,
        "m_N": sel.m_N,
        "holds": value <= sel.epsilon,
        "config": cfg.to_dict(),
    })
    return 0


_HANDLERS = {
    "construct": cmd_construct,
    "trace": cmd_trace,
    "nested": cmd_nested,
    "epi-curve": cmd_epi_curve,
    "noise-sim": cmd_noise_sim,
    "roundtrip": cmd_roundtrip,
    "rep-check": cmd_rep_check,
}

_NEEDS_SOURCE = {"construct", "trace", "noise-sim", "roundtrip", "rep-check"}
_NEEDS_N = {"construct", "nested", "noise-sim", "roundtrip", "rep-check"}
_NEEDS_EPSILON = {"construct", "trace", "nested", "noise-sim", "rep-check"}


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hadasense",
        description="Entropy-preserving partial Hadamard measurement toolbox")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _HANDLERS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file; explicit flags win")
        p.add_argument("--source", help="'bernoulli:p', 'delta:k', JSON, or @file")
        p.add_argument("--n", type=int, help="transform depth, N = 2^n")
        p.add_argument("--epsilon", type=float, help="entropy threshold (bits)")
        p.add_argument("--method", choices=["exact", "mc"])
        p.add_argument("--samples", type=int, help="Monte-Carlo sample count")
        p.add_argument("--seed", type=int)
        p.add_argument("--prune-tau", type=float)
        p.add_argument("--merge-tol", type=float)
        p.add_argument("--max-contexts", type=int)
        p.add_argument("--out", help="output artifact path")
        if name == "construct":
            p.add_argument("--matrix-out", help="matrix CSV path "
                           "(default: <out>.matrix.csv)")
        if name == "trace":
            p.add_argument("--n-list", help="comma list of depths, e.g. 6,7,8,9")
        if name == "nested":
            p.add_argument("--p-list", help="ascending comma list of p values")
        if name == "epi-curve":
            p.add_argument("--c-max", type=float)
            p.add_argument("--steps", type=int)
            p.add_argument("--tol", type=float)
        if name == "noise-sim":
            p.add_argument("--snr-grid", help="comma list of input SNRs in dB")
            p.add_argument("--trials", type=int)
            p.add_argument("--trace", help="per-trial JSONL log path")
        if name == "roundtrip":
            p.add_argument("--trials", type=int)
            p.add_argument("--kept-all", action="store_true", default=None)
            p.add_argument("--sigma", type=float)
    return parser


_DEFAULTS = {
    "method": "exact", "samples": 10_000, "seed": 0, "prune_tau": 1e-12,
    "merge_tol": 1e-9, "max_contexts": 10 ** 6, "steps": 201, "tol": 1e-10,
    "trials": 100, "sigma": 0.0, "kept_all": False,
}


def _resolve(args: argparse.Namespace) -> ExperimentConfig:
    base: dict = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            base = json.load(fh)
        base.pop("command", None)

    def pick(flag, key, cast=None):
        v = getattr(args, flag, None)
        if v is None:
            v = base.get(key)
        if v is None:
            v = _DEFAULTS.get(key)
        if v is not None and cast is not None and isinstance(v, str):
            v = cast(v)
        return v

    cfg = ExperimentConfig(
        command=args.command,
        source=pick("source", "source"),
        n=pick("n", "n"),
        epsilon=pick("epsilon", "epsilon"),
        method=pick("method", "method"),
        samples=pick("samples", "samples"),
        seed=pick("seed", "seed"),
        prune_tau=pick("prune_tau", "prune_tau"),
        merge_tol=pick("merge_tol", "merge_tol"),
        max_contexts=pick("max_contexts", "max_contexts"),
        output_path=pick("out", "output_path"),
        matrix_path=pick("matrix_out", "matrix_path"),
        n_list=pick("n_list", "n_list", _int_list),
        p_list=pick("p_list", "p_list", _float_list),
        c_max=pick("c_max", "c_max"),
        steps=pick("steps", "steps"),
        tol=pick("tol", "tol"),
        trials=pick("trials", "trials"),
        snr_grid_db=pick("snr_grid", "snr_grid_db", _float_list),
        sigma=pick("sigma", "sigma"),
        kept_all=bool(pick("kept_all", "kept_all")),
        trace_path=pick("trace", "trace_path"),
    )
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig):
    cmd = cfg.command
    if cfg.output_path is None:
        raise UsageError("--out is required")
    if cmd in _NEEDS_SOURCE and not cfg.source:
        raise UsageError("--source is required")
    if cmd in _NEEDS_N:
        if cfg.n is None or cfg.n < 0:
            raise UsageError("--n is required and must be nonnegative")
    if cmd in _NEEDS_EPSILON:
        if cfg.epsilon is None or not math.isfinite(cfg.epsilon) \
                or cfg.epsilon <= 0.0:
            raise UsageError("--epsilon must be a positive number")
    if cmd == "trace" and not cfg.n_list:
        raise UsageError("--n-list is required")
    if cmd == "nested" and not cfg.p_list:
        raise UsageError("--p-list is required")
    if cmd == "epi-curve":
        if cfg.c_max is None or cfg.c_max <= 0.0:
            raise UsageError("--c-max must be positive")
        if cfg.steps < 2:
            raise UsageError("--steps must be at least 2")
    if cmd == "noise-sim":
        if not cfg.snr_grid_db:
            raise UsageError("--snr-grid is required")
        if cfg.trials < 1:
            raise UsageError("--trials must be at least 1")
    if cmd == "roundtrip":
        if cfg.trials < 1:
            raise UsageError("--trials must be at least 1")
        if not cfg.kept_all and cfg.epsilon is None:
            raise UsageError("roundtrip needs --kept-all or --epsilon")
    if cfg.samples < 1:
        raise UsageError("--samples must be at least 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
        return _HANDLERS[args.command](cfg)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except BudgetError as e:
        print(f"resource budget exceeded: {e}", file=sys.stderr)
        return 3
    except (InconsistentEvidenceError, DecodeFailure, FloatingPointError,
            ValueError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 4
    except OSError as e:
        print(f"io failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
