"""Monte Carlo harness for checking consistency at desk scale.

A :class:`Scenario` fixes the true mixture, the sample sizes, the number of
replicates and the estimators.  Every (estimator, n, replicate) cell draws
its own seeds from a stable hash, so adding an estimator never shifts the
random streams of the others.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .baselines import EMConfig, em_fit, l2_fit
from .config import check_keys, format_truth, parse_list, parse_truth, read_config
from .errors import DomainError
from .gmx import MixtureDensity, cross_gram, gram_matrix, hausdorff
from .kde import KernelEstimate
from .optim import OptimizerConfig
from .plk import Objective, maximize
from .simplex import WeightBoundViolation

ESTIMATORS = ("plk", "em", "l2")
CSV_HEADER = (
    "scenario", "estimator", "n", "replicate", "hausdorff", "weight_err",
    "density_l2", "objective", "failed", "wall_ms",
)


@dataclass(frozen=True)
class Scenario:
    truth: MixtureDensity
    n_grid: tuple[int, ...]
    replicates: int
    estimators: tuple[str, ...] = ("plk",)
    seed: int = 0
    bandwidth: object = "auto"
    name: str = "scenario"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        w = self.truth.weights.as_array()
        if np.any(w <= 0.0):
            raise DomainError("true weights must be strictly positive")
        comps = list(self.truth.params)
        if len(set(comps)) != len(comps):
            raise DomainError("true components must be pairwise distinct")
        if not self.n_grid or any(int(n) < 2 for n in self.n_grid):
            raise DomainError("sample sizes must be at least 2")
        if self.replicates < 1:
            raise DomainError("replicates must be positive")
        bad = set(self.estimators) - set(ESTIMATORS)
        if bad or not self.estimators:
            raise DomainError(f"unknown estimator(s): {sorted(bad)}")
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "estimators", tuple(self.estimators))

    @property
    def k(self) -> int:
        return len(self.truth.params)


def default_scenario(**overrides) -> Scenario:
    """0.3 N(0, 1) + 0.7 N(4, 2^2), n in (500, 2000, 8000), 20 replicates."""
    base = Scenario(
        truth=MixtureDensity.from_triples([(0.3, 0.0, 1.0), (0.7, 4.0, 2.0)]),
        n_grid=(500, 2000, 8000),
        replicates=20,
        estimators=("plk",),
        seed=20240611,
        name="default",
    )
    return replace(base, **overrides) if overrides else base


SCENARIO_KEYS = {
    "name", "truth", "n_grid", "replicates", "estimators", "seed", "bandwidth",
    "starts", "xtol", "max_evals", "em_warm_start",
}


def scenario_from_config(cfg: dict[str, str], source: str = "scenario") -> Scenario:
    check_keys(cfg, SCENARIO_KEYS, source)
    base = default_scenario()
    opt = base.optimizer
    try:
        opt = OptimizerConfig(
            starts=int(cfg.get("starts", opt.starts)),
            xtol=float(cfg.get("xtol", opt.xtol)),
            max_evals=int(cfg["max_evals"]) if "max_evals" in cfg else opt.max_evals,
            em_warm_start=cfg.get("em_warm_start", "false").lower() in ("1", "true", "yes"),
        )
        bw = cfg.get("bandwidth", "auto")
        return Scenario(
            truth=parse_truth(cfg["truth"]) if "truth" in cfg else base.truth,
            n_grid=tuple(parse_list(cfg["n_grid"], int)) if "n_grid" in cfg else base.n_grid,
            replicates=int(cfg.get("replicates", base.replicates)),
            estimators=tuple(parse_list(cfg["estimators"])) if "estimators" in cfg else base.estimators,
            seed=int(cfg.get("seed", base.seed)),
            bandwidth=bw if bw == "auto" else float(bw),
            name=cfg.get("name", base.name),
            optimizer=opt,
        )
    except (ValueError, KeyError) as exc:
        raise DomainError(f"{source}: {exc}") from None


def load_scenario(path) -> Scenario:
    return scenario_from_config(read_config(path), str(path))


def scenario_to_text(s: Scenario) -> str:
    lines = [
        f"name = {s.name}",
        f"truth = {format_truth(s.truth)}",
        f"n_grid = {', '.join(map(str, s.n_grid))}",
        f"replicates = {s.replicates}",
        f"estimators = {', '.join(s.estimators)}",
        f"seed = {s.seed}",
        f"bandwidth = {s.bandwidth}",
        f"starts = {s.optimizer.starts}",
        f"xtol = {s.optimizer.xtol!r}",
    ]
    if s.optimizer.max_evals:
        lines.append(f"max_evals = {s.optimizer.max_evals}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ReplicateRecord:
    scenario: str
    estimator: str
    n: int
    replicate: int
    hausdorff: float
    weight_err: float
    density_l2: float
    objective: float
    failed: bool
    wall_ms: float

    def row(self) -> list:
        return [
            self.scenario, self.estimator, self.n, self.replicate,
            repr(self.hausdorff), repr(self.weight_err), repr(self.density_l2),
            repr(self.objective), int(self.failed), f"{self.wall_ms:.3f}",
        ]


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary parts (independent of PYTHONHASHSEED)."""
    text = "\x1f".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


def sample_mixture(truth: MixtureDensity, n: int, seed: int) -> np.ndarray:
    """Draw a component label from the weights, then a Gaussian draw from it."""
    rng = np.random.default_rng(seed)
    w = truth.weights.as_array()
    labels = rng.choice(w.size, size=int(n), p=w)
    z = rng.standard_normal(int(n))
    return truth.params.mus[labels] + truth.params.sigmas[labels] * z


def density_l2_error(est: MixtureDensity, truth: MixtureDensity) -> float:
    """Exact L2 distance between two Gaussian mixtures."""
    a, b = est.weights.as_array(), truth.weights.as_array()
    sq = (
        a @ gram_matrix(est.params) @ a
        - 2.0 * a @ cross_gram(est.params, truth.params) @ b
        + b @ gram_matrix(truth.params) @ b
    )
    return math.sqrt(max(0.0, float(sq)))


def match_components(est, truth) -> np.ndarray:
    """Assignment of estimated to true components minimising total (mu, sigma)
    distance.  Returns ``perm`` with est[i] matched to truth[perm[i]]."""
    a = np.array([(c.mu, c.sigma) for c in est])
    b = np.array([(c.mu, c.sigma) for c in truth])
    cost = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))
    rows, cols = linear_sum_assignment(cost)
    perm = np.full(len(a), -1)
    perm[rows] = cols
    return perm


def weight_error(est: MixtureDensity, truth: MixtureDensity) -> float:
    """Largest weight discrepancy after matching; unmatched components count
    their full weight."""
    perm = match_components(est.params, truth.params)
    wa, wb = est.weights.as_array(), truth.weights.as_array()
    errs = [abs(wa[i] - wb[j]) if j >= 0 else wa[i] for i, j in enumerate(perm)]
    unmatched = set(range(wb.size)) - set(perm[perm >= 0].tolist())
    errs.extend(wb[j] for j in unmatched)
    return float(max(errs))


def fit_estimator(estimator: str, sample, k: int, bandwidth, opt: OptimizerConfig, seed: int):
    if estimator == "em":
        return em_fit(sample, k, EMConfig(seed=seed % (2**63)))
    e = KernelEstimate(sample, bandwidth)
    cfg = replace(opt, seed=seed)
    if estimator == "plk":
        return maximize(Objective(e, k), cfg)
    if estimator == "l2":
        return l2_fit(e, k, cfg)
    raise DomainError(f"unknown estimator {estimator!r}")


def _run_cell(s: Scenario, estimator: str, n: int, rep: int) -> ReplicateRecord:
    t0 = time.perf_counter()
    try:
        sample = sample_mixture(s.truth, n, derive_seed(s.seed, "data", n, rep))
        fit = fit_estimator(
            estimator, sample, s.k, s.bandwidth, s.optimizer,
            derive_seed(s.seed, estimator, n, rep),
        )
        est = MixtureDensity(fit.theta_hat, fit.weights)
        vals = (
            hausdorff(fit.theta_hat, s.truth.params),
            weight_error(est, s.truth),
            density_l2_error(est, s.truth),
            float(fit.objective_value),
        )
        failed = not all(math.isfinite(v) for v in vals)
    except WeightBoundViolation:
        raise
    except Exception:
        vals, failed = (math.nan,) * 4, True
    wall = 1000.0 * (time.perf_counter() - t0)
    return ReplicateRecord(s.name, estimator, n, rep, *vals, failed, wall)


def run_scenario(s: Scenario, workers: int = 1) -> list[ReplicateRecord]:
    """Fit every (estimator, n, replicate) cell.

    Records are returned sorted by (estimator, n, replicate) regardless of
    ``workers``; a failing fit yields a record with ``failed=True``.
    """
    tasks = [
        (est, n, rep)
        for est in sorted(s.estimators)
        for n in sorted(s.n_grid)
        for rep in range(s.replicates)
    ]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_run_cell, s, *t) for t in tasks]
            return [f.result() for f in futures]
    return [_run_cell(s, *t) for t in tasks]


METRICS = ("hausdorff", "weight_err", "density_l2", "objective")


def _order_stats(values: Sequence[float]) -> dict:
    v = sorted(values)
    m = len(v)
    return {
        "q25": v[(m - 1) // 4],
        "median": v[(m - 1) // 2],
        "q75": v[(3 * (m - 1)) // 4],
    }


def summarize(records: Sequence[ReplicateRecord]) -> list[dict]:
    """Per (estimator, n) lower-convention quartiles of each metric.

    Failed records are excluded and counted; a cell where every fit failed
    reports ``None`` for its statistics.
    """
    if not records:
        raise DomainError("nothing to summarize")
    cells: dict[tuple[str, int], list[ReplicateRecord]] = {}
    for r in records:
        cells.setdefault((r.estimator, r.n), []).append(r)
    out = []
    for (est, n), rs in sorted(cells.items()):
        ok = [r for r in rs if not r.failed]
        row = {"estimator": est, "n": n, "count": len(rs), "failed": len(rs) - len(ok)}
        for m in METRICS:
            row[m] = _order_stats([getattr(r, m) for r in ok]) if ok else None
        out.append(row)
    return out


def records_to_csv(records: Sequence[ReplicateRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def records_from_csv(text: str) -> list[ReplicateRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise DomainError("unexpected CSV header")
    out = []
    for r in rows[1:]:
        out.append(ReplicateRecord(
            r[0], r[1], int(r[2]), int(r[3]), float(r[4]), float(r[5]),
            float(r[6]), float(r[7]), bool(int(r[8])), float(r[9]),
        ))
    return out


def summary_json(s: Scenario, records: Sequence[ReplicateRecord]) -> str:
    doc = {
        "scenario": s.name,
        "truth": format_truth(s.truth),
        "n_grid": list(s.n_grid),
        "replicates": s.replicates,
        "estimators": list(s.estimators),
        "seed": s.seed,
        "failed_total": sum(r.failed for r in records),
        "cells": summarize(records),
    }
    return json.dumps(doc, indent=2) + "\n"
