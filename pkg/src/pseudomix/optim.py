"""Multi-start Nelder-Mead shared by the pseudo-likelihood and L2 estimators.

Each component contributes ``(mu, log sigma)`` to the search vector, so the
search space is unconstrained and sigma stays positive.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import OptimizationError
from .gmx import ParamVector, WeightVector, canonicalize

# Probes outside this sigma range are scored as -inf: the Gram entries
# would over- or underflow.
SIGMA_MIN = 1e-150
SIGMA_MAX = 1e150


@dataclass
class OptimizerConfig:
    starts: int = 5
    xtol: float = 1e-6
    max_evals: Optional[int] = None  # default 20000 * k
    seed: int = 0
    em_warm_start: bool = False
    restarts: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        if not self.xtol > 0:
            raise ValueError("xtol must be positive")

    def evals_for(self, k: int) -> int:
        return int(self.max_evals) if self.max_evals else 20000 * k


@dataclass
class FitResult:
    theta_hat: ParamVector
    weights: WeightVector
    objective_value: float
    n_evaluations: int
    starts: int
    epsilon: float = 0.0
    trace: list = field(default_factory=list)
    start_objectives: list = field(default_factory=list)
    final_objectives: list = field(default_factory=list)
    estimator: str = ""

    def to_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "theta_hat": self.theta_hat.as_list(),
            "weights": list(self.weights.weights),
            "objective": self.objective_value,
            "epsilon": self.epsilon,
            "n_evaluations": self.n_evaluations,
            "starts": self.starts,
        }


@dataclass
class StartOutcome:
    x0: np.ndarray
    f0: float
    x: np.ndarray
    f: float
    nfev: int
    trace: list


def pack(mus, sigmas) -> np.ndarray:
    return np.concatenate([np.asarray(mus, float), np.log(np.asarray(sigmas, float))])


def unpack(x) -> tuple[np.ndarray, np.ndarray]:
    """Split a search vector into (mus, sigmas) sorted in natural order."""
    k = len(x) // 2
    mus = np.asarray(x[:k], dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        sig = np.exp(np.asarray(x[k:], dtype=float))
    order = np.lexsort((sig, mus))
    return mus[order], sig[order]


def to_params(x) -> ParamVector:
    mus, sig = unpack(x)
    return canonicalize(list(zip(mus.tolist(), sig.tolist())))


def valid_probe(mus, sig) -> bool:
    return bool(
        np.all(np.isfinite(mus))
        and np.all(sig >= SIGMA_MIN)
        and np.all(sig <= SIGMA_MAX)
    )


def anchor_start(sample, k: int) -> np.ndarray:
    """Means at the i/(k+1) sample quantiles, all sigmas equal to sd/k."""
    x = np.asarray(sample, dtype=float)
    q = np.quantile(x, np.arange(1, k + 1) / (k + 1))
    sd = float(x.std())
    if not sd > 0:
        sd = 1.0
    return pack(q, np.full(k, sd / k))


def perturbed_starts(sample, k: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    base = anchor_start(sample, k)
    sd = float(np.std(sample)) or 1.0
    out = []
    for _ in range(count):
        x = base.copy()
        x[:k] += rng.normal(0.0, sd / k, size=k)
        x[k:] += rng.normal(0.0, 0.5, size=k)
        out.append(x)
    return out


def _initial_simplex(x0, mu_step):
    k = len(x0) // 2
    steps = np.concatenate([np.full(k, mu_step), np.full(k, 0.25)])
    sim = np.tile(x0, (len(x0) + 1, 1))
    for i, s in enumerate(steps):
        sim[i + 1, i] += s
    return sim


def _run_start(value, x0, cfg: OptimizerConfig, mu_step: float, max_evals: int) -> StartOutcome:
    def neg(x):
        v = value(x)
        return -v if math.isfinite(v) else math.inf

    f0 = value(x0)
    x, fbest, nfev, trace = np.array(x0, float), f0, 0, []
    it = 0
    for _ in range(1 + max(0, cfg.restarts)):
        budget = max_evals - nfev
        if budget <= len(x0) + 1:
            break

        def record(intermediate_result):
            nonlocal it
            it += 1
            trace.append((it, -float(intermediate_result.fun)))

        res = minimize(
            neg,
            x,
            method="Nelder-Mead",
            callback=record,
            options={
                "initial_simplex": _initial_simplex(x, mu_step),
                "xatol": cfg.xtol,
                "fatol": math.inf,
                "maxfev": budget,
                "maxiter": budget,
            },
        )
        nfev += int(res.nfev)
        fnew = -float(res.fun)
        if not fnew > fbest and math.isfinite(fbest):
            break
        improved = fnew - fbest if math.isfinite(fbest) else math.inf
        x, fbest = np.array(res.x), fnew
        if improved <= 1e-12 * max(1.0, abs(fbest)):
            break
    return StartOutcome(np.array(x0, float), f0, x, fbest, nfev, trace)


def multistart(
    value: Callable[[np.ndarray], float],
    sample,
    k: int,
    cfg: OptimizerConfig,
    extra_starts: Sequence[np.ndarray] = (),
) -> list[StartOutcome]:
    """Maximise ``value`` from the anchor start, random perturbations of it,
    and any ``extra_starts``.  Outcomes come back in start order."""
    rng = np.random.default_rng(cfg.seed)
    extra = list(extra_starts)
    n_random = max(0, cfg.starts - 1 - len(extra))
    starts = [anchor_start(sample, k)] + extra + perturbed_starts(sample, k, n_random, rng)
    starts = starts[: max(cfg.starts, 1 + len(extra))]
    mu_step = 0.25 * (float(np.std(sample)) or 1.0)
    max_evals = cfg.evals_for(k)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(lambda x0: _run_start(value, x0, cfg, mu_step, max_evals), starts))
    return [_run_start(value, x0, cfg, mu_step, max_evals) for x0 in starts]


def best_outcome(outcomes: list[StartOutcome]) -> tuple[StartOutcome, float]:
    """Best start (ties: lexicographically smaller canonical theta) and the
    gap to the runner-up, used as the empirical epsilon."""
    finite = [o for o in outcomes if math.isfinite(o.f)]
    if not finite:
        raise OptimizationError("no start reached a finite objective value")

    def key(o):
        return (-o.f, tuple(x for c in to_params(o.x) for x in (c.mu, c.sigma)))

    ranked = sorted(finite, key=key)
    eps = ranked[0].f - ranked[1].f if len(ranked) > 1 else 0.0
    return ranked[0], max(0.0, eps)
