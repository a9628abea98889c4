"""Comparison estimators: EM maximum likelihood and minimum L2 distance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .gmx import LOG_SQRT_2PI, WeightVector, canonicalize
from .kde import KernelEstimate
from .optim import (
    FitResult,
    OptimizerConfig,
    anchor_start,
    best_outcome,
    multistart,
    perturbed_starts,
    to_params,
    unpack,
    valid_probe,
)
from .simplex import QuadraticProjection, _gram_arrays, kde_cross_vector, solve_simplex


@dataclass
class EMConfig:
    max_iters: int = 2000
    tol: float = 1e-10
    variance_floor: Optional[float] = None  # sigma floor; default 1e-6 * sample sd
    restarts: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1 or self.restarts < 1 or not self.tol > 0:
            raise ValueError("EMConfig fields must be positive")
        if self.variance_floor is not None and not self.variance_floor > 0:
            raise ValueError("variance_floor must be positive")


def _log_joint(y, mu, sig, w):
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    z = (y[:, None] - mu[None, :]) / sig[None, :]
    return logw[None, :] - LOG_SQRT_2PI - np.log(sig)[None, :] - 0.5 * z * z


def _loglik_and_resp(y, mu, sig, w):
    a = _log_joint(y, mu, sig, w)
    m = a.max(axis=1, keepdims=True)
    lse = m + np.log(np.exp(a - m).sum(axis=1, keepdims=True))
    return float(lse.mean()), np.exp(a - lse)


def _em_run(y, mu, sig, w, cfg: EMConfig, floor: float):
    ll, resp = _loglik_and_resp(y, mu, sig, w)
    trace = [(0, ll)]
    for it in range(1, cfg.max_iters + 1):
        nk = resp.sum(axis=0)
        alive = nk > 1e-300
        w = nk / y.size
        mu = np.where(alive, (resp * y[:, None]).sum(axis=0) / np.where(alive, nk, 1.0), mu)
        var = (resp * (y[:, None] - mu[None, :]) ** 2).sum(axis=0) / np.where(alive, nk, 1.0)
        sig = np.where(alive, np.maximum(np.sqrt(var), floor), sig)
        new_ll, resp = _loglik_and_resp(y, mu, sig, w)
        trace.append((it, new_ll))
        done = new_ll - ll < cfg.tol
        ll = new_ll
        if done:
            break
    return mu, sig, w, ll, trace


def em_fit(data, k: int, cfg: EMConfig | None = None) -> FitResult:
    """Local maximum-likelihood fit by EM, best of several restarts.

    Sigmas are clamped below at ``cfg.variance_floor`` because the mixture
    likelihood itself is unbounded.
    """
    cfg = cfg or EMConfig()
    y = np.asarray(data, dtype=float).ravel()
    if k < 1 or y.size < k:
        raise DomainError(f"EM needs n >= k >= 1, got n={y.size}, k={k}")
    sd = float(y.std())
    floor = cfg.variance_floor if cfg.variance_floor is not None else 1e-6 * (sd or 1.0)
    rng = np.random.default_rng(cfg.seed)
    inits = [anchor_start(y, k)] + perturbed_starts(y, k, cfg.restarts - 1, rng)
    best = None
    for x0 in inits:
        mu0, sig0 = x0[:k].copy(), np.maximum(np.exp(x0[k:]), floor)
        run = _em_run(y, mu0, sig0, np.full(k, 1.0 / k), cfg, floor)
        if best is None or run[3] > best[3]:
            best = run
    mu, sig, w, ll, trace = best
    order = np.lexsort((sig, mu))
    return FitResult(
        theta_hat=canonicalize(list(zip(mu[order].tolist(), sig[order].tolist()))),
        weights=WeightVector.from_array(w[order]),
        objective_value=ll,
        n_evaluations=len(trace) - 1,
        starts=len(inits),
        trace=trace,
        estimator="em",
    )


def l2_distance_arrays(e: KernelEstimate, mus, sigmas) -> tuple[float, WeightVector]:
    """Profiled distance ``min_w ||f_n - w g||`` and its optimal weights."""
    K = _gram_arrays(mus, sigmas)
    q = QuadraticProjection(K, kde_cross_vector(e, mus, sigmas), e.l2_norm_sq)
    w = solve_simplex(q) if mus.size > 1 else WeightVector((1.0,), (0,), 0.0)
    return math.sqrt(max(0.0, q.objective(w.as_array()) + q.const_term)), w


def l2_fit(e: KernelEstimate, k: int, cfg: OptimizerConfig | None = None) -> FitResult:
    """Minimum-L2-distance fit; ``objective_value`` holds minus the distance."""
    cfg = cfg or OptimizerConfig()
    if k < 1:
        raise DomainError("k must be at least 1")

    def value(x):
        mus, sig = unpack(x)
        if not valid_probe(mus, sig):
            return -math.inf
        return -l2_distance_arrays(e, mus, sig)[0]

    outcomes = multistart(value, e.sample, k, cfg)
    best, eps = best_outcome(outcomes)
    theta = to_params(best.x)
    d, w = l2_distance_arrays(e, theta.mus, theta.sigmas)
    return FitResult(
        theta_hat=theta,
        weights=w,
        objective_value=-d,
        n_evaluations=sum(o.nfev for o in outcomes),
        starts=len(outcomes),
        epsilon=eps,
        trace=best.trace,
        start_objectives=[o.f0 for o in outcomes],
        final_objectives=[o.f for o in outcomes],
        estimator="l2",
    )
