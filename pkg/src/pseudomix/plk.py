"""Pseudo-likelihood objective and its multi-start maximiser.

The pseudo-likelihood replaces the free mixture weights of the ordinary
likelihood with the L2-optimal weights of the kernel estimate, so it is a
function of the component means and sigmas only and stays bounded as a
sigma shrinks to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError
from .gmx import ParamVector, WeightVector
from .kde import KernelEstimate
from .optim import (
    FitResult,
    OptimizerConfig,
    best_outcome,
    multistart,
    pack,
    to_params,
    unpack,
    valid_probe,
)
from .simplex import weights_for, weights_for_arrays


@dataclass(frozen=True)
class Objective:
    """Pseudo-likelihood of ``k`` components on the sample behind ``estimate``."""

    estimate: KernelEstimate
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("k must be at least 1")

    @property
    def data(self) -> np.ndarray:
        return self.estimate.sample

    @property
    def n(self) -> int:
        return self.estimate.n


def _mean_loglik(data, mus, sigmas, w) -> float:
    w = np.asarray(w, dtype=float)
    keep = w > 0.0
    total = kernels.mixture_logpdf_sum(
        data,
        np.ascontiguousarray(mus[keep]),
        np.ascontiguousarray(sigmas[keep]),
        np.log(w[keep]),
    )
    return total / data.size


def pseudo_loglik_arrays(obj: Objective, mus, sigmas) -> float:
    """Objective on raw arrays already in natural order; -inf outside the
    representable sigma range."""
    if not valid_probe(mus, sigmas):
        return -math.inf
    w = weights_for_arrays(obj.estimate, mus, sigmas)
    return _mean_loglik(obj.data, mus, sigmas, w.as_array())


def pseudo_loglik(obj: Objective, p: ParamVector) -> float:
    if len(p) != obj.k:
        raise DomainError(f"objective has k={obj.k} but got {len(p)} components")
    return pseudo_loglik_arrays(obj, p.mus, p.sigmas)


def plain_loglik(obj: Objective, p: ParamVector, w: WeightVector) -> float:
    """Ordinary mixture log-likelihood (averaged) with caller-chosen weights."""
    if len(p) != obj.k or len(w) != obj.k:
        raise DomainError(
            f"objective has k={obj.k}, got {len(p)} components and {len(w)} weights"
        )
    return _mean_loglik(obj.data, p.mus, p.sigmas, w.as_array())


def maximize(obj: Objective, cfg: OptimizerConfig | None = None, initial=()) -> FitResult:
    """Approximate maximiser of the pseudo-likelihood.

    Runs Nelder-Mead from the quantile anchor, any ``initial`` parameter
    vectors, random perturbations of the anchor and (optionally) an EM warm
    start.  The returned ``epsilon`` is the gap between the best and
    second-best start.
    """
    cfg = cfg or OptimizerConfig()

    def value(x):
        mus, sig = unpack(x)
        return pseudo_loglik_arrays(obj, mus, sig)

    extra = [pack(p.mus, p.sigmas) for p in initial]
    if cfg.em_warm_start:
        from .baselines import EMConfig, em_fit

        em = em_fit(obj.data, obj.k, EMConfig(seed=cfg.seed, restarts=2))
        extra.append(pack(em.theta_hat.mus, em.theta_hat.sigmas))

    outcomes = multistart(value, obj.data, obj.k, cfg, extra)
    best, eps = best_outcome(outcomes)
    theta = to_params(best.x)
    return FitResult(
        theta_hat=theta,
        weights=weights_for(obj.estimate, theta),
        objective_value=pseudo_loglik(obj, theta),
        n_evaluations=sum(o.nfev for o in outcomes),
        starts=len(outcomes),
        epsilon=eps,
        trace=best.trace,
        start_objectives=[o.f0 for o in outcomes],
        final_objectives=[o.f for o in outcomes],
        estimator="plk",
    )
