"""L2 projection of a target density onto mixtures with fixed components.

For fixed components the squared distance ``||target - sum_i w_i g_i||^2``
expands to ``w'Kw - 2c'w + const``, so the optimal weights solve a small
quadratic programme over the probability simplex.  The solver enumerates
every support set, which is exact and cheap for the component counts used
here.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConditioningError, DomainError, UnsupportedSizeError
from .gmx import MixtureDensity, ParamVector, WeightVector, cross_gram, gram_matrix
from .kde import KernelEstimate, kde_cross_vector

MAX_K = 16
KKT_TOL = 1e-10
FEAS_TOL = 1e-12
SVD_CUTOFF = 1e-12

# Set by the test-suite (or PSEUDOMIX_CHECK_WEIGHT_BOUND=1) to audit every projection.
CHECK_WEIGHT_BOUND = os.environ.get("PSEUDOMIX_CHECK_WEIGHT_BOUND", "") not in ("", "0")
# Running tally of audited projections in this process.
WEIGHT_BOUND_AUDIT = {"checked": 0, "violations": 0}


class WeightBoundViolation(AssertionError):
    pass


@dataclass(frozen=True)
class QuadraticProjection:
    gram: np.ndarray
    cross: np.ndarray
    const_term: Optional[float] = None

    def __post_init__(self):
        K = np.asarray(self.gram, dtype=float)
        c = np.asarray(self.cross, dtype=float).ravel()
        if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] != c.size:
            raise DomainError(f"gram {K.shape} and cross {c.shape} do not agree")
        if not np.all(np.isfinite(K)) or not np.all(np.isfinite(c)):
            raise DomainError("non-finite entries in projection data")
        if np.max(np.abs(K - K.T), initial=0.0) > 1e-12 * max(1.0, np.abs(K).max()):
            raise DomainError("gram matrix is not symmetric")
        object.__setattr__(self, "gram", K)
        object.__setattr__(self, "cross", c)

    @property
    def k(self) -> int:
        return self.cross.size

    def objective(self, w) -> float:
        """``w'Kw - 2c'w`` (the distance squared minus the constant)."""
        w = np.asarray(w, dtype=float)
        return float(w @ self.gram @ w - 2.0 * self.cross @ w)

    def scale(self) -> float:
        return max(1.0, float(np.abs(self.gram).max()), float(np.abs(self.cross).max()))


@dataclass(frozen=True)
class Candidate:
    support: tuple[int, ...]
    weights: np.ndarray
    multiplier: float
    objective: float
    kkt_residual: float


def kkt_residual(q: QuadraticProjection, w, support=None) -> tuple[float, float]:
    """Scaled KKT violation of ``w`` and the fitted simplex multiplier.

    The residual collects stationarity on the support, dual feasibility off
    it, sign and sum violations, all divided by ``q.scale()``.
    """
    w = np.asarray(w, dtype=float)
    if support is None:
        support = np.flatnonzero(w > 0.0)
    support = np.asarray(support, dtype=int)
    grad = q.gram @ w - q.cross
    nu = -float(grad[support].mean()) if support.size else 0.0
    eta = grad + nu
    off = np.ones(q.k, dtype=bool)
    off[support] = False
    parts = [
        np.abs(eta[support]).max(initial=0.0),
        np.clip(-eta[off], 0.0, None).max(initial=0.0),
        np.clip(-w, 0.0, None).max(initial=0.0),
        abs(w.sum() - 1.0),
    ]
    return max(parts) / q.scale(), nu


def _restricted_solve(K, c, S):
    m = len(S)
    A = np.zeros((m + 1, m + 1))
    A[:m, :m] = K[np.ix_(S, S)]
    A[:m, m] = 1.0
    A[m, :m] = 1.0
    rhs = np.append(c[list(S)], 1.0)
    # Null vectors of the bordered system have zero multiplier part, so the
    # minimum-norm solution is also minimum-norm in the weights alone.
    sol = np.linalg.lstsq(A, rhs, rcond=SVD_CUTOFF)[0]
    return sol[:m], sol[m]


def enumerate_candidates(q: QuadraticProjection, tol: float = KKT_TOL) -> list[Candidate]:
    """All feasible support-restricted stationary points passing the KKT test."""
    if q.k > MAX_K:
        raise UnsupportedSizeError(f"k={q.k} exceeds the enumeration limit {MAX_K}")
    K, c, k = q.gram, q.cross, q.k
    out = []
    for m in range(1, k + 1):
        for S in itertools.combinations(range(k), m):
            wS, _ = _restricted_solve(K, c, S)
            if not np.all(np.isfinite(wS)) or wS.min() < -FEAS_TOL:
                continue
            w = np.zeros(k)
            w[list(S)] = np.clip(wS, 0.0, None)
            total = w.sum()
            if not total > 0.0:
                continue
            w /= total
            res, nu = kkt_residual(q, w, S)
            if res <= tol:
                out.append(Candidate(S, w, nu, q.objective(w), res))
    return out


def _pick(cands: list[Candidate]) -> Candidate:
    best = min(c.objective for c in cands)
    slack = 1e-13 * max(1.0, abs(best))
    tied = [c for c in cands if c.objective <= best + slack]
    return min(tied, key=lambda c: (float(c.weights @ c.weights), c.support))


def solve_simplex(q: QuadraticProjection) -> WeightVector:
    """Minimise ``w'Kw - 2c'w`` over the probability simplex.

    Every non-empty support is tried.  Among KKT-certified candidates the
    one with the smallest objective is returned; ties go to the smallest
    Euclidean norm.  If rounding rejects every candidate, the best feasible
    stationary point is returned with its (larger) residual.
    """
    cands = enumerate_candidates(q)
    if not cands:
        cands = enumerate_candidates(q, tol=math.inf)
    best = _pick(cands)
    w = best.weights
    support = tuple(int(i) for i in np.flatnonzero(w > 0.0))
    res, _ = kkt_residual(q, w, best.support)
    return WeightVector(tuple(w.tolist()), support, res)


def projection_for_kde(e: KernelEstimate, p: ParamVector, with_const: bool = False):
    mus, sig = p.mus, p.sigmas
    return QuadraticProjection(
        gram_matrix(p),
        kde_cross_vector(e, mus, sig),
        e.l2_norm_sq if with_const else None,
    )


def projection_for_density(target: MixtureDensity, p: ParamVector) -> QuadraticProjection:
    """Projection data when the target is itself a Gaussian mixture."""
    a = target.weights.as_array()
    c = cross_gram(p, target.params) @ a
    const = float(a @ gram_matrix(target.params) @ a)
    return QuadraticProjection(gram_matrix(p), c, const)


def weight_bound_ok(w: WeightVector, p, sup_norm: float, atol: float = 1e-9) -> bool:
    """Check ``w_i / sigma_i <= 2 sqrt(pi) sup|f| + 2 sqrt(2) / sigma_o``.

    ``sigma_o`` is the largest sigma carrying positive weight.
    """
    wa = w.as_array()
    sig = p.sigmas if isinstance(p, ParamVector) else np.asarray(p, dtype=float)
    sigma_o = sig[wa > 0.0].max()
    bound = 2.0 * math.sqrt(math.pi) * sup_norm + 2.0 * math.sqrt(2.0) / sigma_o
    return bool(np.all(wa / sig <= bound + atol + 1e-12 * bound))


def weights_for(e: KernelEstimate, p: ParamVector) -> WeightVector:
    """Optimal simplex weights for the kernel estimate and fixed components."""
    return weights_for_arrays(e, p.mus, p.sigmas)


def weights_for_arrays(e: KernelEstimate, mus, sigmas, gram=None) -> WeightVector:
    """:func:`weights_for` on raw arrays, as used inside the optimizers."""
    mus = np.asarray(mus, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    if mus.size == 1:
        return WeightVector((1.0,), (0,), 0.0)
    if gram is None:
        gram = _gram_arrays(mus, sigmas)
    w = solve_simplex(QuadraticProjection(gram, kde_cross_vector(e, mus, sigmas)))
    if CHECK_WEIGHT_BOUND:
        _audit(w, sigmas, e.sup_norm)
    return w


def _audit(w, sigmas, sup_norm):
    WEIGHT_BOUND_AUDIT["checked"] += 1
    if not weight_bound_ok(w, sigmas, sup_norm):
        WEIGHT_BOUND_AUDIT["violations"] += 1
        raise WeightBoundViolation(
            f"weights {w.weights} violate the bound for sigmas={sigmas}"
        )


def _gram_arrays(mus, sigmas):
    var = sigmas[:, None] ** 2 + sigmas[None, :] ** 2
    d = mus[:, None] - mus[None, :]
    K = np.exp(-0.5 * d * d / var) / np.sqrt(2.0 * np.pi * var)
    return 0.5 * (K + K.T)


def weights_for_density(target: MixtureDensity, p: ParamVector) -> WeightVector:
    if len(p) == 1:
        return WeightVector((1.0,), (0,), 0.0)
    return solve_simplex(projection_for_density(target, p))


def weights_unconstrained(q: QuadraticProjection, max_cond: float = 1e12) -> np.ndarray:
    """Solve ``K w = c`` without the simplex constraint (diagnostic only)."""
    cond = np.linalg.cond(q.gram)
    if not np.isfinite(cond) or cond > max_cond:
        raise ConditioningError(f"gram matrix condition number {cond:.3g} exceeds {max_cond:.0g}")
    return np.linalg.solve(q.gram, q.cross)


def in_simplex(w, tol: float = 1e-12) -> bool:
    w = np.asarray(w, dtype=float)
    return bool(w.min() >= -tol and abs(w.sum() - 1.0) <= tol * max(1, w.size))


def projection_distance(q: QuadraticProjection, w) -> float:
    if q.const_term is None:
        raise DomainError("projection distance needs the target's squared norm")
    wa = w.as_array() if isinstance(w, WeightVector) else np.asarray(w, dtype=float)
    return math.sqrt(max(0.0, q.objective(wa) + q.const_term))
