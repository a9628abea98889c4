"""Gaussian component algebra.

Throughout, ``sigma`` is a standard deviation.  Densities are evaluated in
the log domain; linear-domain values are only ever ``exp`` of a log result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import DomainError

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True, order=True)
class Component:
    mu: float
    sigma: float

    def __post_init__(self):
        mu, sigma = float(self.mu), float(self.sigma)
        if not math.isfinite(mu):
            raise DomainError(f"component mean must be finite, got {self.mu!r}")
        if not (math.isfinite(sigma) and sigma > 0.0):
            raise DomainError(f"component sigma must be positive and finite, got {self.sigma!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)


@dataclass(frozen=True)
class ParamVector:
    """Components in natural order (mean, then sigma).

    Build instances with :func:`canonicalize`; the constructor only checks
    the ordering invariant.  Duplicated components are legal.
    """

    components: tuple[Component, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DomainError("a parameter vector needs at least one component")
        for a, b in zip(comps, comps[1:]):
            if (a.mu, a.sigma) > (b.mu, b.sigma):
                raise DomainError("components are not in natural order; use canonicalize()")
        object.__setattr__(self, "components", comps)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def mus(self) -> np.ndarray:
        return np.array([c.mu for c in self.components])

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([c.sigma for c in self.components])

    def as_list(self) -> list[list[float]]:
        return [[c.mu, c.sigma] for c in self.components]


@dataclass(frozen=True)
class WeightVector:
    """A point of the probability simplex, with solver certificate data."""

    weights: tuple[float, ...]
    active_set: tuple[int, ...] = ()
    kkt_residual: float = 0.0

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not w:
            raise DomainError("empty weight vector")
        if any(not math.isfinite(x) or x < 0.0 for x in w):
            raise DomainError(f"weights must be finite and non-negative, got {w}")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise DomainError(f"weights must sum to 1, got {math.fsum(w)!r}")
        object.__setattr__(self, "weights", w)
        if not self.active_set:
            object.__setattr__(self, "active_set", tuple(i for i, x in enumerate(w) if x > 0.0))

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, i):
        return self.weights[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.weights)

    @classmethod
    def from_array(cls, w, active_set=(), kkt_residual=0.0) -> "WeightVector":
        """Clip tiny negatives and renormalize before validating."""
        w = np.clip(np.asarray(w, dtype=float), 0.0, None)
        s = w.sum()
        if not s > 0.0:
            raise DomainError("weight vector has no positive mass")
        w = w / s
        return cls(tuple(w.tolist()), tuple(active_set), float(kkt_residual))


@dataclass(frozen=True)
class MixtureDensity:
    params: ParamVector
    weights: WeightVector

    def __post_init__(self):
        if len(self.params) != len(self.weights):
            raise DomainError(
                f"{len(self.params)} components but {len(self.weights)} weights"
            )

    @classmethod
    def from_triples(cls, triples: Iterable[tuple[float, float, float]]) -> "MixtureDensity":
        """Build from ``(weight, mu, sigma)`` triples in any order."""
        triples = sorted((float(m), float(s), float(w)) for w, m, s in triples)
        params = canonicalize([Component(m, s) for m, s, _ in triples])
        return cls(params, WeightVector.from_array([w for _, _, w in triples]))


def gauss_logpdf(c: Component, y: float) -> float:
    z = (y - c.mu) / c.sigma
    return -LOG_SQRT_2PI - math.log(c.sigma) - 0.5 * z * z


def inner_product(a: Component, b: Component) -> float:
    """L2 inner product of two Gaussian densities (closed form)."""
    var = a.sigma * a.sigma + b.sigma * b.sigma
    d = a.mu - b.mu
    return math.exp(-0.5 * d * d / var) / math.sqrt(2.0 * math.pi * var)


def _inner_matrix(mu_a, sig_a, mu_b, sig_b) -> np.ndarray:
    var = sig_a[:, None] ** 2 + sig_b[None, :] ** 2
    d = mu_a[:, None] - mu_b[None, :]
    return np.exp(-0.5 * d * d / var) / np.sqrt(2.0 * np.pi * var)


def gram_matrix(p) -> np.ndarray:
    """Pairwise inner products ``K[i, j] = <g_i, g_j>``; exactly symmetric."""
    mus = np.array([c.mu for c in p])
    sig = np.array([c.sigma for c in p])
    K = _inner_matrix(mus, sig, mus, sig)
    return 0.5 * (K + K.T)


def cross_gram(p, q) -> np.ndarray:
    """Rectangular block of inner products between two component lists."""
    return _inner_matrix(
        np.array([c.mu for c in p]), np.array([c.sigma for c in p]),
        np.array([c.mu for c in q]), np.array([c.sigma for c in q]),
    )


def _positive_terms(m: MixtureDensity):
    w = m.weights.as_array()
    keep = w > 0.0
    if not keep.any():
        raise DomainError("mixture has no positive weight")
    return (
        np.ascontiguousarray(m.params.mus[keep]),
        np.ascontiguousarray(m.params.sigmas[keep]),
        np.log(w[keep]),
    )


def mixture_logpdf(m: MixtureDensity, y):
    """Log mixture density at a scalar or an array of points.

    Zero-weight components are dropped before the log-sum-exp.
    """
    mu, sig, logw = _positive_terms(m)
    arr = np.ascontiguousarray(np.atleast_1d(np.asarray(y, dtype=np.float64)))
    out = kernels.mixture_logpdf_points(arr, mu, sig, logw)
    if np.ndim(y) == 0:
        return float(out[0])
    return out


def canonicalize(components: Sequence) -> ParamVector:
    comps = [c if isinstance(c, Component) else Component(*c) for c in components]
    if not comps:
        raise DomainError("cannot canonicalize an empty component sequence")
    return ParamVector(tuple(sorted(comps, key=lambda c: (c.mu, c.sigma))))


def hausdorff(p, q) -> float:
    """Hausdorff distance between two component sets in the (mu, sigma) plane."""
    a = np.array([(c.mu, c.sigma) for c in p], dtype=float)
    b = np.array([(c.mu, c.sigma) for c in q], dtype=float)
    d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
