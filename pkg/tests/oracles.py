"""Independent reference computations: quadrature, multiprecision, brute force."""

import functools
import math

import mpmath
import numpy as np
from scipy.integrate import quad

mpmath.mp.dps = 50


def npdf(y, mu, sigma):
    return math.exp(-0.5 * ((y - mu) / sigma) ** 2) / (math.sqrt(2 * math.pi) * sigma)


def mp_logpdf(mu, sigma, y):
    mu, sigma, y = mpmath.mpf(mu), mpmath.mpf(sigma), mpmath.mpf(y)
    return -mpmath.log(mpmath.sqrt(2 * mpmath.pi) * sigma) - (y - mu) ** 2 / (2 * sigma**2)


def mixture_pdf_fn(triples):
    """``triples`` of (weight, mu, sigma) -> callable density."""
    return lambda y: sum(w * npdf(y, m, s) for w, m, s in triples)


def integrate(fun, centres, widths):
    """Integrate over the union of supports, split at every centre."""
    lo = min(c - 40 * w for c, w in zip(centres, widths))
    hi = max(c + 40 * w for c, w in zip(centres, widths))
    pts = sorted(set(float(c) for c in centres))
    edges = [lo] + [p for p in pts if lo < p < hi] + [hi]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        total += quad(fun, a, b, epsabs=1e-15, epsrel=1e-13, limit=400)[0]
    return total


def quad_inner(triples_a, triples_b):
    fa, fb = mixture_pdf_fn(triples_a), mixture_pdf_fn(triples_b)
    cs = [m for _, m, _ in triples_a + triples_b]
    ws = [s for _, _, s in triples_a + triples_b]
    return integrate(lambda y: fa(y) * fb(y), cs, ws)


def quad_sq_distance(triples_a, triples_b):
    fa, fb = mixture_pdf_fn(triples_a), mixture_pdf_fn(triples_b)
    cs = [m for _, m, _ in triples_a + triples_b]
    ws = [s for _, _, s in triples_a + triples_b]
    return integrate(lambda y: (fa(y) - fb(y)) ** 2, cs, ws)


def kde_triples(sample, h):
    n = len(sample)
    return [(1.0 / n, float(y), h) for y in sample]


@functools.lru_cache(maxsize=None)
def simplex_grid(k, step):
    """Every point of the simplex whose coordinates are multiples of ``step``."""
    m = int(round(1 / step))
    if k == 1:
        return np.ones((1, 1))
    axes = np.meshgrid(*[np.arange(m + 1, dtype=np.int16)] * (k - 1), indexing="ij")
    free = np.stack([a.ravel() for a in axes], axis=1)
    free = free[free.sum(axis=1) <= m]
    last = m - free.sum(axis=1, keepdims=True)
    return np.hstack([free, last]).astype(float) / m


def grid_minimum(K, c, step=0.005):
    W = simplex_grid(len(c), step)
    vals = ((W @ K) * W).sum(axis=1) - 2 * W @ c
    return float(vals.min())


def random_psd(rng, k, rank=None):
    rank = k if rank is None else rank
    A = rng.normal(size=(k, rank))
    return A @ A.T
