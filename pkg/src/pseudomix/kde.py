"""Gaussian kernel density estimate as an equal-weight n-component mixture."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from . import kernels
from .errors import DomainError
from .gmx import Component

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def bandwidth_default(sample) -> float:
    """Silverman's rule ``0.9 * min(sd, IQR / 1.34) * n ** (-1/5)``.

    ``sd`` divides by n, matching the sample variance used elsewhere.  When
    the IQR is zero but the spread is not, the sd alone is used.
    """
    x = np.asarray(sample, dtype=float)
    n = x.size
    if n < 2:
        raise DomainError("bandwidth needs at least two observations")
    sd = float(x.std())
    if not sd > 0.0:
        raise DomainError("sample has zero spread; bandwidth undefined")
    q75, q25 = np.percentile(x, [75.0, 25.0])
    iqr = float(q75 - q25) / 1.34
    spread = min(sd, iqr) if iqr > 0.0 else sd
    return 0.9 * spread * n ** -0.2


class KernelEstimate:
    """Kernel estimate ``(1/n) sum_t N(y; Y_t, h^2)``.

    The sample is copied and frozen.  ``l2_norm_sq`` and ``sup_norm`` are
    computed on first access and cached.
    """

    __slots__ = ("sample", "bandwidth", "_l2", "_sup")

    def __init__(self, sample, bandwidth=None):
        x = np.array(sample, dtype=np.float64).ravel()
        if x.size < 2:
            raise DomainError("kernel estimate needs at least two observations")
        if not np.all(np.isfinite(x)):
            raise DomainError("sample contains non-finite values")
        if bandwidth is None or bandwidth == "auto":
            h = bandwidth_default(x)
        else:
            h = float(bandwidth)
        if not (math.isfinite(h) and h > 0.0):
            raise DomainError(f"bandwidth must be positive, got {bandwidth!r}")
        x.setflags(write=False)
        self.sample = x
        self.bandwidth = h
        self._l2 = None
        self._sup = None

    @property
    def n(self) -> int:
        return int(self.sample.size)

    def __repr__(self):
        return f"KernelEstimate(n={self.n}, bandwidth={self.bandwidth:.6g})"

    @property
    def l2_norm_sq(self) -> float:
        if self._l2 is None:
            self._l2 = kde_l2_norm_sq(self)
        return self._l2

    @property
    def sup_norm(self) -> float:
        if self._sup is None:
            self._sup = kde_sup_norm(self)
        return self._sup


def kde_logpdf(e: KernelEstimate, y):
    arr = np.ascontiguousarray(np.atleast_1d(np.asarray(y, dtype=np.float64)))
    sig = np.full(e.n, e.bandwidth)
    logw = np.full(e.n, -math.log(e.n))
    out = kernels.mixture_logpdf_points(arr, e.sample, sig, logw)
    return float(out[0]) if np.ndim(y) == 0 else out


def kde_cross_vector(e: KernelEstimate, mus, sigmas) -> np.ndarray:
    """Inner products of the estimate with each component, O(n k)."""
    return kernels.kde_cross(
        e.sample,
        e.bandwidth,
        np.ascontiguousarray(mus, dtype=np.float64),
        np.ascontiguousarray(sigmas, dtype=np.float64),
    )


def kde_component_inner(e: KernelEstimate, c: Component) -> float:
    return float(kde_cross_vector(e, [c.mu], [c.sigma])[0])


def kde_l2_norm_sq(e: KernelEstimate) -> float:
    """Squared L2 norm of the estimate, exact, O(n^2)."""
    h2 = e.bandwidth * e.bandwidth
    pair = kernels.gauss_pair_sum(e.sample, 2.0 * h2)
    return pair / math.sqrt(4.0 * math.pi * h2) / (e.n * e.n)


def _golden_max(fun, lo, hi, tol):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return x, fun(x)


def kde_sup_norm(e: KernelEstimate, refine: int = 3) -> float:
    """Maximum of the estimate.

    Evaluates the density at every sample point, then runs a golden-section
    search around the ``refine`` best points, bounded by the neighbouring
    sample points (at most two bandwidths away).
    """
    h = e.bandwidth
    xs = np.unique(e.sample)
    logf = kde_logpdf(e, xs)
    best = float(logf.max())
    order = np.argsort(-logf)[:refine]
    tol = 1e-9 * max(h, 1e-300)
    for idx in order:
        x = xs[idx]
        lo = xs[idx - 1] if idx > 0 else x - 2.0 * h
        hi = xs[idx + 1] if idx + 1 < xs.size else x + 2.0 * h
        lo, hi = max(lo, x - 2.0 * h), min(hi, x + 2.0 * h)
        _, val = _golden_max(lambda t: kde_logpdf(e, t), lo, hi, tol)
        best = max(best, val)
    return min(math.exp(best), 1.0 / (math.sqrt(2.0 * math.pi) * h))


def read_sample(path) -> np.ndarray:
    """Read one number per line; blank lines and ``#`` comments are skipped."""
    values = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            v = float(line)
        except ValueError:
            raise DomainError(f"{path}:{lineno}: not a number: {line!r}") from None
        if not math.isfinite(v):
            raise DomainError(f"{path}:{lineno}: non-finite value {line!r}")
        values.append(v)
    return np.array(values, dtype=float)


def write_sample(path, values, header=()) -> None:
    lines = [f"# {h}" for h in header]
    lines.extend(repr(float(v)) for v in values)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
