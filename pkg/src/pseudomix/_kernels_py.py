"""Pure numpy versions of the compiled kernels.

Large point-by-component evaluations are processed in row blocks so the
temporary matrices stay around ``_BLOCK`` doubles.
"""

import numpy as np

LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
_BLOCK = 1 << 21


def _rows(m, k):
    return max(1, _BLOCK // max(k, 1))


def kde_cross(sample, h, mu, sigma):
    sample = np.asarray(sample, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    var = sigma * sigma + h * h
    acc = np.zeros(mu.shape[0])
    step = _rows(sample.shape[0], mu.shape[0])
    for lo in range(0, sample.shape[0], step):
        d = sample[lo:lo + step, None] - mu[None, :]
        acc += np.exp(-0.5 * d * d / var).sum(axis=0)
    return acc / np.sqrt(2.0 * np.pi * var) / sample.shape[0]


def mixture_logpdf_points(y, mu, sigma, logw):
    y = np.asarray(y, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    logw = np.asarray(logw, dtype=np.float64)
    out = np.empty(y.shape[0])
    const = logw - LOG_SQRT_2PI - np.log(sigma)
    step = _rows(y.shape[0], mu.shape[0])
    for lo in range(0, y.shape[0], step):
        z = (y[lo:lo + step, None] - mu[None, :]) / sigma[None, :]
        a = const[None, :] - 0.5 * z * z
        m = a.max(axis=1)
        finite = np.isfinite(m)
        shift = np.where(finite, m, 0.0)
        with np.errstate(divide="ignore"):
            out[lo:lo + step] = shift + np.log(np.exp(a - shift[:, None]).sum(axis=1))
        out[lo:lo + step][~finite] = -np.inf
    return out


def mixture_logpdf_sum(y, mu, sigma, logw):
    return float(mixture_logpdf_points(y, mu, sigma, logw).sum())


def gauss_pair_sum(x, var):
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    total = 0.0
    step = _rows(n, n)
    for lo in range(0, n, step):
        d = x[lo:lo + step, None] - x[None, :]
        total += np.exp(-0.5 * d * d / var).sum()
    return float(total)
