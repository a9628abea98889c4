"""Time the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--n 20000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from pseudomix import _kernels_py

try:
    from pseudomix import _kernels as _compiled
except ImportError:
    _compiled = None


def cases(n, k, rng):
    y = rng.normal(0.0, 2.0, n)
    mu = rng.normal(0.0, 2.0, k)
    sigma = rng.uniform(0.5, 2.0, k)
    logw = np.log(rng.dirichlet(np.ones(k)))
    return {
        "kde_cross": lambda m: m.kde_cross(y, 0.3, mu, sigma),
        "mixture_logpdf_sum": lambda m: m.mixture_logpdf_sum(y, mu, sigma, logw),
        "mixture_logpdf_points": lambda m: m.mixture_logpdf_points(y, mu, sigma, logw),
        "gauss_pair_sum": lambda m: m.gauss_pair_sum(y[: min(n, 4000)], 0.18),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=20000)
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = {"numpy": _kernels_py}
    if _compiled is not None:
        backends["cython"] = _compiled
    else:
        print("compiled extension not built; timing numpy only")

    print(f"n={args.n} k={args.k}, best of {args.repeat} (ms)")
    print(f"{'kernel':<24}" + "".join(f"{b:>10}" for b in backends) + f"{'speedup':>10}")
    for name, call in cases(args.n, args.k, np.random.default_rng(0)).items():
        times = {
            b: 1e3 * min(timeit.repeat(lambda: call(m), number=1, repeat=args.repeat))
            for b, m in backends.items()
        }
        speed = times["numpy"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:<24}" + "".join(f"{t:>10.2f}" for t in times.values()) + f"{speed:>10.1f}")


if __name__ == "__main__":
    main()
