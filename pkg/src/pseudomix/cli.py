"""Command-line front end.

Exit status: 0 success, 2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .baselines import EMConfig, em_fit, l2_fit
from .config import check_keys, format_truth, parse_theta, parse_truth, read_config
from .errors import ConditioningError, DomainError, OptimizationError
from .experiments import (
    default_scenario,
    load_scenario,
    records_to_csv,
    run_scenario,
    sample_mixture,
    summary_json,
)
from .gmx import canonicalize
from .kde import KernelEstimate, read_sample, write_sample
from .optim import OptimizerConfig
from .plk import Objective, maximize
from .simplex import (
    in_simplex,
    projection_for_kde,
    projection_distance,
    solve_simplex,
    weight_bound_ok,
    weights_for,
    weights_unconstrained,
)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

CONFIG_KEYS = {
    "k", "estimator", "bandwidth", "starts", "xtol", "max_evals", "seed",
    "em_warm_start", "out", "format", "scenario", "workers",
}
DEFAULTS = {
    "k": "2", "estimator": "plk", "bandwidth": "auto", "starts": "5",
    "xtol": "1e-6", "seed": "0", "em_warm_start": "false", "format": "json",
    "workers": "1",
}


def _settings(args) -> dict[str, str]:
    """Defaults, then the config file, then explicit flags."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg = read_config(args.config)
        check_keys(cfg, CONFIG_KEYS, args.config)
        merged.update(cfg)
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = str(val)
    return merged


def _bandwidth(text: str):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise DomainError(f"bandwidth must be 'auto' or a number, got {text!r}") from None


def _optimizer(s: dict) -> OptimizerConfig:
    try:
        return OptimizerConfig(
            starts=int(s["starts"]),
            xtol=float(s["xtol"]),
            max_evals=int(s["max_evals"]) if s.get("max_evals") else None,
            seed=int(s["seed"]),
            em_warm_start=s["em_warm_start"].lower() in ("1", "true", "yes"),
            workers=int(s["workers"]),
        )
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def fit_report(data, k: int, estimator: str, bandwidth, opt: OptimizerConfig) -> dict:
    e = KernelEstimate(data, bandwidth)
    if estimator == "plk":
        fit = maximize(Objective(e, k), opt)
    elif estimator == "l2":
        fit = l2_fit(e, k, opt)
    elif estimator == "em":
        fit = em_fit(e.sample, k, EMConfig(seed=opt.seed))
    else:
        raise DomainError(f"unknown estimator {estimator!r}")
    # Diagnostics always refer to the L2-projected weights of the estimate.
    proj = projection_for_kde(e, fit.theta_hat, with_const=True)
    v = weights_for(e, fit.theta_hat)
    sup = e.sup_norm
    return {
        "estimator": estimator,
        "theta_hat": fit.theta_hat.as_list(),
        "weights": list(fit.weights.weights),
        "objective": fit.objective_value,
        "epsilon": fit.epsilon,
        "bandwidth": e.bandwidth,
        "n": e.n,
        "diagnostics": {
            "sup_norm": sup,
            "toke_bound_ok": weight_bound_ok(v, fit.theta_hat, sup),
            "projection_distance": projection_distance(proj, v),
        },
    }


def cmd_fit(args) -> int:
    s = _settings(args)
    data = read_sample(args.data)
    k = int(s["k"])
    if k < 1:
        raise DomainError("k must be at least 1")
    report = fit_report(data, k, s["estimator"], _bandwidth(s["bandwidth"]), _optimizer(s))
    if s["format"] == "csv":
        rows = ["component,mu,sigma,weight"]
        for i, ((mu, sig), w) in enumerate(zip(report["theta_hat"], report["weights"])):
            rows.append(f"{i},{mu!r},{sig!r},{w!r}")
        text = "\n".join(rows) + "\n"
    else:
        text = json.dumps(report, indent=2) + "\n"
    _emit(text, s.get("out"))
    return EXIT_OK


def weights_report(data, theta, bandwidth) -> dict:
    e = KernelEstimate(data, bandwidth)
    p = canonicalize(theta)
    q = projection_for_kde(e, p, with_const=True)
    w = solve_simplex(q)
    report = {
        "theta": p.as_list(),
        "weights": list(w.weights),
        "active_set": list(w.active_set),
        "kkt_residual": w.kkt_residual,
        "projection_distance": projection_distance(q, w),
        "bandwidth": e.bandwidth,
    }
    try:
        raw = weights_unconstrained(q)
        report["unconstrained"] = raw.tolist()
        report["unconstrained_out_of_simplex"] = not in_simplex(raw, tol=1e-9)
    except ConditioningError as exc:
        report["unconstrained"] = None
        report["unconstrained_out_of_simplex"] = None
        report["unconstrained_error"] = str(exc)
    return report


def cmd_weights(args) -> int:
    s = _settings(args)
    report = weights_report(read_sample(args.data), parse_theta(args.theta), _bandwidth(s["bandwidth"]))
    _emit(json.dumps(report, indent=2) + "\n", s.get("out"))
    return EXIT_OK


def cmd_simulate(args) -> int:
    s = _settings(args)
    if args.truth:
        truth = parse_truth(args.truth)
    elif s.get("scenario"):
        truth = load_scenario(s["scenario"]).truth
    else:
        truth = default_scenario().truth
    if args.n < 0:
        raise DomainError("n must be non-negative")
    seed = int(s["seed"])
    values = sample_mixture(truth, args.n, seed) if args.n else np.empty(0)

    header = [f"truth = {format_truth(truth)}", f"n = {args.n}", f"seed = {seed}"]
    if s.get("out"):
        write_sample(s["out"], values, header)
    else:
        lines = [f"# {h}" for h in header] + [repr(float(v)) for v in values]
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    s = _settings(args)
    path = args.scenario or s.get("scenario")
    scen = load_scenario(path) if path else default_scenario()
    if args.seed is not None:
        scen = replace(scen, seed=int(args.seed))
    records = run_scenario(scen, workers=int(s["workers"]))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "records.csv").write_text(records_to_csv(records), encoding="utf-8")
    (out_dir / "summary.json").write_text(summary_json(scen, records), encoding="utf-8")
    failed = sum(r.failed for r in records)
    print(f"{len(records)} records ({failed} failed) written to {out_dir}", file=sys.stderr)
    return EXIT_OK


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--k", type=int)
    p.add_argument("--estimator", choices=["plk", "em", "l2"])
    p.add_argument("--bandwidth", help="'auto' (Silverman) or a positive number")
    p.add_argument("--starts", type=int)
    p.add_argument("--xtol", type=float)
    p.add_argument("--max-evals", dest="max_evals", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "csv"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pseudomix",
        description="Pseudo-likelihood estimation of univariate Gaussian mixtures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="estimate a mixture from a data file")
    p.add_argument("data")
    _common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("weights", help="optimal weights for fixed components")
    p.add_argument("data")
    p.add_argument("--theta", required=True, help="mu:sigma[,mu:sigma...]")
    _common(p)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("simulate", help="draw a sample from a mixture")
    p.add_argument("--truth", help="w:mu:sigma[,w:mu:sigma...]")
    p.add_argument("--scenario", help="take the truth from a scenario file")
    p.add_argument("--n", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("benchmark", help="run a Monte Carlo scenario")
    p.add_argument("scenario", nargs="?", help="scenario file (default scenario if omitted)")
    p.add_argument("--out-dir", required=True)
    _common(p)
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OptimizationError, ConditioningError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
