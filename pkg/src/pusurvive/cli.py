"""Command line interface.

Subcommands map to the study's workflows: ``simulate`` writes a synthetic
dataset with its ground-truth sidecar, ``fit`` estimates one model on a
dataset CSV, ``experiment`` runs the Monte Carlo grid, and
``check-gradients`` verifies the analytic derivatives against finite
differences.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import config as cfgmod
from .estimator import FitOptions, fit_alternating, fit_simultaneous
from .ml_losses import KnownCensoringModel, fit_loss
from .model_core import ALL_VARIANTS, CensoringMode, ModelVariant, load_csv, save_csv, validate_dataset
from .experiments import emit_report, run_monte_carlo
from .pu_likelihood import LikelihoodContext, ObjectiveTarget, grad
from .simulation import generate, save_truth_csv

_VARIANT_NAMES = [str(v) for v in ALL_VARIANTS]


def _cmd_simulate(args) -> int:
    kv = cfgmod.load_config(args.config)
    dgp = cfgmod.dgp_config_from(kv)
    dataset, truth, empty_s1 = generate(dgp)
    os.makedirs(args.out, exist_ok=True)
    save_csv(dataset, os.path.join(args.out, "data.csv"))
    save_truth_csv(truth, os.path.join(args.out, "truth.csv"))
    if empty_s1:
        print("warning: no records were labeled s=1", file=sys.stderr)
    print(f"wrote {len(dataset)} records to {args.out}/data.csv (+ truth.csv)")
    return 0


def _cmd_fit(args) -> int:
    variant = ModelVariant.parse(args.variant)
    c_obs = variant.censoring_mode is CensoringMode.C_OBSERVED
    data = load_csv(args.data, c_observed_for_labeled=c_obs)
    problems = validate_dataset(data)
    if problems:
        print("invalid dataset:", file=sys.stderr)
        for pr in problems[:10]:
            print(f"  {pr}", file=sys.stderr)
        return 1

    if args.loss:
        if args.theta_c is None:
            print("--loss requires --theta-c (known censoring model)", file=sys.stderr)
            return 1
        cm = KnownCensoringModel(tuple(float(v) for v in args.theta_c.split(",")))
        res = fit_loss(data, args.loss, cm)
        if args.loss == "cox":
            out = {"loss": "cox", "theta_t": list(res.params.params)}
        else:
            out = {
                "loss": "logit",
                "alpha": list(res.params.alpha),
                "beta": list(res.params.beta),
            }
        out.update(converged=res.converged, outer_iterations=res.outer_iterations)
        print(json.dumps(out, indent=2))
        return 0

    fitter = fit_simultaneous if args.simultaneous else fit_alternating
    fit = fitter(data, variant, FitOptions())
    out = {
        "variant": str(variant),
        "theta_t": fit.theta_t_hat.tolist(),
        "theta_c": fit.theta_c_hat.tolist(),
        "se_t": None if fit.se_t is None else fit.se_t.tolist(),
        "se_c": None if fit.se_c is None else fit.se_c.tolist(),
        "converged": fit.converged,
        "outer_iterations": fit.outer_iterations,
    }
    print(json.dumps(out, indent=2))
    return 0


def _cmd_experiment(args) -> int:
    kv = cfgmod.load_config(args.config)
    cfg = cfgmod.experiment_config_from(kv)
    if args.workers is not None:
        import dataclasses

        cfg = dataclasses.replace(cfg, workers=args.workers)
    report = run_monte_carlo(cfg)
    paths = emit_report(report, args.out)
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_check_gradients(args) -> int:
    from .simulation import DgpConfig

    rng = np.random.default_rng(args.seed)
    dgp = DgpConfig(n_raw=200, seed=args.seed)
    data_obs, _, _ = generate(dgp)
    data_unobs = data_obs.to_c_unobserved()
    worst = 0.0
    h = 1e-6
    for variant in ALL_VARIANTS:
        data = data_obs if variant.censoring_mode is CensoringMode.C_OBSERVED else data_unobs
        for target in ObjectiveTarget:
            theta_t = rng.normal(scale=0.3, size=2)
            theta_c = rng.normal(scale=0.3, size=2)
            ctx = LikelihoodContext(data, variant, theta_t, theta_c)
            g = grad(ctx, target)
            fd = _fd_grad(data, variant, target, theta_t, theta_c, h)
            rel = np.max(np.abs(g - fd) / (1.0 + np.abs(fd)))
            worst = max(worst, rel)
            print(f"{variant} {target.value}: max rel err {rel:.3e}")
    print(f"worst: {worst:.3e}")
    return 0 if worst <= 1e-6 else 1


def _fd_grad(data, variant, target, theta_t, theta_c, h):
    from .pu_likelihood import neg_loglik

    def f(v):
        if target is ObjectiveTarget.THETA_T:
            ctx = LikelihoodContext(data, variant, v, theta_c)
        else:
            ctx = LikelihoodContext(data, variant, theta_t, v)
        return neg_loglik(ctx, target)

    base = theta_t if target is ObjectiveTarget.THETA_T else theta_c
    out = np.empty_like(base)
    for j in range(base.size):
        e = np.zeros_like(base)
        e[j] = h
        out[j] = (f(base + e) - f(base - e)) / (2 * h)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="pusurvive")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic PU dataset")
    p.add_argument("--config", required=True, help="flat key=value config file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="fit one model variant to a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--variant", default="pusa_c_observed", choices=_VARIANT_NAMES)
    p.add_argument("--loss", choices=["cox", "logit"], default=None,
                   help="fit a PU-weighted loss instead of the parametric MLE")
    p.add_argument("--theta-c", default=None,
                   help="known censoring coefficients for --loss, e.g. '1,0.5'")
    p.add_argument("--simultaneous", action="store_true",
                   help="experimental joint minimization instead of alternating")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("experiment", help="run the Monte Carlo study")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("check-gradients", help="finite-difference derivative check")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_check_gradients)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
