"""Batch entry point: generate data, run schemes, compute rates, report.

One experiment lives in one directory::

    exp/
      dataset/     data.csv, problem.json, descriptor.json, truth.json
      runs/        <scheme>-seed<k>/ with trace, summary and selection files
      reports/     consolidated fit tables, run-length and rate reports

Exit codes: 0 success, 2 configuration/schema error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .collinearity import CollinearityMatrix, block_distribution, pair_probabilities
from .convergence import scheme_rates
from .datagen import Dataset, DescriptorError, load_dataset, make_dataset
from .diagnostics import PilotTooShortError, fit as fit_metric, fit_report, max_run_length
from .kernel import build_kernel
from .samplers import (
    SCHEMES,
    ChainConfig,
    ChainNumericalError,
    mean_hyperparameters,
    posterior_summary,
    run_chain,
)

_PROFILE_POINTS = 201


def _block_dist_for(dataset: Dataset, beta: float, n_ob: int):
    C = CollinearityMatrix.from_inputs(dataset.problem.inputs)
    P = pair_probabilities(C, beta) if n_ob > 0 else None
    return C, P, block_distribution(P, dataset.problem.m, n_ob)


def cmd_generate(args) -> int:
    desc = json.loads(Path(args.config).read_text())
    if args.seed is not None:
        desc["seed"] = args.seed
    dataset = make_dataset(desc)
    out = Path(args.out)
    dataset.save(out / "dataset")
    print(f"dataset written to {out / 'dataset'} "
          f"(m={dataset.problem.m}, n={dataset.problem.n}, p={dataset.problem.p})")
    return 0


def cmd_identify(args) -> int:
    dataset = load_dataset(Path(args.dataset))
    desc = dataset.descriptor
    alpha = args.alpha if args.alpha is not None else desc["alpha"]
    kernel = build_kernel(alpha, desc["p"])
    n_ob = args.n_ob
    C, P, dist = _block_dist_for(dataset, args.beta, n_ob)
    config = ChainConfig(scheme=args.scheme, n_mc=args.n_mc, n_b=args.burn_in,
                         n_ob=n_ob, seed=args.seed, alpha=alpha, beta=args.beta,
                         shape_convention=args.shape_convention, init=args.init,
                         backend=args.backend)
    trace = run_chain(config, dataset.problem, kernel,
                      dist if args.scheme.startswith("rsgsob") else None)
    run_dir = Path(args.out) / "runs" / f"{args.scheme}-seed{args.seed}"
    run_dir.mkdir(parents=True, exist_ok=True)
    trace.save(run_dir)
    trace.to_csv(run_dir / "trace.csv")
    trace.selection_to_csv(run_dir / "selection.csv")
    _write_selection_freq(trace, run_dir / "selection_freq.csv")
    np.savetxt(run_dir / "collinearity.csv", C.c, delimiter=",")
    _write_pair_probs(P, run_dir / "pair_probs.csv")
    _write_profile(args.beta, run_dir / "profile.csv")
    summary = posterior_summary(trace)
    _write_summary(summary, trace, dataset, run_dir / "summary.json")
    print(f"run written to {run_dir} ({trace.elapsed:.2f}s, "
          f"{trace.n_stored} stored samples)")
    return 0


def _write_selection_freq(trace, path) -> None:
    counts: dict = {}
    for _, _, i, j in trace.selections:
        key = (i, j)
        counts[key] = counts.get(key, 0) + 1
    total = sum(counts.values())
    with open(path, "w") as fh:
        fh.write("block_i,block_j,count,frequency\n")
        for (i, j), cnt in sorted(counts.items()):
            fh.write(f"{i + 1},{'' if j < 0 else j + 1},{cnt},{cnt / total:.10f}\n")


def _write_pair_probs(P, path) -> None:
    with open(path, "w") as fh:
        fh.write("i,j,probability\n")
        if P is not None:
            for (i, j), prob in zip(P.pairs, P.probs):
                fh.write(f"{i + 1},{j + 1},{prob:.12e}\n")


def _write_profile(beta: float, path) -> None:
    c = np.linspace(0.0, 1.0, _PROFILE_POINTS)
    weight = np.expm1(beta * c) / np.expm1(beta)
    np.savetxt(path, np.column_stack([c, weight]), delimiter=",",
               header="c,relative_weight", comments="")


def _write_summary(summary, trace, dataset: Dataset, path) -> None:
    m, p = trace.m, trace.p
    fits = None
    truth = dataset.truth.stacked
    if np.linalg.norm(truth) > 0:
        col = dataset.collinear_channels
        col_idx = [k * p + l for k in col for l in range(p)]
        ind_idx = [k * p + l for k in range(m) if k not in col for l in range(p)]
        if col_idx and ind_idx:
            rep = fit_report(truth, summary.theta_mean, col_idx, ind_idx)
            fits = {"all": rep.fit_all, "col": rep.fit_col, "ind": rep.fit_ind}
    doc = {
        "scheme": trace.config.scheme,
        "seed": trace.config.seed,
        "burn_in": summary.burn_in,
        "n_used": summary.n_used,
        "lambda_hat": summary.lambda_hat.tolist(),
        "sigma2_hat": summary.sigma2_hat,
        "theta_mean": [summary.theta_mean[k * p:(k + 1) * p].tolist() for k in range(m)],
        "ci_lower": [summary.ci_lower[k * p:(k + 1) * p].tolist() for k in range(m)],
        "ci_upper": [summary.ci_upper[k * p:(k + 1) * p].tolist() for k in range(m)],
        "truth": [b.tolist() for b in dataset.truth.blocks],
        "fits": fits,
    }
    Path(path).write_text(json.dumps(doc, indent=2))


def cmd_rate(args) -> int:
    dataset = load_dataset(Path(args.dataset))
    desc = dataset.descriptor
    alpha = args.alpha if args.alpha is not None else desc["alpha"]
    kernel = build_kernel(alpha, desc["p"])
    lam, sigma2 = args.lam, args.sigma2
    if args.from_run is not None:
        from .samplers import ChainTrace
        trace = ChainTrace.load(Path(args.from_run))
        lam_hat, sigma2_hat = mean_hyperparameters(trace, first=args.first)
        lam = float(np.mean(lam_hat)) if lam is None else lam
        sigma2 = sigma2_hat if sigma2 is None else sigma2
    if lam is None or sigma2 is None:
        raise DescriptorError("rate needs --lam and --sigma2 (or --from-run)")
    _, _, dist = _block_dist_for(dataset, args.beta, args.n_ob)
    report = scheme_rates(dataset.problem, kernel, lam, sigma2, dist,
                          pair_tol=args.pair_tol)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    report.to_json(out)
    print(f"rate(RSGSOB) = {report.rate_rsgsob:.4f}  "
          f"rate(RSGS) = {report.rate_rsgs:.4f}  -> {out}")
    return 0


def cmd_report(args) -> int:
    root = Path(args.root)
    run_dirs = sorted((root / "runs").glob("*-seed*")) if (root / "runs").exists() else []
    if not run_dirs:
        raise DescriptorError(f"no runs found under {root}")
    dataset = load_dataset(root / "dataset")
    p = dataset.problem.p
    col = dataset.collinear_channels
    col_idx = [k * p + l for k in col for l in range(p)]
    ind_idx = [k * p + l for k in range(dataset.problem.m) if k not in col
               for l in range(p)]
    truth = dataset.truth.stacked
    reports_dir = root / "reports"
    reports_dir.mkdir(exist_ok=True)

    from .samplers import ChainTrace
    counts = [int(c) for c in args.fit_counts.split(",")]
    fit_rows, rl_rows = [], []
    for run in run_dirs:
        trace = ChainTrace.load(run)
        scheme, seed = trace.config.scheme, trace.config.seed
        for count in counts:
            if count > trace.n_stored:
                continue
            est = trace.thetas[:count].mean(axis=0)
            if col_idx and ind_idx:
                rep = fit_report(truth, est, col_idx, ind_idx)
                fit_rows.append((scheme, seed, count, rep.fit_all,
                                 rep.fit_col, rep.fit_ind))
            else:
                fit_rows.append((scheme, seed, count, fit_metric(truth, est),
                                 "", ""))
        pilot = trace.thetas[: args.pilot_len]
        monitored = pilot[:, col_idx] if col_idx else pilot
        try:
            m_max, n_max = max_run_length(monitored, q=args.q, r=args.r, s=args.s)
            rl_rows.append((scheme, seed, m_max, n_max))
        except PilotTooShortError:
            pass

    with open(reports_dir / "fits.csv", "w") as fh:
        fh.write("scheme,seed,samples,fit_all,fit_col,fit_ind\n")
        for row in fit_rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    with open(reports_dir / "run_lengths.csv", "w") as fh:
        fh.write("scheme,seed,max_burn_in,max_total\n")
        for row in rl_rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    print(f"reports written to {reports_dir} "
          f"({len(fit_rows)} fit rows, {len(rl_rows)} run-length rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="colgibbs",
        description="Bayesian MISO identification under collinear inputs")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a synthetic dataset")
    gen.add_argument("--config", required=True, help="experiment descriptor JSON")
    gen.add_argument("--out", required=True, help="experiment directory")
    gen.add_argument("--seed", type=int, default=None, help="override descriptor seed")
    gen.set_defaults(func=cmd_generate)

    ide = sub.add_parser("identify", help="run one sampling scheme")
    ide.add_argument("--dataset", required=True, help="dataset directory")
    ide.add_argument("--out", required=True, help="experiment directory")
    ide.add_argument("--scheme", required=True, choices=SCHEMES)
    ide.add_argument("--seed", type=int, default=0)
    ide.add_argument("--n-mc", type=int, default=500)
    ide.add_argument("--n-ob", type=int, default=0)
    ide.add_argument("--beta", type=float, default=100.0)
    ide.add_argument("--alpha", type=float, default=None,
                     help="kernel decay override (default: dataset value)")
    ide.add_argument("--burn-in", type=int, default=None)
    ide.add_argument("--shape-convention", choices=("pooled", "paper-literal"),
                     default="pooled")
    ide.add_argument("--init", choices=("unit", "scale"), default="unit")
    ide.add_argument("--backend", choices=("auto", "pure", "compiled"),
                     default="auto")
    ide.set_defaults(func=cmd_identify)

    rate = sub.add_parser("rate", help="convergence rates at fixed hyperparameters")
    rate.add_argument("--dataset", required=True)
    rate.add_argument("--out", required=True, help="output JSON file")
    rate.add_argument("--lam", type=float, default=None)
    rate.add_argument("--sigma2", type=float, default=None)
    rate.add_argument("--n-ob", type=int, default=0)
    rate.add_argument("--beta", type=float, default=100.0)
    rate.add_argument("--alpha", type=float, default=None)
    rate.add_argument("--from-run", default=None,
                      help="estimate hyperparameters from this run directory")
    rate.add_argument("--first", type=int, default=200,
                      help="samples used for hyperparameter estimates")
    rate.add_argument("--pair-tol", type=float, default=0.0,
                      help="skip pairs below this selection probability")
    rate.set_defaults(func=cmd_rate)

    rep = sub.add_parser("report", help="consolidate fits and run lengths")
    rep.add_argument("--root", required=True, help="experiment directory")
    rep.add_argument("--fit-counts", default="100,200,1000,2000")
    rep.add_argument("--pilot-len", type=int, default=200)
    rep.add_argument("--q", type=float, default=0.025)
    rep.add_argument("--r", type=float, default=0.02)
    rep.add_argument("--s", type=float, default=0.95)
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DescriptorError, ValueError, KeyError, json.JSONDecodeError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ChainNumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
