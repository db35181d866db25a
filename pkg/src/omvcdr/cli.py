"""Command-line interface.

Exit codes: 0 success, 2 usage or input error, 3 solver error.
"""

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import (
    SyntheticSpec,
    generate_synthetic,
    load_dataset,
    save_dataset,
    zscore_normalize,
)
from .exceptions import DatasetError, OMVCDRError
from .metrics import evaluate
from .solver import VARIANTS, SolverConfig, fit

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
SCHEMA_VERSION = 1
DEFAULT_LAMBDAS = tuple(2.0**e for e in range(-5, 6))
DEFAULT_BENCH_NS = (2500, 5000, 10000, 20000)


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_solver_flags(p, multi_lambda=False, multi_seed=False):
    p.add_argument("--data", required=True, help="dataset manifest (TOML)")
    p.add_argument("--k", type=int, help="cluster count (defaults to the number of label classes)")
    if multi_lambda:
        p.add_argument("--lambdas", type=_float_list, default=DEFAULT_LAMBDAS,
                       help="comma-separated trade-off values (default 2^-5..2^5)")
    else:
        p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--m", type=int, default=3, help="number of latent spaces")
    p.add_argument("--dims", type=_int_list, help="comma-separated latent dimensions")
    p.add_argument("--normalize", action="store_true", help="z-score every feature first")
    if multi_seed:
        p.add_argument("--seeds", type=_int_list, default=(0,))
    else:
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", required=True, help="output JSON report")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="omvcdr", description="One-step multi-view clustering with diverse representations.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="cluster one dataset")
    _add_solver_flags(p)
    p.add_argument("--variant", choices=VARIANTS, default="full")
    p.add_argument("--labels-out", help="predicted labels file (default: <out>.labels.csv)")

    p = sub.add_parser("grid", help="sweep the trade-off parameter")
    _add_solver_flags(p, multi_lambda=True, multi_seed=True)
    p.add_argument("--variant", choices=VARIANTS, default="full")
    p.add_argument("--csv", help="summary table (default: --out with a .csv suffix)")

    p = sub.add_parser("ablate", help="compare the four model variants")
    _add_solver_flags(p, multi_seed=True)
    p.add_argument("--csv", help="summary table (default: --out with a .csv suffix)")

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--view-dims", type=_int_list, default=(20, 30, 40))
    p.add_argument("--separation", type=float, default=100.0)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("bench", help="time fixed-iteration fits against n")
    p.add_argument("--ns", type=_int_list, default=DEFAULT_BENCH_NS)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--view-dims", type=_int_list, default=(20, 30, 40))
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--noise", type=float, default=1.0)
    p.add_argument("--iters", type=int, default=5)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV")

    p = sub.add_parser("evaluate", help="score predicted labels against ground truth")
    p.add_argument("--truth", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--out", help="JSON output (default: stdout)")
    return parser


def _workers():
    try:
        return max(1, int(os.environ.get("OMVCDR_THREADS", "1")))
    except ValueError:
        return 1


def _load(args):
    dataset = load_dataset(args.data)
    if args.normalize:
        dataset = zscore_normalize(dataset)
    k = args.k if args.k is not None else dataset.n_classes
    if k is None:
        raise UsageError("--k is required when the dataset has no labels")
    if k < 2:
        raise UsageError(f"--k must be at least 2, got {k}")
    if k > dataset.n:
        raise UsageError(f"--k={k} exceeds the {dataset.n} samples")
    return dataset, k


def _config(args, k, lam, seed):
    try:
        m = len(args.dims) if args.dims else args.m
        return SolverConfig(k=k, m=m, latent_dims=args.dims, lam=lam,
                            max_iters=args.max_iters, rel_tol=args.tol, seed=seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def run_report(dataset, config, variant, normalize=False):
    """Fit once and build the report dict plus the predicted labels."""
    t0 = time.perf_counter()
    result = fit(dataset, config, variant)
    wall = time.perf_counter() - t0
    report = {
        "schema": SCHEMA_VERSION,
        "dataset_id": dataset.name,
        "dataset_sha256": dataset.fingerprint(),
        "config": {
            "k": config.k,
            "m": len(result.latent_dims),
            "latent_dims": list(result.latent_dims),
            "lambda": config.lam,
            "max_iters": config.max_iters,
            "rel_tol": config.rel_tol,
            "normalize": normalize,
        },
        "variant": variant,
        "seed": config.seed,
        "weights": result.weights.tolist(),
        "objective_trace": result.objective_trace.tolist(),
        "iterations": result.iterations_run,
        "converged": result.converged,
        "degenerate_weights": result.degenerate_weights,
        "cluster_sizes": result.partition.counts.tolist(),
        "wall_time_seconds": wall,
    }
    if dataset.labels is not None:
        report["metrics"] = evaluate(dataset.labels, result.labels)
    return report, result.labels


def _write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _write_labels(path, labels):
    Path(path).write_text("".join(f"{int(c)}\n" for c in labels), encoding="utf-8")


SUMMARY_FIELDS = ("variant", "lambda", "seed", "iterations", "objective",
                  "acc", "nmi", "purity", "fscore", "wall_time_seconds")


def _summary_row(report):
    metrics = report.get("metrics", {})
    return {
        "variant": report["variant"],
        "lambda": report["config"]["lambda"],
        "seed": report["seed"],
        "iterations": report["iterations"],
        "objective": report["objective_trace"][-1],
        "acc": metrics.get("acc", ""),
        "nmi": metrics.get("nmi", ""),
        "purity": metrics.get("purity", ""),
        "fscore": metrics.get("fscore", ""),
        "wall_time_seconds": report["wall_time_seconds"],
    }


def _write_summary(path, reports):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
        writer.writeheader()
        for r in reports:
            writer.writerow(_summary_row(r))


def _run_many(dataset, jobs, normalize):
    """Run ``(config, variant)`` jobs, returning reports in job order."""
    def one(job):
        config, variant = job
        return run_report(dataset, config, variant, normalize)[0]

    workers = min(_workers(), len(jobs))
    if workers <= 1:
        return [one(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, jobs))


def cmd_fit(args):
    dataset, k = _load(args)
    config = _config(args, k, args.lam, args.seed)
    report, labels = run_report(dataset, config, args.variant, args.normalize)
    _write_json(args.out, report)
    labels_out = args.labels_out or str(Path(args.out).with_suffix(".labels.csv"))
    _write_labels(labels_out, labels)
    msg = f"{report['iterations']} iterations, objective {report['objective_trace'][-1]:.6g}"
    if "metrics" in report:
        msg += "  " + "  ".join(f"{key}={val:.4f}" for key, val in report["metrics"].items())
    print(msg)
    return EXIT_OK


def cmd_grid(args):
    dataset, k = _load(args)
    jobs = [(_config(args, k, lam, seed), args.variant)
            for lam in args.lambdas for seed in args.seeds]
    reports = _run_many(dataset, jobs, args.normalize)
    _write_json(args.out, {"schema": SCHEMA_VERSION, "runs": reports})
    _write_summary(args.csv or Path(args.out).with_suffix(".csv"), reports)
    print(f"{len(reports)} runs written to {args.out}")
    return EXIT_OK


def cmd_ablate(args):
    dataset, k = _load(args)
    order = ("omvc", "omvcdr2", "equal_alpha", "full")
    jobs = [(_config(args, k, args.lam, seed), variant)
            for variant in order for seed in args.seeds]
    reports = _run_many(dataset, jobs, args.normalize)
    _write_json(args.out, {"schema": SCHEMA_VERSION, "runs": reports})
    _write_summary(args.csv or Path(args.out).with_suffix(".csv"), reports)
    for variant in order:
        accs = [r["metrics"]["acc"] for r in reports
                if r["variant"] == variant and "metrics" in r]
        if accs:
            print(f"{variant:12s} mean acc {np.mean(accs):.4f}")
    return EXIT_OK


def cmd_synth(args):
    try:
        spec = SyntheticSpec(n=args.n, k=args.k, view_dims=args.view_dims,
                             separation=args.separation, noise_sigma=args.noise,
                             seed=args.seed)
    except DatasetError as exc:
        raise UsageError(str(exc)) from None
    manifest = save_dataset(generate_synthetic(spec), args.out)
    print(manifest)
    return EXIT_OK


def cmd_bench(args):
    """Time fits with a fixed iteration count over a range of n.

    The initialization (k-means on the stacked views) and the alternating
    iterations are timed separately; each is the minimum over repeats.
    """
    def timed(n, iters):
        spec = SyntheticSpec(n=n, k=args.k, view_dims=args.view_dims,
                             separation=args.separation, noise_sigma=args.noise,
                             seed=args.seed)
        dataset = generate_synthetic(spec)
        config = SolverConfig(k=args.k, max_iters=iters, rel_tol=0.0, seed=args.seed)
        init = iterate = np.inf
        for _ in range(max(1, args.repeats)):
            result = fit(dataset, config)
            init = min(init, result.timings["init"])
            iterate = min(iterate, result.timings["iterations"])
        return init, iterate, result.iterations_run

    timed(max(4 * args.k, 50), 1)  # compile the kernels outside the timings
    rows = []
    for n in args.ns:
        init, iterate, iters = timed(n, args.iters)
        rows.append((n, iters, init, iterate, init + iterate))
        print(f"n={n:>7d}  init {init:.3f}s  iterations {iterate:.3f}s")
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "iterations", "init_seconds", "iterate_seconds", "total_seconds"])
        writer.writerows(rows)
    return EXIT_OK


def _read_label_file(path):
    try:
        return np.loadtxt(path, dtype=np.int64, ndmin=1)
    except (OSError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_evaluate(args):
    truth = _read_label_file(args.truth)
    pred = _read_label_file(args.pred)
    try:
        scores = evaluate(truth, pred)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out:
        _write_json(args.out, scores)
    else:
        print(json.dumps(scores, indent=2))
    return EXIT_OK


COMMANDS = {
    "fit": cmd_fit,
    "grid": cmd_grid,
    "ablate": cmd_ablate,
    "synth": cmd_synth,
    "bench": cmd_bench,
    "evaluate": cmd_evaluate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DatasetError, ValueError) as exc:
        print(f"omvcdr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OMVCDRError as exc:
        print(f"omvcdr {args.command}: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
