"""Command-line interface.

Subcommands:
  run         full qubit sweep for the selected models
  sweep-noise noise-rate sweep (NPID-style robustness experiment)
  metrics     recompute summary.json from stored traces
  bench       compare kernel backends on representative workloads
"""

import argparse
import json
import math
import sys
from pathlib import Path

from . import backend
from .harness import ExperimentConfig, recompute_summary, run_experiment, write_summary
from .optim import MODEL_TAGS, TrainConfig


def _parse_qubits(text):
    """Accept '7..12' ranges or '7,9,11' lists."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(part) for part in text.split(","))


def _parse_models(text):
    models = tuple(part.strip() for part in text.split(","))
    for m in models:
        if m not in MODEL_TAGS:
            raise argparse.ArgumentTypeError(f"unknown model {m!r} (choose from {MODEL_TAGS})")
    return models


def _parse_rates(text):
    return tuple(float(part) for part in text.split(","))


def _parse_log_base(text):
    if text in ("e", "E"):
        return math.e
    return float(text)


def _add_common(parser):
    parser.add_argument("--qubits", type=_parse_qubits, default=(7, 8, 9, 10, 11, 12),
                        help="range '7..12' or list '7,9,11' (default 7..12)")
    parser.add_argument("--runs", type=int, default=5, help="runs per configuration (default 5)")
    parser.add_argument("--max-iters", type=int, default=1500)
    parser.add_argument("--target-loss", type=float, default=0.001)
    parser.add_argument("--lr-theta", type=float, default=0.1)
    parser.add_argument("--lr-net", type=float, default=0.01)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--depth", type=int, default=None,
                        help="fixed circuit depth (default: floor(n^2 log n))")
    parser.add_argument("--log-base", type=_parse_log_base, default=math.e,
                        help="log base of the depth schedule: 'e' (default) or a number, e.g. 2")
    parser.add_argument("--log-grad-norms", action="store_true",
                        help="record per-iteration gradient norms in the traces")
    parser.add_argument("--out", type=Path, required=True, help="output directory")


def _experiment_config(args, models, rates):
    base = TrainConfig(
        n_qubits=max(2, args.qubits[0]),
        lr_theta=args.lr_theta,
        lr_net=args.lr_net,
        max_iters=args.max_iters,
        target_loss=args.target_loss,
        depth=args.depth,
        log_base=args.log_base,
        log_grad_norms=args.log_grad_norms,
    )
    return ExperimentConfig(
        qubits=args.qubits,
        models=models,
        base=base,
        out_dir=args.out,
        runs_per_config=args.runs,
        noise_rates=rates,
        base_seed=args.seed,
    )


def main(argv=None):
    parser = argparse.ArgumentParser(prog="npid",
                                     description="NPID / NEQP / QV training experiments "
                                                 "on noisy random variational circuits")
    parser.add_argument("--backend", choices=("cython", "numpy"), default=None,
                        help="force a kernel backend (default: compiled if available)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="qubit sweep at a fixed noise rate")
    _add_common(p_run)
    p_run.add_argument("--models", type=_parse_models, default=MODEL_TAGS,
                       help="comma list from npid,neqp-s,neqp-l,qv (default all)")
    p_run.add_argument("--noise-rate", type=float, default=0.01)

    p_sweep = sub.add_parser("sweep-noise", help="noise-rate sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--models", type=_parse_models, default=("npid",),
                         help="comma list of models (default npid)")
    p_sweep.add_argument("--rates", type=_parse_rates, default=(0.03, 0.05, 0.07, 0.09),
                         help="comma list of noise rates")

    p_metrics = sub.add_parser("metrics", help="recompute summary.json from stored traces")
    p_metrics.add_argument("--in", dest="in_dir", type=Path, required=True)

    p_bench = sub.add_parser("bench", help="benchmark the kernel backends")
    p_bench.add_argument("--qubits", type=int, default=10)
    p_bench.add_argument("--depth", type=int, default=60)
    p_bench.add_argument("--repeat", type=int, default=5)

    args = parser.parse_args(argv)
    if args.backend is not None:
        backend.set_backend(args.backend)

    if args.command == "run":
        cfg = _experiment_config(args, args.models, (args.noise_rate,))
        summary = run_experiment(cfg)
        _print_headline(summary)
    elif args.command == "sweep-noise":
        cfg = _experiment_config(args, args.models, args.rates)
        summary = run_experiment(cfg)
        _print_headline(summary)
    elif args.command == "metrics":
        summary = recompute_summary(args.in_dir)
        write_summary(args.in_dir / "summary.json", summary)
        _print_headline(summary)
    elif args.command == "bench":
        from .bench import run_benchmark

        run_benchmark(n_qubits=args.qubits, depth=args.depth, repeat=args.repeat)
    return 0


def _print_headline(summary):
    print(f"backend: {backend.name}")
    for cell in summary["cells"]:
        mean_iters = cell.get("mean_iterations")
        shown = "n/a" if mean_iters is None else f"{mean_iters:.1f}"
        print(
            f"{cell['model']:7s} n={cell['n_qubits']:<2d} "
            f"rate={cell['noise_rate']:g} mean_iterations={shown}"
        )
    if summary["model_efficiency"]:
        print("convergence efficiency:",
              json.dumps(summary["model_efficiency"], sort_keys=True))
    for entry in summary["fluctuation"]:
        print(
            f"fluctuation {entry['model']} n={entry['n_qubits']}: "
            f"{entry['fluctuation_rate_pct']:.2f}%"
        )


if __name__ == "__main__":
    sys.exit(main())
