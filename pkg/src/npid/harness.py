"""Seeded experiment runner and metrics.

Sweeps (model, n_qubits, noise_rate, run_index) cells, executing one
train_loop per cell entry with seeds derived from a stable hash so any run is
individually replayable. Emits per-run loss traces as CSV, a deterministic
summary.json, and plot-ready CSV series (loss curves with mean +- population
std, iterations vs qubits, iterations vs noise rate).
"""

import csv
import hashlib
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .optim import MODEL_TAGS, RunRecord, TrainConfig, train_loop


@dataclass(frozen=True)
class ExperimentConfig:
    qubits: tuple
    models: tuple
    base: TrainConfig
    out_dir: Path
    runs_per_config: int = 5
    noise_rates: tuple = (0.01,)
    base_seed: int = 0

    def __post_init__(self):
        if self.runs_per_config < 1:
            raise ValueError("runs_per_config must be >= 1")
        if any(n < 2 for n in self.qubits):
            raise ValueError("qubit sizes must be >= 2")
        for m in self.models:
            if m not in MODEL_TAGS:
                raise ValueError(f"unknown model {m!r}")
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "noise_rates", tuple(float(r) for r in self.noise_rates))
        object.__setattr__(self, "out_dir", Path(self.out_dir))


def derive_seed(base_seed, model, n_qubits, noise_rate, run_index, stream):
    """Stable 63-bit child seed for one run, replayable from the config tuple."""
    key = f"{base_seed}|{model}|{n_qubits}|{format_rate(noise_rate)}|{run_index}|{stream}"
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") & 0x7FFFFFFFFFFFFFFF


def format_rate(rate):
    return f"{rate:g}"


def trace_filename(model, n_qubits, noise_rate, run_index):
    return f"trace_{model}_{n_qubits}_{format_rate(noise_rate)}_{run_index}.csv"


def iterations_to_convergence(record, max_iters):
    """Iterations the run needed; unconverged runs are valued at the cap."""
    if record.converged_at is None:
        return max_iters
    return record.converged_at + 1


def efficiency_from_iterations(iteration_counts, max_iters):
    """Mean of max_iters / conv over the given per-run iteration counts."""
    counts = list(iteration_counts)
    if not counts:
        raise ValueError("need at least one iteration count")
    return float(np.mean([max_iters / c for c in counts]))


def convergence_efficiency(records, max_iters):
    """Convergence efficiency over runs: avg of max_iters / iterations-needed."""
    if not records:
        raise ValueError("need at least one run record")
    return efficiency_from_iterations(
        (iterations_to_convergence(r, max_iters) for r in records), max_iters
    )


def fluctuation_rate(iterations):
    """Population standard deviation over mean, as a percentage."""
    values = np.asarray(list(iterations), dtype=np.float64)
    if values.size == 0:
        raise ValueError("need at least one value")
    mean = float(np.mean(values))
    if mean <= 0:
        raise ValueError("fluctuation rate needs a positive mean")
    return float(np.std(values) / mean * 100.0)


# --- trace CSV I/O (floats stored with full round-trip precision) ---


def write_trace(path, record):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if record.grad_norms is not None:
            writer.writerow(["iter", "loss", "grad_norm"])
            for i, (loss, gn) in enumerate(zip(record.losses, record.grad_norms)):
                writer.writerow([i, repr(float(loss)), repr(float(gn))])
        else:
            writer.writerow(["iter", "loss"])
            for i, loss in enumerate(record.losses):
                writer.writerow([i, repr(float(loss))])


def read_trace(path):
    """Return (losses, grad_norms-or-None) parsed from a trace CSV."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        has_grad = len(header) == 3
        losses = []
        grad_norms = [] if has_grad else None
        for row in reader:
            losses.append(float(row[1]))
            if has_grad:
                grad_norms.append(float(row[2]))
    losses = np.array(losses, dtype=np.float64)
    return losses, None if grad_norms is None else np.array(grad_norms, dtype=np.float64)


# --- experiment sweep ---


def _run_one(model, n, rate, run_index, cfg):
    circuit_seed = derive_seed(cfg.base_seed, model, n, rate, run_index, "circuit")
    param_seed = derive_seed(cfg.base_seed, model, n, rate, run_index, "params")
    train_cfg = replace(cfg.base, n_qubits=n, noise_rate=rate, seed=param_seed)
    record = train_loop(model, train_cfg, circuit_seed)
    return circuit_seed, param_seed, record


def run_experiment(cfg):
    """Execute the full sweep, write traces/summary/plots, return the summary."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = {}
    for model in cfg.models:
        for n in cfg.qubits:
            for rate in cfg.noise_rates:
                runs = []
                for run_index in range(cfg.runs_per_config):
                    try:
                        circuit_seed, param_seed, record = _run_one(model, n, rate, run_index, cfg)
                    except Exception as exc:  # record, keep sweeping
                        runs.append({"error": f"{type(exc).__name__}: {exc}", "record": None})
                        continue
                    write_trace(out_dir / trace_filename(model, n, rate, run_index), record)
                    runs.append(
                        {"circuit_seed": circuit_seed, "param_seed": param_seed, "record": record}
                    )
                results[(model, n, rate)] = runs
    summary = build_summary(cfg, results)
    write_summary(out_dir / "summary.json", summary)
    emit_plot_data(cfg, results, out_dir / "plots")
    return summary


def build_summary(cfg, results):
    """Deterministic summary structure for a finished sweep."""
    max_iters = cfg.base.max_iters
    cells = []
    per_model_counts = {m: [] for m in cfg.models}
    for model in cfg.models:
        for n in cfg.qubits:
            for rate in cfg.noise_rates:
                runs_out = []
                counts = []
                for run_index, entry in enumerate(results[(model, n, rate)]):
                    if entry["record"] is None:
                        runs_out.append({"run": run_index, "error": entry["error"]})
                        continue
                    record = entry["record"]
                    conv = iterations_to_convergence(record, max_iters)
                    counts.append(conv)
                    runs_out.append(
                        {
                            "run": run_index,
                            "circuit_seed": entry["circuit_seed"],
                            "param_seed": entry["param_seed"],
                            "iterations": conv,
                            "converged_at": record.converged_at,
                            "final_loss": float(record.losses[-1]),
                            "ratio": max_iters / conv,
                        }
                    )
                cell = {
                    "model": model,
                    "n_qubits": n,
                    "noise_rate": rate,
                    "runs": runs_out,
                }
                if counts:
                    cell["mean_iterations"] = float(np.mean(counts))
                    cell["efficiency"] = efficiency_from_iterations(counts, max_iters)
                    per_model_counts[model].extend(counts)
                cells.append(cell)
    model_efficiency = {
        m: efficiency_from_iterations(c, max_iters) for m, c in per_model_counts.items() if c
    }
    fluctuation = []
    if len(cfg.noise_rates) > 1:
        for model in cfg.models:
            for n in cfg.qubits:
                means = []
                for rate in cfg.noise_rates:
                    cell = next(
                        c
                        for c in cells
                        if c["model"] == model and c["n_qubits"] == n and c["noise_rate"] == rate
                    )
                    if "mean_iterations" in cell:
                        means.append(cell["mean_iterations"])
                if len(means) == len(cfg.noise_rates):
                    fluctuation.append(
                        {
                            "model": model,
                            "n_qubits": n,
                            "mean_iterations_per_rate": means,
                            "fluctuation_rate_pct": fluctuation_rate(means),
                        }
                    )
    return {
        "config": {
            "base_seed": cfg.base_seed,
            "qubits": list(cfg.qubits),
            "models": list(cfg.models),
            "runs_per_config": cfg.runs_per_config,
            "noise_rates": list(cfg.noise_rates),
            "max_iters": max_iters,
            "target_loss": cfg.base.target_loss,
            "lr_theta": cfg.base.lr_theta,
            "lr_net": cfg.base.lr_net,
            "depth": cfg.base.depth,
            "log_base": cfg.base.log_base,
            "log_grad_norms": cfg.base.log_grad_norms,
        },
        "cells": cells,
        "model_efficiency": model_efficiency,
        "fluctuation": fluctuation,
    }


def write_summary(path, summary):
    Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def recompute_summary(out_dir):
    """Rebuild the summary from stored traces plus the config block on disk."""
    out_dir = Path(out_dir)
    stored = json.loads((out_dir / "summary.json").read_text(encoding="utf-8"))
    conf = stored["config"]
    base = TrainConfig(
        n_qubits=max(2, conf["qubits"][0]),
        lr_theta=conf["lr_theta"],
        lr_net=conf["lr_net"],
        max_iters=conf["max_iters"],
        target_loss=conf["target_loss"],
        depth=conf.get("depth"),
        log_base=conf.get("log_base", math.e),
        log_grad_norms=conf.get("log_grad_norms", False),
    )
    cfg = ExperimentConfig(
        qubits=tuple(conf["qubits"]),
        models=tuple(conf["models"]),
        base=base,
        out_dir=out_dir,
        runs_per_config=conf["runs_per_config"],
        noise_rates=tuple(conf["noise_rates"]),
        base_seed=conf["base_seed"],
    )
    results = {}
    for model in cfg.models:
        for n in cfg.qubits:
            for rate in cfg.noise_rates:
                runs = []
                for run_index in range(cfg.runs_per_config):
                    path = out_dir / trace_filename(model, n, rate, run_index)
                    if not path.exists():
                        runs.append({"error": "trace file missing", "record": None})
                        continue
                    losses, grad_norms = read_trace(path)
                    below = np.nonzero(losses < conf["target_loss"])[0]
                    record = RunRecord(
                        losses=losses,
                        converged_at=int(below[0]) if below.size else None,
                        model_tag=model,
                        grad_norms=grad_norms,
                    )
                    runs.append(
                        {
                            "circuit_seed": derive_seed(
                                cfg.base_seed, model, n, rate, run_index, "circuit"
                            ),
                            "param_seed": derive_seed(
                                cfg.base_seed, model, n, rate, run_index, "params"
                            ),
                            "record": record,
                        }
                    )
                results[(model, n, rate)] = runs
    return build_summary(cfg, results)


# --- plot-ready CSV emission ---


def _padded_loss_matrix(records):
    """Stack loss traces, padding shorter runs with their final loss."""
    longest = max(len(r.losses) for r in records)
    rows = []
    for r in records:
        row = np.full(longest, r.losses[-1], dtype=np.float64)
        row[: len(r.losses)] = r.losses
        rows.append(row)
    return np.array(rows)


def emit_plot_data(cfg, results, plots_dir):
    """Write loss-curve and iteration-series CSVs for a finished sweep."""
    plots_dir = Path(plots_dir)
    plots_dir.mkdir(parents=True, exist_ok=True)
    max_iters = cfg.base.max_iters
    series = []
    for model in cfg.models:
        for n in cfg.qubits:
            for rate in cfg.noise_rates:
                records = [e["record"] for e in results[(model, n, rate)] if e["record"] is not None]
                if not records:
                    continue
                matrix = _padded_loss_matrix(records)
                mean = matrix.mean(axis=0)
                std = matrix.std(axis=0)  # population std across runs
                name = f"loss_curve_{model}_{n}_{format_rate(rate)}.csv"
                with open(plots_dir / name, "w", encoding="utf-8", newline="") as fh:
                    writer = csv.writer(fh)
                    writer.writerow(["iter", "mean_loss", "std_loss"])
                    for i in range(matrix.shape[1]):
                        writer.writerow([i, repr(float(mean[i])), repr(float(std[i]))])
                counts = [iterations_to_convergence(r, max_iters) for r in records]
                series.append((model, n, rate, float(np.mean(counts))))
    # Fig-5-style series (iterations vs qubits) and Fig-6-style (vs noise rate)
    for name, sort_key in (
        ("iters_vs_qubits.csv", lambda s: (s[0], s[2], s[1])),
        ("iters_vs_noise.csv", lambda s: (s[0], s[1], s[2])),
    ):
        with open(plots_dir / name, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model", "n_qubits", "noise_rate", "mean_iterations"])
            for model, n, rate, mean_iters in sorted(series, key=sort_key):
                writer.writerow([model, n, format_rate(rate), repr(mean_iters)])
