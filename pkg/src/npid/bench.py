"""Benchmark comparing the compiled and numpy kernel backends.

Times the three workloads that dominate training: full circuit execution,
cost evaluation, and the adjoint gradient. Run via `npid bench`.
"""

import time

import numpy as np

from . import backend
from .circuit import build_random_circuit, random_input_state
from .grad import cost_at, gradient


def _time_best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def run_benchmark(n_qubits=10, depth=60, repeat=5, seed=7):
    spec = build_random_circuit(n_qubits, depth, seed)
    psi_in = random_input_state(n_qubits, seed + 1)
    theta = np.random.default_rng(seed + 2).uniform(0, 2 * np.pi, spec.n_params)

    workloads = {
        "run_circuit + cost": lambda: cost_at(spec, theta, psi_in),
        "adjoint gradient": lambda: gradient(spec, theta, psi_in),
    }
    print(f"n_qubits={n_qubits} depth={depth} n_params={spec.n_params} "
          f"gates={spec.compiled[0].shape[0]}")
    previous = backend.name
    timings = {}
    try:
        for name in backend.available_backends():
            backend.set_backend(name)
            for label, fn in workloads.items():
                fn()  # warm up caches
                timings[(name, label)] = _time_best(fn, repeat)
    finally:
        backend.set_backend(previous)

    for label in workloads:
        line = f"{label:22s}"
        for name in backend.available_backends():
            line += f"  {name}: {timings[(name, label)] * 1e3:9.3f} ms"
        if ("cython", label) in timings and ("numpy", label) in timings:
            speedup = timings[("numpy", label)] / timings[("cython", label)]
            line += f"  speedup: {speedup:5.1f}x"
        print(line)
    return timings
