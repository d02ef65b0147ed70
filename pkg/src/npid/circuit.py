"""Seed-deterministic random states, random layered circuits, and execution.

Layer layout: every qubit gets one opening rotation (kind drawn from
{Rx, Ry, Rz}), then floor(n/2) disjoint qubit pairs are drawn (one qubit
idles when n is odd); each pair gets CNOT(control, target) followed by Rx on
the control and Rz on the target. Parameter slots are numbered in gate
application order, so n_params = depth * (n + 2*floor(n/2)).
"""

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import backend
from .qsim import GateKind, Statevector, cnot, rotation

_ROTATION_KINDS = (GateKind.RX, GateKind.RY, GateKind.RZ)


@dataclass(frozen=True)
class NoiseModel:
    """Parameter perturbation theta_hat = theta + rate * alpha.

    alpha is resampled (standard normal per entry) at every cost/gradient
    evaluation; rate = 0 leaves parameters untouched.
    """

    rate: float = 0.0

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("noise rate must be >= 0")


@dataclass(frozen=True)
class LayerSpec:
    """One circuit layer: opening rotations, CNOT pairings, post rotations."""

    opening_rotations: tuple
    pairings: tuple
    post_rotations: tuple

    def gates(self):
        yield from self.opening_rotations
        for i, (control, target) in enumerate(self.pairings):
            yield cnot(control, target)
            yield self.post_rotations[2 * i]
            yield self.post_rotations[2 * i + 1]


@dataclass
class CircuitSpec:
    """Fixed gate structure of a layered circuit; angles live in a ParamVector."""

    n_qubits: int
    layers: tuple
    n_params: int

    def __post_init__(self):
        self.layers = tuple(self.layers)
        self.validate()

    def validate(self):
        slots = []
        n_rotations = 0
        for layer in self.layers:
            if len(layer.opening_rotations) != self.n_qubits:
                raise ValueError("opening rotations must cover every qubit exactly once")
            if {g.target for g in layer.opening_rotations} != set(range(self.n_qubits)):
                raise ValueError("opening rotations must cover every qubit exactly once")
            paired = [q for pair in layer.pairings for q in pair]
            if len(paired) != 2 * len(layer.pairings) or len(set(paired)) != len(paired):
                raise ValueError("pairings must be disjoint")
            if len(layer.pairings) != self.n_qubits // 2:
                raise ValueError(f"expected {self.n_qubits // 2} pairings per layer")
            if len(layer.post_rotations) != 2 * len(layer.pairings):
                raise ValueError("each pairing needs exactly two post rotations")
            for gate in layer.gates():
                gate.validate_indices(self.n_qubits)
                if gate.kind.is_rotation:
                    n_rotations += 1
                    slots.append(gate.param_slot)
        if n_rotations != self.n_params:
            raise ValueError(f"n_params={self.n_params} but found {n_rotations} rotation gates")
        if sorted(slots) != list(range(self.n_params)):
            raise ValueError("param slots must cover 0..n_params-1 exactly once")

    def gates(self):
        for layer in self.layers:
            yield from layer.gates()

    @cached_property
    def compiled(self):
        """Flat (kinds, targets, controls, slots) arrays for the kernel layer."""
        gates = list(self.gates())
        kinds = np.array([g.kind.code for g in gates], dtype=np.int8)
        targets = np.array([g.target for g in gates], dtype=np.int32)
        controls = np.array([g.control for g in gates], dtype=np.int32)
        slots = np.array([g.param_slot for g in gates], dtype=np.int32)
        return kinds, targets, controls, slots

    def gate_angles(self, theta):
        """Per-gate angle array for parameter vector `theta` (0 for CNOTs)."""
        _, _, _, slots = self.compiled
        angles = np.zeros(slots.shape[0], dtype=np.float64)
        mask = slots >= 0
        angles[mask] = theta[slots[mask]]
        return angles


def input_state_from_angles(n_qubits, angles):
    """Product state prod_q Rz(a_{q,2}) Ry(a_{q,1}) Rx(a_{q,0}) |0>^n.

    `angles` has shape (n_qubits, 3) ordered (Rx, Ry, Rz) per qubit.
    """
    angles = np.asarray(angles, dtype=np.float64)
    if angles.shape != (n_qubits, 3):
        raise ValueError(f"expected angle array of shape ({n_qubits}, 3)")
    state = Statevector.zero_state(n_qubits)
    amps = state.amplitudes
    for q in range(n_qubits):
        backend.impl.apply_rot(amps, 0, q, angles[q, 0])
        backend.impl.apply_rot(amps, 1, q, angles[q, 1])
        backend.impl.apply_rot(amps, 2, q, angles[q, 2])
    return state


def random_input_state(n_qubits, seed):
    """Random product state with all 3n rotation angles uniform on [0, 2pi)."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=(n_qubits, 3))
    return input_state_from_angles(n_qubits, angles)


def depth_schedule(n_qubits, log_base=math.e):
    """Circuit depth floor(n^2 * log(n)); natural log by default."""
    if n_qubits < 2:
        raise ValueError("depth schedule needs n_qubits >= 2")
    if log_base <= 1:
        raise ValueError("log base must be > 1")
    return int(math.floor(n_qubits * n_qubits * (math.log(n_qubits) / math.log(log_base))))


def build_random_circuit(n_qubits, depth, seed):
    """Seed-deterministic layered random circuit (see module docstring)."""
    if n_qubits < 2:
        raise ValueError("random circuits need n_qubits >= 2")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rng = np.random.default_rng(seed)
    layers = []
    slot = 0
    for _ in range(depth):
        kinds = rng.integers(0, 3, size=n_qubits)
        perm = rng.permutation(n_qubits)
        opening = []
        for q in range(n_qubits):
            opening.append(rotation(_ROTATION_KINDS[kinds[q]], q, slot))
            slot += 1
        pairings = []
        post = []
        for i in range(n_qubits // 2):
            control = int(perm[2 * i])
            target = int(perm[2 * i + 1])
            pairings.append((control, target))
            post.append(rotation(GateKind.RX, control, slot))
            slot += 1
            post.append(rotation(GateKind.RZ, target, slot))
            slot += 1
        layers.append(LayerSpec(tuple(opening), tuple(pairings), tuple(post)))
    return CircuitSpec(n_qubits=n_qubits, layers=tuple(layers), n_params=slot)


def perturb_params(theta, noise, rng):
    """Return theta + rate * alpha with alpha ~ N(0,1) per entry, fresh each call."""
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta must be finite")
    if noise.rate == 0.0:
        return theta.copy()
    return theta + noise.rate * rng.standard_normal(theta.shape[0])


def run_circuit(spec, theta_hat, psi_in):
    """Apply all gates of `spec` with angles from `theta_hat` to `psi_in`."""
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    if theta_hat.shape != (spec.n_params,):
        raise ValueError(f"expected {spec.n_params} parameters, got shape {theta_hat.shape}")
    if psi_in.n_qubits != spec.n_qubits:
        raise ValueError(
            f"state has {psi_in.n_qubits} qubits but circuit expects {spec.n_qubits}"
        )
    kinds, targets, controls, _ = spec.compiled
    amps = psi_in.amplitudes.copy()
    backend.impl.apply_gate_seq(amps, kinds, targets, controls, spec.gate_angles(theta_hat))
    return Statevector(spec.n_qubits, amps)


# --- JSON serialization (audit/replay format, documented in the README) ---


def circuit_to_json(spec):
    layers = []
    for layer in spec.layers:
        layers.append(
            {
                "opening_rotations": [
                    {"kind": g.kind.value, "target": g.target, "param_slot": g.param_slot}
                    for g in layer.opening_rotations
                ],
                "pairings": [list(p) for p in layer.pairings],
                "post_rotations": [
                    {"kind": g.kind.value, "target": g.target, "param_slot": g.param_slot}
                    for g in layer.post_rotations
                ],
            }
        )
    doc = {"n_qubits": spec.n_qubits, "n_params": spec.n_params, "layers": layers}
    return json.dumps(doc, indent=2, sort_keys=True)


def circuit_from_json(text):
    doc = json.loads(text)

    def _rot(entry):
        return rotation(GateKind(entry["kind"]), entry["target"], entry["param_slot"])

    layers = []
    for layer in doc["layers"]:
        layers.append(
            LayerSpec(
                tuple(_rot(e) for e in layer["opening_rotations"]),
                tuple((int(c), int(t)) for c, t in layer["pairings"]),
                tuple(_rot(e) for e in layer["post_rotations"]),
            )
        )
    return CircuitSpec(n_qubits=doc["n_qubits"], layers=tuple(layers), n_params=doc["n_params"])
