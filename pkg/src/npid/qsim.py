"""Exact statevector simulation of Rx/Ry/Rz/CNOT circuits.

Conventions (used throughout the package):
  - qubit 0 is the least-significant bit of the amplitude index, so basis
    state |q_{n-1} ... q_1 q_0> sits at index sum(q_i * 2^i)
  - rotations use the half-angle convention Rk(theta) = exp(-i*theta*sigma_k/2)
  - expectations are exact (no sampling)
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import backend

RX, RY, RZ, CNOT_CODE = 0, 1, 2, 3


class GateKind(Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CNOT = "cnot"

    @property
    def is_rotation(self):
        return self is not GateKind.CNOT

    @property
    def code(self):
        return _KIND_CODE[self]


_KIND_CODE = {GateKind.RX: RX, GateKind.RY: RY, GateKind.RZ: RZ, GateKind.CNOT: CNOT_CODE}

# Pauli matrices, for the 2x2 linearization check
_SIGMA = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass
class Statevector:
    """Amplitudes of an n-qubit pure state (length 2**n_qubits)."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes for {self.n_qubits} qubits, "
                f"got shape {self.amplitudes.shape}"
            )

    @classmethod
    def zero_state(cls, n_qubits):
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def copy(self):
        return Statevector(self.n_qubits, self.amplitudes.copy())


@dataclass(frozen=True)
class Gate:
    """One circuit gate: a parameterized rotation or a CNOT.

    Rotations carry exactly one param_slot (index into the circuit's
    parameter vector); CNOT carries a control and no slot.
    """

    kind: GateKind
    target: int
    control: int = field(default=-1)
    param_slot: int = field(default=-1)

    def __post_init__(self):
        if self.kind.is_rotation:
            if self.param_slot < 0:
                raise ValueError(f"{self.kind.value} gate needs a param_slot")
            if self.control >= 0:
                raise ValueError("rotation gates take no control qubit")
        else:
            if self.param_slot >= 0:
                raise ValueError("CNOT references no param slot")
            if self.control < 0:
                raise ValueError("CNOT needs a control qubit")
            if self.control == self.target:
                raise ValueError("CNOT control and target must differ")

    def validate_indices(self, n_qubits):
        if not 0 <= self.target < n_qubits:
            raise ValueError(f"target {self.target} out of range for {n_qubits} qubits")
        if self.kind is GateKind.CNOT and not 0 <= self.control < n_qubits:
            raise ValueError(f"control {self.control} out of range for {n_qubits} qubits")


def rotation(kind, target, param_slot):
    return Gate(kind=kind, target=target, param_slot=param_slot)


def cnot(control, target):
    return Gate(kind=GateKind.CNOT, target=target, control=control)


def apply_gate(state, gate, angle=None):
    """Return U_gate |state>; `angle` (radians) required iff gate rotates."""
    gate.validate_indices(state.n_qubits)
    if gate.kind.is_rotation:
        if angle is None:
            raise ValueError(f"{gate.kind.value} gate requires an angle")
    elif angle is not None:
        raise ValueError("CNOT takes no angle")
    amps = state.amplitudes.copy()
    if gate.kind is GateKind.CNOT:
        backend.impl.apply_cnot(amps, gate.control, gate.target)
    else:
        backend.impl.apply_rot(amps, gate.kind.code, gate.target, float(angle))
    return Statevector(state.n_qubits, amps)


def ground_prob(state, qubit):
    """Exact probability that `qubit` measures |0> (state assumed normalized)."""
    if not 0 <= qubit < state.n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {state.n_qubits} qubits")
    return backend.impl.ground_prob(state.amplitudes, qubit)


def rotation_matrix(axis, theta):
    """2x2 matrix exp(-i*theta*sigma_axis/2), axis in {"X","Y","Z"}."""
    sigma = _SIGMA[axis]
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * sigma


def linearization_residual(axis, theta, dtheta):
    """Operator 2-norm of U(theta+dtheta) - [U(theta) - i*dtheta*H*U(theta)].

    H = sigma_axis/2 is the rotation generator; the residual measures how far
    the first-order expansion of the gate is from the exact gate.
    """
    if dtheta == 0:
        raise ValueError("dtheta must be nonzero")
    h = _SIGMA[axis] / 2
    u = rotation_matrix(axis, theta)
    diff = rotation_matrix(axis, theta + dtheta) - (u - 1j * dtheta * (h @ u))
    return float(np.linalg.svd(diff, compute_uv=False)[0])
