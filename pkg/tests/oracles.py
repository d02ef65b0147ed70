"""Independent dense-matrix reference used by the simulator tests.

Builds explicit 2^n x 2^n operators with kron products only; shares no code
path with the kernel layer it checks. Qubit 0 is the least-significant bit
of the basis index, so a gate on qubit q is kron(I_high, U, I_low) with
I_low of dimension 2^q.
"""

import numpy as np

_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_SIGMA = {"rx": _X, "ry": _Y, "rz": _Z}


def rotation_2x2(kind, theta):
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * _SIGMA[kind]


def embed(op, qubit, n_qubits):
    return np.kron(np.kron(np.eye(1 << (n_qubits - 1 - qubit)), op), np.eye(1 << qubit))


def cnot_matrix(control, target, n_qubits):
    return embed(_P0, control, n_qubits) + embed(_P1, control, n_qubits) @ embed(
        _X, target, n_qubits
    )


def circuit_unitary(spec, theta):
    """Full 2^n x 2^n unitary of a CircuitSpec at parameter vector theta."""
    dim = 1 << spec.n_qubits
    u = np.eye(dim, dtype=complex)
    for gate in spec.gates():
        if gate.kind.value == "cnot":
            u = cnot_matrix(gate.control, gate.target, spec.n_qubits) @ u
        else:
            u = embed(rotation_2x2(gate.kind.value, theta[gate.param_slot]), gate.target,
                      spec.n_qubits) @ u
    return u


def random_state(n_qubits, rng):
    amps = rng.standard_normal(1 << n_qubits) + 1j * rng.standard_normal(1 << n_qubits)
    return amps / np.linalg.norm(amps)
