"""Cost function and exact parameter gradients.

The cost is 1 - mean ground probability over all qubits, which equals the
expectation of the diagonal observable M with M[k,k] = popcount(k)/n. The
production gradient path is adjoint differentiation (one forward pass plus
one reverse sweep); parameter-shift and central finite differences are kept
as independent oracles.
"""

import numpy as np

from . import backend
from .circuit import run_circuit

_NORM_TOL = 1e-6
_weight_cache = {}


def cost_weights(n_qubits):
    """Diagonal of the cost observable: popcount(k)/n for each basis index."""
    weights = _weight_cache.get(n_qubits)
    if weights is None:
        indices = np.arange(1 << n_qubits, dtype=np.uint64)
        weights = np.bitwise_count(indices).astype(np.float64) / n_qubits
        _weight_cache[n_qubits] = weights
    return weights


def cost(psi_out):
    """Loss in [0, 1]: one minus the per-qubit average ground probability."""
    amps = psi_out.amplitudes
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > _NORM_TOL:
        raise ValueError(f"state is not normalized (norm {norm:.9f})")
    return backend.impl.cost_value(amps, cost_weights(psi_out.n_qubits))


def cost_at(spec, theta_hat, psi_in):
    """Cost of running `spec` at `theta_hat` on `psi_in`."""
    return cost(run_circuit(spec, theta_hat, psi_in))


def gradient(spec, theta_hat, psi_in):
    """Exact d(cost)/d(theta) for every slot, via the adjoint reverse sweep.

    For each rotation U(t) = exp(-i*t*H) the derivative contribution is
    2*Im<b|H|k> with k the forward state after the gate and b the
    observable-propagated state; CNOTs are unwound with no contribution.
    """
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    if theta_hat.shape != (spec.n_params,):
        raise ValueError(f"expected {spec.n_params} parameters, got shape {theta_hat.shape}")
    ket = run_circuit(spec, theta_hat, psi_in).amplitudes
    bra = np.empty_like(ket)
    backend.impl.scale_by_weights(bra, ket, cost_weights(spec.n_qubits))
    kinds, targets, controls, slots = spec.compiled
    grad = np.zeros(spec.n_params, dtype=np.float64)
    backend.impl.adjoint_sweep(
        ket, bra, kinds, targets, controls, spec.gate_angles(theta_hat), slots, grad
    )
    return grad


def parameter_shift_gradient(spec, theta_hat, psi_in):
    """Oracle gradient: [L(t + pi/2) - L(t - pi/2)] / 2 per slot.

    Exact for half-angle rotations; costs 2*n_params circuit runs.
    """
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    if theta_hat.shape != (spec.n_params,):
        raise ValueError(f"expected {spec.n_params} parameters, got shape {theta_hat.shape}")
    grad = np.zeros(spec.n_params, dtype=np.float64)
    shifted = theta_hat.copy()
    for i in range(spec.n_params):
        shifted[i] = theta_hat[i] + np.pi / 2
        plus = cost_at(spec, shifted, psi_in)
        shifted[i] = theta_hat[i] - np.pi / 2
        minus = cost_at(spec, shifted, psi_in)
        shifted[i] = theta_hat[i]
        grad[i] = (plus - minus) / 2.0
    return grad


def finite_diff_gradient(spec, theta_hat, psi_in, h=1e-5):
    """Oracle gradient: central differences with step `h` (radians)."""
    if h <= 0:
        raise ValueError("finite-difference step h must be positive")
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    if theta_hat.shape != (spec.n_params,):
        raise ValueError(f"expected {spec.n_params} parameters, got shape {theta_hat.shape}")
    grad = np.zeros(spec.n_params, dtype=np.float64)
    shifted = theta_hat.copy()
    for i in range(spec.n_params):
        shifted[i] = theta_hat[i] + h
        plus = cost_at(spec, shifted, psi_in)
        shifted[i] = theta_hat[i] - h
        minus = cost_at(spec, shifted, psi_in)
        shifted[i] = theta_hat[i]
        grad[i] = (plus - minus) / (2.0 * h)
    return grad
