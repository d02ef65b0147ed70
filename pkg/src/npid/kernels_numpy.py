"""Pure-numpy statevector kernels.

Fallback implementation of the kernel interface shared with the compiled
extension (npid._kernels). All functions mutate `amps` in place unless noted;
`amps` is a 1-D complex128 array of length 2**n with qubit 0 as the
least-significant bit of the amplitude index.

Gate kind codes (shared with the compiled kernels): 0=Rx, 1=Ry, 2=Rz, 3=CNOT.
Rotations follow the half-angle convention Rk(theta) = exp(-i*theta*sigma_k/2).
"""

import numpy as np

KIND_RX = 0
KIND_RY = 1
KIND_RZ = 2
KIND_CNOT = 3


def _pair_view(amps, target):
    # axis 1 separates the target bit: index = hi*2^(t+1) + bit*2^t + lo
    return amps.reshape(-1, 2, 1 << target)


def apply_rot(amps, axis, target, angle):
    """Apply Rx/Ry/Rz (axis 0/1/2) on `target`, in place."""
    half = 0.5 * angle
    c = np.cos(half)
    s = np.sin(half)
    v = _pair_view(amps, target)
    if axis == KIND_RX:
        a0 = v[:, 0].copy()
        v[:, 0] = c * a0 - 1j * s * v[:, 1]
        v[:, 1] = c * v[:, 1] - 1j * s * a0
    elif axis == KIND_RY:
        a0 = v[:, 0].copy()
        v[:, 0] = c * a0 - s * v[:, 1]
        v[:, 1] = c * v[:, 1] + s * a0
    elif axis == KIND_RZ:
        v[:, 0] *= c - 1j * s
        v[:, 1] *= c + 1j * s
    else:
        raise ValueError(f"unknown rotation axis code {axis}")


def apply_cnot(amps, control, target):
    """Flip `target` where `control` is 1, in place."""
    n = amps.shape[0].bit_length() - 1
    t = amps.reshape([2] * n)
    # C-order: axis i corresponds to qubit n-1-i
    sel10 = [slice(None)] * n
    sel11 = [slice(None)] * n
    sel10[n - 1 - control] = 1
    sel11[n - 1 - control] = 1
    sel10[n - 1 - target] = 0
    sel11[n - 1 - target] = 1
    sel10, sel11 = tuple(sel10), tuple(sel11)
    tmp = t[sel10].copy()
    t[sel10] = t[sel11]
    t[sel11] = tmp


def apply_gate_seq(amps, kinds, targets, controls, angles):
    """Apply a flat gate sequence in order, in place."""
    for i in range(kinds.shape[0]):
        k = kinds[i]
        if k == KIND_CNOT:
            apply_cnot(amps, controls[i], targets[i])
        else:
            apply_rot(amps, k, targets[i], angles[i])


def ground_prob(amps, target):
    """Probability that `target` reads 0."""
    v = _pair_view(amps, target)[:, 0]
    return float(np.sum(v.real * v.real + v.imag * v.imag))


def cost_value(amps, weights):
    """Sum of weights[k] * |amps[k]|^2 (weights: real vector, same length)."""
    return float(np.dot(weights, amps.real * amps.real + amps.imag * amps.imag))


def scale_by_weights(out, amps, weights):
    """out = diag(weights) @ amps, elementwise."""
    np.multiply(amps, weights, out=out)


def rot_grad_term(bra, ket, axis, target):
    """2 * Im <bra| sigma_axis/2 on target |ket>  =  Im <bra| sigma |ket>."""
    bv = _pair_view(bra, target)
    kv = _pair_view(ket, target)
    if axis == KIND_RX:
        val = np.sum(np.conj(bv[:, 0]) * kv[:, 1]) + np.sum(np.conj(bv[:, 1]) * kv[:, 0])
    elif axis == KIND_RY:
        val = 1j * (np.sum(np.conj(bv[:, 1]) * kv[:, 0]) - np.sum(np.conj(bv[:, 0]) * kv[:, 1]))
    elif axis == KIND_RZ:
        val = np.sum(np.conj(bv[:, 0]) * kv[:, 0]) - np.sum(np.conj(bv[:, 1]) * kv[:, 1])
    else:
        raise ValueError(f"unknown rotation axis code {axis}")
    return float(val.imag)


def adjoint_sweep(ket, bra, kinds, targets, controls, angles, slots, grad_out):
    """Reverse pass of adjoint differentiation.

    On entry `ket` is the circuit output state and `bra` the observable-scaled
    output state. Unwinds the gate sequence on both while accumulating each
    rotation's derivative into grad_out[slot]. Both states are consumed.
    """
    for i in range(kinds.shape[0] - 1, -1, -1):
        k = kinds[i]
        if k == KIND_CNOT:
            apply_cnot(ket, controls[i], targets[i])
            apply_cnot(bra, controls[i], targets[i])
        else:
            grad_out[slots[i]] = rot_grad_term(bra, ket, k, targets[i])
            apply_rot(ket, k, targets[i], -angles[i])
            apply_rot(bra, k, targets[i], -angles[i])
