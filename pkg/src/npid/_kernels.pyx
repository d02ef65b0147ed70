# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled statevector kernels.

Hot-loop twin of npid.kernels_numpy: same function surface, same gate kind
codes (0=Rx, 1=Ry, 2=Rz, 3=CNOT), qubit 0 = least-significant bit. Selected
over the numpy kernels at import by npid.backend when built.
"""

from libc.math cimport cos, sin

import numpy as np


cdef inline void _rot_inplace(double complex[::1] amps, int axis, int target,
                              double angle) noexcept nogil:
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t step = 1 << target
    cdef Py_ssize_t block = step << 1
    cdef Py_ssize_t base = 0
    cdef Py_ssize_t off, i0, i1
    cdef double c = cos(0.5 * angle)
    cdef double s = sin(0.5 * angle)
    cdef double complex a0, a1, phase_m, phase_p
    if axis == 0:  # Rx: [[c, -is], [-is, c]]
        while base < dim:
            for off in range(step):
                i0 = base + off
                i1 = i0 + step
                a0 = amps[i0]
                a1 = amps[i1]
                amps[i0] = c * a0 - 1j * s * a1
                amps[i1] = c * a1 - 1j * s * a0
            base += block
    elif axis == 1:  # Ry: [[c, -s], [s, c]]
        while base < dim:
            for off in range(step):
                i0 = base + off
                i1 = i0 + step
                a0 = amps[i0]
                a1 = amps[i1]
                amps[i0] = c * a0 - s * a1
                amps[i1] = c * a1 + s * a0
            base += block
    else:  # Rz: diag(e^{-i a/2}, e^{+i a/2})
        phase_m = c - 1j * s
        phase_p = c + 1j * s
        while base < dim:
            for off in range(step):
                i0 = base + off
                i1 = i0 + step
                amps[i0] = phase_m * amps[i0]
                amps[i1] = phase_p * amps[i1]
            base += block


cdef inline void _cnot_inplace(double complex[::1] amps, int control,
                               int target) noexcept nogil:
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t cbit = 1 << control
    cdef Py_ssize_t tbit = 1 << target
    cdef Py_ssize_t k, partner
    cdef double complex tmp
    for k in range(dim):
        # visit each swapped pair once, from its target=0 member
        if (k & cbit) != 0 and (k & tbit) == 0:
            partner = k | tbit
            tmp = amps[k]
            amps[k] = amps[partner]
            amps[partner] = tmp


cdef inline double _grad_term(double complex[::1] bra, double complex[::1] ket,
                              int axis, int target) noexcept nogil:
    cdef Py_ssize_t dim = ket.shape[0]
    cdef Py_ssize_t step = 1 << target
    cdef Py_ssize_t block = step << 1
    cdef Py_ssize_t base = 0
    cdef Py_ssize_t off, i0, i1
    cdef double complex acc = 0
    if axis == 0:  # Im <bra| X |ket>
        while base < dim:
            for off in range(step):
                i0 = base + off
                i1 = i0 + step
                acc = acc + bra[i0].conjugate() * ket[i1] + bra[i1].conjugate() * ket[i0]
            base += block
    elif axis == 1:  # Im <bra| Y |ket>
        while base < dim:
            for off in range(step):
                i0 = base + off
                i1 = i0 + step
                acc = acc + 1j * (bra[i1].conjugate() * ket[i0] - bra[i0].conjugate() * ket[i1])
            base += block
    else:  # Im <bra| Z |ket>
        while base < dim:
            for off in range(step):
                i0 = base + off
                i1 = i0 + step
                acc = acc + bra[i0].conjugate() * ket[i0] - bra[i1].conjugate() * ket[i1]
            base += block
    return acc.imag


def apply_rot(double complex[::1] amps, int axis, int target, double angle):
    """Apply Rx/Ry/Rz (axis 0/1/2) on `target`, in place."""
    if axis < 0 or axis > 2:
        raise ValueError(f"unknown rotation axis code {axis}")
    _rot_inplace(amps, axis, target, angle)


def apply_cnot(double complex[::1] amps, int control, int target):
    """Flip `target` where `control` is 1, in place."""
    _cnot_inplace(amps, control, target)


def apply_gate_seq(double complex[::1] amps, signed char[::1] kinds,
                   int[::1] targets, int[::1] controls, double[::1] angles):
    """Apply a flat gate sequence in order, in place."""
    cdef Py_ssize_t n_gates = kinds.shape[0]
    cdef Py_ssize_t i
    cdef int k
    with nogil:
        for i in range(n_gates):
            k = kinds[i]
            if k == 3:
                _cnot_inplace(amps, controls[i], targets[i])
            else:
                _rot_inplace(amps, k, targets[i], angles[i])


def ground_prob(double complex[::1] amps, int target):
    """Probability that `target` reads 0."""
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t step = 1 << target
    cdef Py_ssize_t block = step << 1
    cdef Py_ssize_t base = 0
    cdef Py_ssize_t off, i0
    cdef double p = 0.0
    cdef double complex a
    with nogil:
        while base < dim:
            for off in range(step):
                i0 = base + off
                a = amps[i0]
                p += a.real * a.real + a.imag * a.imag
            base += block
    return p


def cost_value(double complex[::1] amps, double[::1] weights):
    """Sum of weights[k] * |amps[k]|^2."""
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t k
    cdef double acc = 0.0
    cdef double complex a
    with nogil:
        for k in range(dim):
            a = amps[k]
            acc += weights[k] * (a.real * a.real + a.imag * a.imag)
    return acc


def scale_by_weights(double complex[::1] out, double complex[::1] amps,
                     double[::1] weights):
    """out = diag(weights) @ amps, elementwise."""
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t k
    with nogil:
        for k in range(dim):
            out[k] = weights[k] * amps[k]


def rot_grad_term(double complex[::1] bra, double complex[::1] ket,
                  int axis, int target):
    """2 * Im <bra| sigma_axis/2 on target |ket>  =  Im <bra| sigma |ket>."""
    if axis < 0 or axis > 2:
        raise ValueError(f"unknown rotation axis code {axis}")
    return _grad_term(bra, ket, axis, target)


def adjoint_sweep(double complex[::1] ket, double complex[::1] bra,
                  signed char[::1] kinds, int[::1] targets, int[::1] controls,
                  double[::1] angles, int[::1] slots, double[::1] grad_out):
    """Reverse pass of adjoint differentiation; see kernels_numpy for contract."""
    cdef Py_ssize_t i
    cdef int k
    with nogil:
        for i in range(kinds.shape[0] - 1, -1, -1):
            k = kinds[i]
            if k == 3:
                _cnot_inplace(ket, controls[i], targets[i])
                _cnot_inplace(bra, controls[i], targets[i])
            else:
                grad_out[slots[i]] = _grad_term(bra, ket, k, targets[i])
                _rot_inplace(ket, k, targets[i], -angles[i])
                _rot_inplace(bra, k, targets[i], -angles[i])
