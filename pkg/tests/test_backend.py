"""Kernel backend selection and numerical parity between implementations."""

import numpy as np
import pytest

from npid import backend
from npid.circuit import build_random_circuit, random_input_state
from npid.grad import cost_at, gradient
from npid.kernels_numpy import KIND_CNOT, KIND_RX, KIND_RY, KIND_RZ


requires_compiled = pytest.mark.skipif(
    "cython" not in backend.available_backends(), reason="compiled kernels not built"
)


@pytest.fixture
def restore_backend():
    previous = backend.name
    yield
    backend.set_backend(previous)


def test_numpy_backend_always_available():
    assert "numpy" in backend.available_backends()


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        backend.set_backend("fortran")


def test_get_impl_does_not_touch_selection():
    impl = backend.get_impl("numpy")
    assert impl.__name__.endswith("kernels_numpy")
    assert backend.impl is not None


@requires_compiled
def test_rotation_kernels_agree(restore_backend):
    rng = np.random.default_rng(0)
    cy = backend.get_impl("cython")
    np_impl = backend.get_impl("numpy")
    for axis in (KIND_RX, KIND_RY, KIND_RZ):
        for _ in range(20):
            n = int(rng.integers(1, 7))
            target = int(rng.integers(0, n))
            angle = float(rng.uniform(-2 * np.pi, 2 * np.pi))
            amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
            a, b = amps.copy(), amps.copy()
            cy.apply_rot(a, axis, target, angle)
            np_impl.apply_rot(b, axis, target, angle)
            np.testing.assert_allclose(a, b, atol=1e-14)


@requires_compiled
def test_cnot_kernels_agree():
    rng = np.random.default_rng(1)
    cy = backend.get_impl("cython")
    np_impl = backend.get_impl("numpy")
    for _ in range(20):
        n = int(rng.integers(2, 7))
        control, target = (int(q) for q in rng.choice(n, size=2, replace=False))
        amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
        a, b = amps.copy(), amps.copy()
        cy.apply_cnot(a, control, target)
        np_impl.apply_cnot(b, control, target)
        np.testing.assert_array_equal(a, b)


@requires_compiled
def test_scalar_kernels_agree():
    rng = np.random.default_rng(2)
    cy = backend.get_impl("cython")
    np_impl = backend.get_impl("numpy")
    for _ in range(20):
        n = int(rng.integers(1, 7))
        dim = 1 << n
        amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        amps /= np.linalg.norm(amps)
        bra = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        weights = rng.uniform(0, 1, dim)
        target = int(rng.integers(0, n))
        assert cy.ground_prob(amps, target) == pytest.approx(
            np_impl.ground_prob(amps, target), abs=1e-13
        )
        assert cy.cost_value(amps, weights) == pytest.approx(
            np_impl.cost_value(amps, weights), abs=1e-13
        )
        for axis in (KIND_RX, KIND_RY, KIND_RZ):
            assert cy.rot_grad_term(bra, amps, axis, target) == pytest.approx(
                np_impl.rot_grad_term(bra, amps, axis, target), abs=1e-12
            )
        out_a = np.empty_like(amps)
        out_b = np.empty_like(amps)
        cy.scale_by_weights(out_a, amps, weights)
        np_impl.scale_by_weights(out_b, amps, weights)
        np.testing.assert_array_equal(out_a, out_b)


@requires_compiled
def test_gate_sequence_kernel_codes_cover_cnot():
    # direct check of the fused path including CNOT dispatch
    rng = np.random.default_rng(3)
    cy = backend.get_impl("cython")
    np_impl = backend.get_impl("numpy")
    n = 4
    kinds = np.array([KIND_RX, KIND_CNOT, KIND_RZ, KIND_CNOT, KIND_RY], dtype=np.int8)
    targets = np.array([0, 2, 3, 1, 2], dtype=np.int32)
    controls = np.array([-1, 0, -1, 3, -1], dtype=np.int32)
    angles = rng.uniform(-np.pi, np.pi, 5)
    amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    a, b = amps.copy(), amps.copy()
    cy.apply_gate_seq(a, kinds, targets, controls, angles)
    np_impl.apply_gate_seq(b, kinds, targets, controls, angles)
    np.testing.assert_allclose(a, b, atol=1e-14)


@requires_compiled
def test_full_gradient_parity_between_backends(restore_backend):
    spec = build_random_circuit(5, 4, seed=4)
    psi = random_input_state(5, 5)
    theta = np.random.default_rng(6).uniform(0, 2 * np.pi, spec.n_params)
    backend.set_backend("cython")
    g_cy = gradient(spec, theta, psi)
    c_cy = cost_at(spec, theta, psi)
    backend.set_backend("numpy")
    g_np = gradient(spec, theta, psi)
    c_np = cost_at(spec, theta, psi)
    assert np.max(np.abs(g_cy - g_np)) < 1e-12
    assert abs(c_cy - c_np) < 1e-13
