"""MLP construction, forward/backward, SGD, and serialization."""

import numpy as np
import pytest

from npid.neural import (
    IDENTITY,
    SOFTPLUS,
    Mlp,
    MlpGradient,
    backward,
    forward,
    mlp_from_json,
    mlp_new,
    mlp_to_json,
    sgd_step,
)


def small_mlp(dims, activation=IDENTITY, seed=0):
    rng = np.random.default_rng(seed)
    weights = [rng.standard_normal((o, i)) * 0.5 for i, o in zip(dims[:-1], dims[1:])]
    biases = [rng.standard_normal(o) * 0.1 for o in dims[1:]]
    return Mlp(layer_dims=dims, weights=weights, biases=biases, output_activation=activation)


def test_architectures_match_table():
    npid_net = mlp_new("npid", 0, seed=0)
    assert npid_net.layer_dims == [4, 32, 64, 3]
    assert npid_net.output_activation == SOFTPLUS
    s = mlp_new("neqp-s", 1235, seed=0)
    assert s.layer_dims == [4, 32, 64, 1235]
    assert s.output_activation == IDENTITY
    large = mlp_new("neqp-l", 8568, seed=0)
    assert large.layer_dims == [32, 256, 256, 8568]
    assert large.output_activation == IDENTITY


def test_mlp_new_rejects_bad_inputs():
    with pytest.raises(ValueError):
        mlp_new("neqp-s", 0, seed=0)
    with pytest.raises(ValueError):
        mlp_new("other", 10, seed=0)


def test_mlp_new_initialization_bounds():
    net = mlp_new("npid", 0, seed=5)
    for w, (fan_in, fan_out) in zip(net.weights, zip(net.layer_dims[:-1], net.layer_dims[1:])):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        assert np.max(np.abs(w)) <= bound
    for b in net.biases:
        assert np.all(b == 0.0)


def test_forward_zero_npid_net_outputs_ln2():
    net = mlp_new("npid", 0, seed=0)
    for w in net.weights:
        w[:] = 0.0
    out = forward(net, np.array([0.3, 0.3, 0.6, 0.0]))
    np.testing.assert_allclose(out, np.log(2.0), atol=1e-15)


def test_forward_zero_identity_net_outputs_zero():
    net = mlp_new("neqp-s", 7, seed=0)
    for w in net.weights:
        w[:] = 0.0
    out = forward(net, np.array([1.0, -2.0, 0.5, 3.0]))
    np.testing.assert_array_equal(out, np.zeros(7))


def test_forward_single_affine_identity():
    net = Mlp(layer_dims=[1, 1], weights=[np.array([[1.0]])], biases=[np.zeros(1)],
              output_activation=IDENTITY)
    assert forward(net, np.array([0.5]))[0] == 0.5


def test_forward_dimension_check():
    net = mlp_new("npid", 0, seed=0)
    with pytest.raises(ValueError):
        forward(net, np.zeros(3))


def test_forward_deterministic():
    net = mlp_new("npid", 0, seed=3)
    x = np.array([0.1, 0.1, 0.2, 0.0])
    np.testing.assert_array_equal(forward(net, x), forward(net, x))


def test_softplus_outputs_strictly_positive():
    rng = np.random.default_rng(9)
    for seed in range(10):
        net = mlp_new("npid", 0, seed=seed)
        out = forward(net, rng.uniform(-2, 2, size=4))
        assert np.all(out > 0)


def test_backward_requires_forward():
    net = mlp_new("npid", 0, seed=0)
    with pytest.raises(RuntimeError):
        backward(net, np.zeros(3))


def test_backward_zero_output_grad_gives_zero_grads():
    net = small_mlp([4, 8, 8, 3], activation=SOFTPLUS, seed=1)
    forward(net, np.array([0.2, -0.4, 0.6, 0.1]))
    grads = backward(net, np.zeros(3))
    assert all(np.all(dw == 0) for dw in grads.d_weights)
    assert all(np.all(db == 0) for db in grads.d_biases)


def test_backward_softplus_slope_at_zero():
    # out = softplus(w*x + b); at z=0 the chain factor is sigmoid(0) = 0.5
    net = Mlp(layer_dims=[1, 1], weights=[np.array([[1.0]])], biases=[np.zeros(1)],
              output_activation=SOFTPLUS)
    forward(net, np.array([0.0]))
    grads = backward(net, np.array([1.0]))
    assert grads.d_biases[0][0] == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("activation", [IDENTITY, SOFTPLUS])
def test_backward_matches_finite_differences(activation):
    net = small_mlp([4, 8, 8, 3], activation=activation, seed=2)
    x = np.array([0.3, -0.2, 0.8, -0.5])
    output_grad = np.array([0.7, -1.1, 0.4])

    def objective():
        return float(np.dot(forward(net, x), output_grad))

    forward(net, x)
    grads = backward(net, output_grad)
    h = 1e-6
    for layer in range(len(net.weights)):
        w = net.weights[layer]
        for idx in np.ndindex(w.shape):
            orig = w[idx]
            w[idx] = orig + h
            plus = objective()
            w[idx] = orig - h
            minus = objective()
            w[idx] = orig
            assert grads.d_weights[layer][idx] == pytest.approx(
                (plus - minus) / (2 * h), abs=1e-6
            )
        b = net.biases[layer]
        for i in range(b.shape[0]):
            orig = b[i]
            b[i] = orig + h
            plus = objective()
            b[i] = orig - h
            minus = objective()
            b[i] = orig
            assert grads.d_biases[layer][i] == pytest.approx((plus - minus) / (2 * h), abs=1e-6)


def test_sgd_step_zero_grads_is_identity():
    net = small_mlp([2, 3, 2], seed=4)
    before = [w.copy() for w in net.weights]
    grads = MlpGradient(
        d_weights=[np.zeros_like(w) for w in net.weights],
        d_biases=[np.zeros_like(b) for b in net.biases],
    )
    sgd_step(net, grads, lr=0.5)
    for w, old in zip(net.weights, before):
        np.testing.assert_array_equal(w, old)


def test_sgd_step_arithmetic():
    net = Mlp(layer_dims=[1, 1], weights=[np.array([[0.5]])], biases=[np.zeros(1)],
              output_activation=IDENTITY)
    grads = MlpGradient(d_weights=[np.array([[0.2]])], d_biases=[np.zeros(1)])
    sgd_step(net, grads, lr=1.0)
    assert net.weights[0][0, 0] == pytest.approx(0.3, abs=1e-15)


def test_sgd_two_steps_equal_summed_grads():
    net_a = small_mlp([3, 5, 2], seed=6)
    net_b = small_mlp([3, 5, 2], seed=6)
    rng = np.random.default_rng(7)
    g1 = MlpGradient(
        d_weights=[rng.standard_normal(w.shape) for w in net_a.weights],
        d_biases=[rng.standard_normal(b.shape) for b in net_a.biases],
    )
    g2 = MlpGradient(
        d_weights=[rng.standard_normal(w.shape) for w in net_a.weights],
        d_biases=[rng.standard_normal(b.shape) for b in net_a.biases],
    )
    sgd_step(net_a, g1, lr=0.1)
    sgd_step(net_a, g2, lr=0.1)
    summed = MlpGradient(
        d_weights=[a + b for a, b in zip(g1.d_weights, g2.d_weights)],
        d_biases=[a + b for a, b in zip(g1.d_biases, g2.d_biases)],
    )
    sgd_step(net_b, summed, lr=0.1)
    for wa, wb in zip(net_a.weights, net_b.weights):
        np.testing.assert_allclose(wa, wb, atol=1e-12)


def test_sgd_step_rejects_nonpositive_lr():
    net = small_mlp([2, 2], seed=8)
    grads = MlpGradient(
        d_weights=[np.zeros_like(w) for w in net.weights],
        d_biases=[np.zeros_like(b) for b in net.biases],
    )
    with pytest.raises(ValueError):
        sgd_step(net, grads, lr=0.0)


def test_json_round_trip():
    net = mlp_new("npid", 0, seed=11)
    restored = mlp_from_json(mlp_to_json(net))
    assert restored.layer_dims == net.layer_dims
    assert restored.output_activation == net.output_activation
    for a, b in zip(net.weights, restored.weights):
        np.testing.assert_array_equal(a, b)
    x = np.array([0.2, 0.2, 0.4, 0.0])
    np.testing.assert_array_equal(forward(net, x), forward(restored, x))
