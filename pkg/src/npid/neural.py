"""Minimal fully connected network with Tanh hidden layers and plain SGD.

Three fixed architectures:
  - "npid":   [4, 32, 64, 3] with a Softplus output head (positive PID gains)
  - "neqp-s": [4, 32, 64, n_params], linear output
  - "neqp-l": [32, 256, 256, n_params], linear output

Weights are initialized uniform on +-sqrt(6/(fan_in+fan_out)), biases zero.
forward() caches pre-activations so backward() can run reverse-mode over a
caller-supplied output gradient.
"""

import json
from dataclasses import dataclass, field

import numpy as np

SOFTPLUS = "softplus"
IDENTITY = "identity"

ARCHITECTURES = ("npid", "neqp-s", "neqp-l")


@dataclass
class Mlp:
    layer_dims: list
    weights: list
    biases: list
    output_activation: str = IDENTITY
    _cache: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.output_activation not in (SOFTPLUS, IDENTITY):
            raise ValueError(f"unknown output activation {self.output_activation!r}")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_dims[i + 1], self.layer_dims[i])
            if w.shape != expected:
                raise ValueError(f"weight {i} has shape {w.shape}, expected {expected}")
            if b.shape != (self.layer_dims[i + 1],):
                raise ValueError(f"bias {i} has shape {b.shape}")


@dataclass
class MlpGradient:
    d_weights: list
    d_biases: list


def _softplus(x):
    # stable form of ln(1 + e^x)
    return np.logaddexp(0.0, x)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def mlp_new(architecture, circuit_n_params, seed):
    """Build one of the three fixed architectures, seeded."""
    if architecture == "npid":
        dims = [4, 32, 64, 3]
        activation = SOFTPLUS
    elif architecture == "neqp-s":
        dims = [4, 32, 64, circuit_n_params]
        activation = IDENTITY
    elif architecture == "neqp-l":
        dims = [32, 256, 256, circuit_n_params]
        activation = IDENTITY
    else:
        raise ValueError(f"unknown architecture {architecture!r} (expected one of {ARCHITECTURES})")
    if architecture != "npid" and circuit_n_params < 1:
        raise ValueError("circuit_n_params must be positive for NEQP networks")
    rng = np.random.default_rng(seed)
    weights = []
    biases = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(layer_dims=dims, weights=weights, biases=biases, output_activation=activation)


def forward(mlp, x):
    """Run the network on one input vector; caches activations for backward."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (mlp.layer_dims[0],):
        raise ValueError(f"input has shape {x.shape}, expected ({mlp.layer_dims[0]},)")
    activations = [x]
    pre_activations = []
    a = x
    last = len(mlp.weights) - 1
    for i, (w, b) in enumerate(zip(mlp.weights, mlp.biases)):
        z = w @ a + b
        pre_activations.append(z)
        if i < last:
            a = np.tanh(z)
        elif mlp.output_activation == SOFTPLUS:
            a = _softplus(z)
        else:
            a = z
        activations.append(a)
    mlp._cache = {"activations": activations, "pre_activations": pre_activations}
    return a


def backward(mlp, output_grad):
    """Gradients of (output . output_grad) w.r.t. every weight and bias.

    Requires a cached forward pass; does not consume the cache, so several
    backward calls may reuse one forward.
    """
    if mlp._cache is None:
        raise RuntimeError("backward called before forward")
    output_grad = np.asarray(output_grad, dtype=np.float64)
    if output_grad.shape != (mlp.layer_dims[-1],):
        raise ValueError(f"output_grad has shape {output_grad.shape}")
    activations = mlp._cache["activations"]
    pre_activations = mlp._cache["pre_activations"]
    if mlp.output_activation == SOFTPLUS:
        delta = output_grad * _sigmoid(pre_activations[-1])
    else:
        delta = output_grad
    d_weights = [None] * len(mlp.weights)
    d_biases = [None] * len(mlp.biases)
    for i in range(len(mlp.weights) - 1, -1, -1):
        d_weights[i] = np.outer(delta, activations[i])
        d_biases[i] = delta
        if i > 0:
            # tanh'(z) = 1 - tanh(z)^2, and activations[i] = tanh(z_i)
            delta = (mlp.weights[i].T @ delta) * (1.0 - activations[i] ** 2)
    return MlpGradient(d_weights=d_weights, d_biases=d_biases)


def sgd_step(mlp, grads, lr):
    """Plain SGD: w <- w - lr * dw, b <- b - lr * db (in place)."""
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    for w, dw in zip(mlp.weights, grads.d_weights):
        w -= lr * dw
    for b, db in zip(mlp.biases, grads.d_biases):
        b -= lr * db
    return mlp


def mlp_to_json(mlp):
    doc = {
        "layer_dims": list(mlp.layer_dims),
        "output_activation": mlp.output_activation,
        "weights": [w.tolist() for w in mlp.weights],
        "biases": [b.tolist() for b in mlp.biases],
    }
    return json.dumps(doc, sort_keys=True)


def mlp_from_json(text):
    doc = json.loads(text)
    return Mlp(
        layer_dims=list(doc["layer_dims"]),
        weights=[np.array(w, dtype=np.float64) for w in doc["weights"]],
        biases=[np.array(b, dtype=np.float64) for b in doc["biases"]],
        output_activation=doc["output_activation"],
    )
