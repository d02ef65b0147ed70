"""The three training strategies: NPID, NEQP, and vanilla gradient descent.

Per iteration every strategy draws one fresh noise vector and evaluates the
gradient at the perturbed parameters (the optimizer only ever sees jittered
hardware); the reported loss e is the exact cost of the stored parameters,
which also drives the PID signal and the convergence test. Updates:

  - qv:     theta <- theta - lr_theta * g
  - npid:   theta <- theta - lr_theta * g * o_pid, where o_pid combines
            proportional/integral/derivative terms of the loss with gains
            emitted by a small network; the network itself is trained on the
            one-step-unrolled post-update loss
  - neqp:   theta is generated by a network from a fixed random input; the
            circuit gradient is backpropagated into the network weights

Randomness discipline: all streams are spawned from (cfg.seed, circuit_seed)
with fixed purpose keys, so runs replay bit-identically and NPID/QV share
initial parameters and noise draws under equal seeds.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circuit import (
    NoiseModel,
    build_random_circuit,
    depth_schedule,
    perturb_params,
    random_input_state,
)
from .grad import cost_at, gradient
from .neural import backward, forward, mlp_new, sgd_step

MODEL_TAGS = ("npid", "neqp-s", "neqp-l", "qv")

# Conditioning of the gain-head update. The one-step-unrolled signal scales
# with lr_theta * ||g||^2 * e (around 1e-4), four orders below the gain
# magnitudes the controller must reach near convergence, so the gain head
# trains at lr_net * GAIN_LR_SCALE. The signal also spans several orders of
# magnitude over a run; uncapped it grows the gains past the stable-step
# threshold within a few iterations, after which the loss plateaus and the
# restoring signal decorrelates. GAIN_SIGNAL_CLIP caps the back-propagated
# output gradient's 2-norm, bounding gain movement per step (about
# clip * lr_net * GAIN_LR_SCALE) without touching the signal's sign.
GAIN_LR_SCALE = 1e4
GAIN_SIGNAL_CLIP = 0.005

# Cap on the 2-norm of one parameter update. Healthy updates stay below
# ~0.25 rad; without the cap a noise-induced loss spike feeds back through
# o_pid (which is proportional to the loss) into a step large enough to
# randomize the parameters, after which a run cannot recover. The cap binds
# only a handful of times per run.
THETA_STEP_CLIP = 0.5


def _clipped_step(step):
    norm = float(np.linalg.norm(step))
    if norm > THETA_STEP_CLIP:
        return step * (THETA_STEP_CLIP / norm)
    return step


# purpose keys for seed-stream spawning (see _child_seed)
_STREAM_INPUT_STATE = 0
_STREAM_STRUCTURE = 1
_STREAM_THETA = 2
_STREAM_NET = 3
_STREAM_NOISE = 4
_STREAM_NEQP_INPUT = 5


class NonFiniteLossError(RuntimeError):
    """Raised when a training step produces a non-finite loss."""


@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float
    kd: float


@dataclass
class PidState:
    """Previous-loss memory of the PID controller."""

    e_prev: float = 0.0
    initialized: bool = False


@dataclass(frozen=True)
class TrainConfig:
    n_qubits: int
    lr_theta: float = 0.1
    lr_net: float = 0.01
    max_iters: int = 1500
    target_loss: float = 0.001
    noise_rate: float = 0.01
    seed: int = 0
    depth: Optional[int] = None  # None -> depth_schedule(n_qubits, log_base)
    log_base: float = math.e
    log_grad_norms: bool = False

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 < self.target_loss < 1:
            raise ValueError("target_loss must lie in (0, 1)")
        if self.lr_theta <= 0 or self.lr_net <= 0:
            raise ValueError("learning rates must be positive")
        if self.noise_rate < 0:
            raise ValueError("noise_rate must be >= 0")

    def resolve_depth(self):
        return self.depth if self.depth is not None else depth_schedule(self.n_qubits, self.log_base)


@dataclass
class RunRecord:
    """Loss trace and convergence metadata of one seeded run."""

    losses: np.ndarray
    converged_at: Optional[int]
    model_tag: str
    grad_norms: Optional[np.ndarray] = None


@dataclass
class StepResult:
    loss: float
    grad_norm: float
    theta: Optional[np.ndarray] = None
    mlp: object = None
    pid_state: Optional[PidState] = None


def pid_components(e, state):
    """(P_e, I_e, D_e) of the loss signal; first step uses e_prev = e."""
    e_prev = state.e_prev if state.initialized else e
    return e, e + e_prev, e - e_prev


def pid_output(e, state, gains):
    """PID combination of the loss signal.

    P_e = e, I_e = e + e_prev, D_e = e - e_prev; on the first step e_prev is
    taken as e itself (so I_e = 2e and D_e = 0). Does not mutate `state`.
    """
    p_e, i_e, d_e = pid_components(e, state)
    o_pid = gains.kp * p_e + gains.ki * i_e + gains.kd * d_e
    return o_pid, (p_e, i_e, d_e)


def _checked_cost(spec, theta_eval, psi_in):
    loss = cost_at(spec, theta_eval, psi_in)
    if not math.isfinite(loss):
        raise NonFiniteLossError(f"loss became non-finite ({loss})")
    return loss


def npid_step(theta_hat, psi_in, spec, mlp, state, cfg, rng, o_pid_override=None):
    """One NPID iteration (parameter update plus gain-network update).

    Flow: measure e at the stored parameters; form (P_e, I_e, D_e); the gain
    network maps [e, P_e, I_e, D_e] to positive (K_p, K_i, K_d); combine into
    o_pid; update theta by -lr_theta * g * o_pid with g evaluated at this
    iteration's noise draw; finally train the gain head on the one-step
    unrolled post-update loss, whose gradient w.r.t. o_pid is the inner
    product of the post-update circuit gradient (same noise draw) with
    -lr_theta * g.

    `o_pid_override` is a test hook: it replaces the network-generated PID
    multiplier and skips the network update, reducing the step to plain
    gradient descent scaled by the override.
    """
    e = _checked_cost(spec, theta_hat, psi_in)
    noise = NoiseModel(cfg.noise_rate)
    theta_eval = perturb_params(theta_hat, noise, rng)
    if o_pid_override is None:
        p_e, i_e, d_e = pid_components(e, state)
        raw = forward(mlp, np.array([e, p_e, i_e, d_e]))
        gains = PidGains(kp=float(raw[0]), ki=float(raw[1]), kd=float(raw[2]))
        o_pid, _ = pid_output(e, state, gains)
    else:
        o_pid = o_pid_override
    g = gradient(spec, theta_eval, psi_in)
    theta_next = theta_hat - _clipped_step((cfg.lr_theta * o_pid) * g)
    if o_pid_override is None:
        # one-step unrolled: d(post-update loss)/d(o_pid) = g_new . (-lr * g),
        # evaluated under the same noise draw as this iteration
        delta = theta_eval - theta_hat
        g_new = gradient(spec, theta_next + delta, psi_in)
        s = float(np.dot(g_new, -cfg.lr_theta * g))
        output_grad = s * np.array([p_e, i_e, d_e])
        norm = float(np.linalg.norm(output_grad))
        if norm > GAIN_SIGNAL_CLIP:
            output_grad *= GAIN_SIGNAL_CLIP / norm
        sgd_step(mlp, backward(mlp, output_grad), cfg.lr_net * GAIN_LR_SCALE)
    return StepResult(
        loss=e,
        grad_norm=float(np.linalg.norm(g)),
        theta=theta_next,
        mlp=mlp,
        pid_state=PidState(e_prev=e, initialized=True),
    )


def neqp_step(input_vec, psi_in, spec, mlp, cfg, rng):
    """One NEQP iteration: network emits theta, circuit gradient trains the network."""
    theta = forward(mlp, input_vec)
    if theta.shape != (spec.n_params,):
        raise ValueError(
            f"network emits {theta.shape[0]} parameters but circuit expects {spec.n_params}"
        )
    e = _checked_cost(spec, theta, psi_in)
    noise = NoiseModel(cfg.noise_rate)
    theta_eval = perturb_params(theta, noise, rng)
    g = gradient(spec, theta_eval, psi_in)
    sgd_step(mlp, backward(mlp, g), cfg.lr_net)
    return StepResult(loss=e, grad_norm=float(np.linalg.norm(g)), mlp=mlp)


def qv_step(theta_hat, psi_in, spec, cfg, rng):
    """One vanilla gradient-descent iteration."""
    e = _checked_cost(spec, theta_hat, psi_in)
    noise = NoiseModel(cfg.noise_rate)
    theta_eval = perturb_params(theta_hat, noise, rng)
    g = gradient(spec, theta_eval, psi_in)
    theta_next = theta_hat - _clipped_step(cfg.lr_theta * g)
    return StepResult(loss=e, grad_norm=float(np.linalg.norm(g)), theta=theta_next)


def _child_seed(seed, purpose):
    words = np.random.SeedSequence(entropy=seed, spawn_key=(purpose,)).generate_state(2)
    return int(words[0]) | (int(words[1]) << 32)


def train_loop(model_tag, cfg, circuit_seed, o_pid_override=None):
    """Run one seeded training run to convergence or the iteration cap.

    `circuit_seed` fixes the instance (input state and circuit structure);
    `cfg.seed` fixes initial parameters, network weights, and the noise
    stream. Equal seeds give npid and qv identical initial parameters and
    noise draws.
    """
    if model_tag not in MODEL_TAGS:
        raise ValueError(f"unknown model {model_tag!r} (expected one of {MODEL_TAGS})")
    n = cfg.n_qubits
    psi_in = random_input_state(n, _child_seed(circuit_seed, _STREAM_INPUT_STATE))
    spec = build_random_circuit(n, cfg.resolve_depth(), _child_seed(circuit_seed, _STREAM_STRUCTURE))
    noise_rng = np.random.default_rng(_child_seed(cfg.seed, _STREAM_NOISE))

    theta = None
    mlp = None
    pid_state = None
    input_vec = None
    if model_tag in ("npid", "qv"):
        theta_rng = np.random.default_rng(_child_seed(cfg.seed, _STREAM_THETA))
        theta = theta_rng.uniform(0.0, 2.0 * np.pi, size=spec.n_params)
    if model_tag == "npid":
        mlp = mlp_new("npid", spec.n_params, _child_seed(cfg.seed, _STREAM_NET))
        pid_state = PidState()
    elif model_tag in ("neqp-s", "neqp-l"):
        mlp = mlp_new(model_tag, spec.n_params, _child_seed(cfg.seed, _STREAM_NET))
        input_rng = np.random.default_rng(_child_seed(cfg.seed, _STREAM_NEQP_INPUT))
        input_vec = input_rng.standard_normal(mlp.layer_dims[0])

    losses = []
    grad_norms = [] if cfg.log_grad_norms else None
    converged_at = None
    for i in range(cfg.max_iters):
        if model_tag == "npid":
            result = npid_step(theta, psi_in, spec, mlp, pid_state, cfg, noise_rng, o_pid_override)
            theta, pid_state = result.theta, result.pid_state
        elif model_tag == "qv":
            result = qv_step(theta, psi_in, spec, cfg, noise_rng)
            theta = result.theta
        else:
            result = neqp_step(input_vec, psi_in, spec, mlp, cfg, noise_rng)
        losses.append(result.loss)
        if grad_norms is not None:
            grad_norms.append(result.grad_norm)
        if result.loss < cfg.target_loss:
            converged_at = i
            break
    return RunRecord(
        losses=np.array(losses, dtype=np.float64),
        converged_at=converged_at,
        model_tag=model_tag,
        grad_norms=None if grad_norms is None else np.array(grad_norms, dtype=np.float64),
    )
