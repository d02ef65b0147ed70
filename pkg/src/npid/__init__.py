"""Neural-PID training for noisy variational quantum circuits.

Subpackages:
  qsim     exact statevector gates and measurement expectations
  circuit  random input states, random layered circuits, noise injection
  grad     cost function, adjoint gradient, parameter-shift/finite-diff oracles
  neural   minimal MLP (Tanh hidden, optional Softplus head) with SGD
  optim    NPID / NEQP / QV steps and the training loop
  harness  seeded experiment sweeps, metrics, CSV/JSON emission
  backend  kernel selection (compiled extension vs numpy fallback)
"""

from . import backend

__all__ = ["backend"]
__version__ = "0.1.0"
