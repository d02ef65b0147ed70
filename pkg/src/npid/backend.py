"""Kernel backend selection.

On import, picks the compiled Cython kernels (npid._kernels) when available
and otherwise falls back to the pure-numpy kernels. The NPID_BACKEND
environment variable forces a choice ("cython" or "numpy"); set_backend()
switches at runtime (used by the parity tests and the benchmark).

Both backends implement the same function surface over raw contiguous
complex128 arrays; see kernels_numpy for the contract.
"""

import os

from . import kernels_numpy

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

impl = None
name = ""


def set_backend(requested):
    """Select the active kernel implementation ("cython" or "numpy")."""
    global impl, name
    if requested == "numpy":
        impl = kernels_numpy
    elif requested in ("cython", "compiled"):
        if _compiled is None:
            raise RuntimeError(
                "compiled kernels requested but npid._kernels is not built; "
                "reinstall with a C compiler or set NPID_BACKEND=numpy"
            )
        impl = _compiled
    else:
        raise ValueError(f"unknown backend {requested!r} (expected 'cython' or 'numpy')")
    name = "cython" if impl is _compiled and _compiled is not None else "numpy"
    return name


def available_backends():
    backends = ["numpy"]
    if _compiled is not None:
        backends.insert(0, "cython")
    return backends


def get_impl(requested=None):
    """Return a kernel module without touching the global selection."""
    if requested is None:
        return impl
    if requested == "numpy":
        return kernels_numpy
    if requested in ("cython", "compiled"):
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {requested!r}")


_env = os.environ.get("NPID_BACKEND", "").strip().lower()
if _env:
    set_backend(_env)
else:
    set_backend("cython" if _compiled is not None else "numpy")
