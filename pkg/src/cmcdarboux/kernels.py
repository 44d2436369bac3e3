"""Backend selection for the hot transport loop.

The compiled extension is used when it was built; otherwise the numpy
implementation is used.  Set ``CMCDARBOUX_BACKEND=python`` to force the
fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
rk4_sweep = _kernels_py.rk4_sweep

if os.environ.get("CMCDARBOUX_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _kernels_c
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        rk4_sweep = _kernels_c.rk4_sweep


def get_backend(name):
    """Return the ``rk4_sweep`` of a named backend ("python" or "cython")."""
    if name == "python":
        return _kernels_py.rk4_sweep
    if name == "cython":
        from . import _kernels as _kernels_c

        return _kernels_c.rk4_sweep
    raise ValueError(f"unknown backend {name!r}")
