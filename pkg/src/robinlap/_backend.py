"""Kernel backend selection.

The compiled extension is preferred; set ``ROBINLAP_PURE_PYTHON=1`` to force
the pure-Python kernels (used by the benchmark and the backend parity tests).
"""
import os

from . import _kernels_py

if os.environ.get("ROBINLAP_PURE_PYTHON") == "1":
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels_c as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"


def available_backends():
    """Mapping name -> kernel module for every backend importable here."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels_c
        found["cython"] = _kernels_c
    except ImportError:
        pass
    return found
