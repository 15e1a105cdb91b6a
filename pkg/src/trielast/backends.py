"""Kernel backend selection.

The hot per-element kernels exist twice: numba-compiled loops and a
pure-numpy fallback.  The environment variable ``TRIELAST_BACKEND``
picks one of ``auto`` (default: numba when importable), ``numba`` or
``numpy``.  Both produce the same numbers up to summation order;
``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

from . import _kernels_numpy

ENV_VAR = "TRIELAST_BACKEND"
KERNEL_NAMES = (
    "stress_mass_blocks",
    "coupling_blocks",
    "load_blocks",
    "div_gram_blocks",
    "displacement_values",
    "stress_values",
    "stress_divergence_values",
)

_numba_module = None
_numba_failed = False


def _numba_kernels():
    global _numba_module, _numba_failed
    if _numba_module is None and not _numba_failed:
        try:
            from . import _kernels_numba
            _numba_module = _kernels_numba
        except ImportError:
            _numba_failed = True
    return _numba_module


def backend_name():
    """Resolved backend name for the current environment."""
    mode = os.environ.get(ENV_VAR, "auto").lower()
    if mode not in ("auto", "numba", "numpy"):
        raise ValueError(
            "{}={!r} not understood; use auto, numba or numpy".format(ENV_VAR, mode))
    if mode == "numpy":
        return "numpy"
    if mode == "numba":
        if _numba_kernels() is None:
            raise ImportError("numba backend requested but numba is not installed")
        return "numba"
    return "numpy" if _numba_kernels() is None else "numba"


def get_kernels(name=None):
    """Kernel module for ``name`` (or the environment's choice)."""
    name = name or backend_name()
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        kernels = _numba_kernels()
        if kernels is None:
            raise ImportError("numba backend requested but numba is not installed")
        return kernels
    raise ValueError("unknown backend {!r}".format(name))
