"""Kernel backend selection: compiled extension with pure-numpy fallback.

The compiled module :mod:`fracedge._native` is preferred when importable;
``FRACEDGE_NATIVE=0`` forces the fallback.  Both backends expose the same
two functions with identical semantics (see ``_pykernels`` for the
contracts), so everything above this module is backend-agnostic.
"""

import os

import numpy as np

from fracedge import _pykernels

try:
    from fracedge import _native
except ImportError:
    _native = None

_names = {"python": _pykernels}
if _native is not None:
    _names["native"] = _native

if os.environ.get("FRACEDGE_NATIVE", "1").lower() in ("0", "false", "no"):
    _active = _pykernels
else:
    _active = _native if _native is not None else _pykernels


def backend_name():
    """Name of the active backend: 'native' or 'python'."""
    return "native" if _active is _native else "python"


def available_backends():
    return sorted(_names)


def get_backend(name):
    """Backend module by name; raises KeyError if not built/available."""
    return _names[name]


def set_backend(name):
    """Switch the active backend (mainly for benchmarks and tests)."""
    global _active
    _active = _names[name]


def _as_image(arr):
    return np.ascontiguousarray(arr, dtype=np.float64)


def correlate_axis(src, weights, anchor, axis):
    """1-D weighted pass with clamp-to-edge borders; see ``_pykernels``."""
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if weights.ndim != 1 or weights.size == 0:
        raise ValueError("weights must be a non-empty 1-D sequence")
    if axis not in (0, 1):
        raise ValueError("axis must be 0 or 1")
    return _active.correlate_axis(_as_image(src), weights, int(anchor), int(axis))


def suppress_nonmax(strength, gx, gy):
    """Directional non-max suppression; see ``_pykernels``."""
    strength = _as_image(strength)
    gx = _as_image(gx)
    gy = _as_image(gy)
    if not (strength.shape == gx.shape == gy.shape):
        raise ValueError("strength, gx, gy must share one shape")
    return _active.suppress_nonmax(strength, gx, gy)
