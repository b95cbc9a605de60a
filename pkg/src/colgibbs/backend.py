"""Sweep-kernel backend selection.

The compiled Cython kernel is preferred when the extension built; the
NumPy fallback is always available. ``COLGIBBS_FORCE_PURE=1`` forces the
fallback, and callers may request a backend explicitly.
"""
from __future__ import annotations

import os

from . import _sweep_pure

try:
    from . import _sweep  # type: ignore[attr-defined]
except ImportError:
    _sweep = None

__all__ = ["get_sweep", "available_backends", "default_backend"]


def available_backends() -> tuple:
    return ("pure",) if _sweep is None else ("compiled", "pure")


def default_backend() -> str:
    if _sweep is None or os.environ.get("COLGIBBS_FORCE_PURE"):
        return "pure"
    return "compiled"


def get_sweep(backend: str = "auto"):
    """Return the ``theta_sweep`` callable for the requested backend."""
    if backend == "auto":
        backend = default_backend()
    if backend == "pure":
        return _sweep_pure.theta_sweep
    if backend == "compiled":
        if _sweep is None:
            raise RuntimeError("compiled sweep kernel is not available; "
                               "reinstall with a C compiler or use backend='pure'")
        return _sweep.theta_sweep
    raise ValueError(f"unknown backend {backend!r}")
