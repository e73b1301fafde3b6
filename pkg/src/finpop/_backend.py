"""Kernel backend selection.

The compiled extension is used when importable; the numpy fallback
otherwise.  FINPOP_BACKEND=cython|python|auto overrides, and the
``backend`` argument accepted by the Monte Carlo entry points overrides
that again (used by the benchmark and the cross-backend tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels_cy
except ImportError:  # extension not built on this interpreter
    _kernels_cy = None


def available_backends() -> list[str]:
    names = []
    if _kernels_cy is not None:
        names.append("cython")
    names.append("python")
    return names


def get_kernels(name: str | None = None):
    choice = name if name is not None else os.environ.get("FINPOP_BACKEND", "auto")
    if choice == "auto":
        return _kernels_cy if _kernels_cy is not None else _kernels_py
    if choice == "cython":
        if _kernels_cy is None:
            raise RuntimeError(
                "compiled kernels are not available; rebuild the extension "
                "or set FINPOP_BACKEND=python"
            )
        return _kernels_cy
    if choice == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {choice!r} (expected auto, cython or python)")


def active_backend(name: str | None = None) -> str:
    return "cython" if get_kernels(name) is _kernels_cy else "python"
