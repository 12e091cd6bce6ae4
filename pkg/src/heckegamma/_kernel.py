"""Kernel backend selection.

The compiled kernel (_kernel_cy, built from Cython) and the pure-Python
kernel (_kernel_py) implement the same contract and produce byte-identical
keys and arrays.  The compiled one is preferred when importable; setting
HECKEGAMMA_PURE=1 in the environment forces the pure kernel.
"""

from __future__ import annotations

import os

from ._kernel_py import PureKernel

_FORCE_PURE = os.environ.get("HECKEGAMMA_PURE", "") not in ("", "0")

CompiledKernel = None
if not _FORCE_PURE:
    try:
        from ._kernel_cy import CompiledKernel  # type: ignore[no-redef]
    except ImportError:
        CompiledKernel = None


def make_kernel(n: int, q0: int, prec: int, backend: str | None = None):
    """Instantiate a kernel; backend is "pure", "compiled", or None (auto)."""
    if backend == "pure":
        return PureKernel(n, q0, prec)
    if backend == "compiled":
        if CompiledKernel is None:
            raise RuntimeError("compiled kernel is not available")
        return CompiledKernel(n, q0, prec)
    if backend is not None:
        raise ValueError(f"unknown backend {backend!r}")
    cls = CompiledKernel if CompiledKernel is not None else PureKernel
    return cls(n, q0, prec)


def default_backend_name() -> str:
    return "compiled" if CompiledKernel is not None else "pure"
