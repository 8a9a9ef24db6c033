"""Kernel backend selection: compiled extension when available, else Python.

Set MANYMT_PURE_PYTHON=1 to force the fallback (used by tests and the
benchmark to compare both paths).
"""

from __future__ import annotations

import os

if os.environ.get("MANYMT_PURE_PYTHON"):
    from manymt import _pykernels as _impl
else:
    try:
        from manymt import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        from manymt import _pykernels as _impl

BACKEND: str = _impl.BACKEND
train_merges = _impl.train_merges
apply_merges = _impl.apply_merges


def get_backend(name: str | None = None):
    """Explicit backend lookup for the benchmark: 'python' or 'cython'."""
    if name in (None, BACKEND):
        return _impl
    if name == "python":
        from manymt import _pykernels

        return _pykernels
    if name == "cython":
        from manymt import _speedups  # raises ImportError when not built

        return _speedups
    raise ValueError(f"unknown kernel backend {name!r}")
