"""Kernel backend selection: compiled extension when present, numpy otherwise.

Set OCULUS_PURE_PYTHON=1 to force the numpy kernel even when the compiled
one is importable (used by the benchmark and by fallback tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on build environment
    _kernels = None

_FORCE_PURE = os.environ.get("OCULUS_PURE_PYTHON", "") not in ("", "0")

DEFAULT_BACKEND = "numpy" if (_kernels is None or _FORCE_PURE) else "cython"


def available_backends() -> tuple[str, ...]:
    return ("cython", "numpy") if _kernels is not None else ("numpy",)


def make_kernel(pack, backend: str | None = None):
    """Instantiate the evaluation kernel for a compiled rule-base pack."""
    name = backend or DEFAULT_BACKEND
    if name == "cython":
        if _kernels is None:
            raise RuntimeError("compiled kernel requested but the extension is not built")
        return _kernels.Kernel(pack)
    if name == "numpy":
        return _kernels_py.Kernel(pack)
    raise ValueError(f"unknown backend {name!r}; expected one of {available_backends()}")
