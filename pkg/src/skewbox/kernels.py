"""Backend selection for the per-replication kernels.

The compiled extension is used when it imports; otherwise the pure-Python
implementation. :func:`set_backend` switches explicitly.
"""

from __future__ import annotations

from types import ModuleType

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = ("compiled", "python")

_active: ModuleType = _compiled if _compiled is not None else _kernels_py


def available_backends():
    return BACKENDS if _compiled is not None else ("python",)


def get_backend() -> str:
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def set_backend(name: str) -> None:
    global _active
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .` with Cython available")
        _active = _compiled
    elif name == "python":
        _active = _kernels_py
    else:
        raise ValueError(f"unknown backend {name!r}; expected one of {', '.join(BACKENDS)}")


def backend_module(name: str = None) -> ModuleType:
    if name is None:
        return _active
    if name == "compiled" and _compiled is not None:
        return _compiled
    if name == "python":
        return _kernels_py
    raise RuntimeError(f"backend {name!r} unavailable")


def medcouple_sorted(xs) -> float:
    return _active.medcouple_sorted(xs)


def batch_counts(samples, planted, method, k, eps, cap, mc_estimator):
    return _active.batch_counts(samples, planted, method, k, eps, cap, mc_estimator)
