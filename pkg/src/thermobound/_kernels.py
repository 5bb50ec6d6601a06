"""Pick the integrator backend at import time.

The compiled ``_rk_core`` is used when it was built; set
``THERMOBOUND_PURE_PYTHON=1`` to force the pure-Python stepper.
"""
import os

from . import _rk_py

try:
    from . import _rk_core
except ImportError:  # extension not built
    _rk_core = None

if _rk_core is not None and not os.environ.get("THERMOBOUND_PURE_PYTHON"):
    BACKEND = "cython"
    integrate = _rk_core.integrate
else:
    BACKEND = "python"
    integrate = _rk_py.integrate


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _rk_core is not None else [])


def get_integrator(backend: str | None = None):
    """Return ``(name, integrate)`` for ``backend`` in {None, "python", "cython"}."""
    if backend is None:
        return BACKEND, integrate
    if backend == "python":
        return "python", _rk_py.integrate
    if backend == "cython":
        if _rk_core is None:
            raise ImportError("compiled core is not available")
        return "cython", _rk_core.integrate
    raise ValueError(f"unknown backend {backend!r}")
