"""Hot-loop kernels: compiled extension when available, numpy fallback otherwise.

Set ``REIDKIT_BACKEND=python`` to force the fallback. ``backend_name()``
reports which implementation is live; ``get_backend(name)`` returns a specific
one (used by the parity tests and the benchmark).
"""

import os

from reidkit.kernels import _py

_BACKEND = _py
_BACKEND_NAME = "python"

if os.environ.get("REIDKIT_BACKEND", "").lower() not in ("python", "py"):
    try:
        from reidkit.kernels import _native

        _BACKEND = _native
        _BACKEND_NAME = "native"
    except ImportError:
        pass


def backend_name() -> str:
    return _BACKEND_NAME


def get_backend(name: str | None = None):
    if name in (None, "default"):
        return _BACKEND
    if name in ("python", "py"):
        return _py
    if name == "native":
        from reidkit.kernels import _native

        return _native
    raise ValueError(f"unknown backend {name!r}")


lbp_codes = _BACKEND.lbp_codes
felz_segment = _BACKEND.felz_segment
kd_query = _BACKEND.kd_query
