"""Backend selection for the lattice-point search kernel.

Prefers the compiled Cython kernel; falls back to the pure-Python one when
the extension is unavailable. Set HEISENSPEC_PURE_PYTHON=1 to force the
fallback (used by the benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _enum_py

if os.environ.get("HEISENSPEC_PURE_PYTHON"):
    _impl = _enum_py
else:
    try:
        from . import _enumcore as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _enum_py

BACKEND: str = _impl.BACKEND
enumerate_coefficients = _impl.enumerate_coefficients


def backend_name() -> str:
    return BACKEND
