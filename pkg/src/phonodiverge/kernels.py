"""Kernel backend selection.

The compiled extension is optional: if it failed to build, or the
PHONODIVERGE_PURE_PY environment variable is set to a non-empty value,
the pure numpy implementations take over. Both expose the same
functions with the same semantics; `BACKEND` names the one in use.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("PHONODIVERGE_PURE_PY"):
    _impl = _kernels_py
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND
smo_solve = _impl.smo_solve
yin_diff = _impl.yin_diff

__all__ = ["BACKEND", "smo_solve", "yin_diff"]
