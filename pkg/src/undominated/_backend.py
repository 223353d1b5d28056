"""Kernel backend selection.

Hot loops live twice: once as numba ``@njit`` kernels and once as pure
numpy code with identical signatures.  The numba path is the default;
setting ``UNDOMINATED_DISABLE_NUMBA=1`` (or any of ``true``/``yes``)
before import forces the numpy fallback, which is what the ``bench``
subcommand measures against.
"""

from __future__ import annotations

import os

DISABLE_ENV_VAR = "UNDOMINATED_DISABLE_NUMBA"


def numba_disabled() -> bool:
    return os.environ.get(DISABLE_ENV_VAR, "").strip().lower() in ("1", "true", "yes")


_numba_error = None
if numba_disabled():
    HAVE_NUMBA = False
else:
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError as exc:  # pragma: no cover - numba is a hard dep
        HAVE_NUMBA = False
        _numba_error = exc


def load_kernels():
    """Return the active kernel module (numba if available, else numpy)."""
    if HAVE_NUMBA:
        from . import _kernels_numba

        return _kernels_numba
    from . import _kernels_numpy

    return _kernels_numpy


def backend_name() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
