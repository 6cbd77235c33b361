"""Dynamic-programming kernels for linear-chain lattices.

Two interchangeable implementations exist: loop kernels compiled with numba
and vectorized numpy kernels.  The active one is picked at import time from
the ``CDECODE_BACKEND`` environment variable (``numba`` or ``numpy``).  When
the variable is unset numba is used if it imports, numpy otherwise.

All kernels take the transition matrix already split into its parts:

``inner``  (T, T) real-to-real scores
``start``  (T,)   GO-to-tag scores
``end``    (T,)   tag-to-EOS scores
"""

import os

from . import _numpy

_requested = os.environ.get("CDECODE_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ImportError(f"unknown CDECODE_BACKEND {_requested!r}; use 'numba' or 'numpy'")

BACKENDS = {"numpy": _numpy}
if _requested != "numpy":
    try:
        from . import _numba

        BACKENDS["numba"] = _numba
    except ImportError:
        if _requested == "numba":
            raise

BACKEND = "numba" if "numba" in BACKENDS else "numpy"


def get_backend(name=None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    name = BACKEND if name is None else name
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} is not available (have {sorted(BACKENDS)})") from None


_active = BACKENDS[BACKEND]
viterbi = _active.viterbi
forward = _active.forward
backward = _active.backward

__all__ = ["BACKEND", "BACKENDS", "get_backend", "viterbi", "forward", "backward"]
