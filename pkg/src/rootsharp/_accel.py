"""Numba switch.

Set ``ROOTSHARP_DISABLE_NUMBA=1`` to force the pure-numpy kernels.  When numba
is missing the numpy kernels are used as well.
"""
import os

_disabled = os.environ.get("ROOTSHARP_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled

numba_default = {
    "nogil": True,
    "cache": True,
    "fastmath": False,
    "error_model": "numpy",
}


def njit(func=None, **kwargs):
    """``numba.njit`` with our defaults, or the identity when numba is absent."""
    opts = dict(numba_default)
    opts.update(kwargs)

    def wrap(f):
        if not HAVE_NUMBA:
            return f
        return numba.njit(**opts)(f)

    if func is None:
        return wrap
    return wrap(func)


def resolve_backend(backend=None):
    """Return ``"numba"`` or ``"numpy"``."""
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
