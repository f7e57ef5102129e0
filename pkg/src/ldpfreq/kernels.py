"""Backend selection for the sampling kernels.

The compiled extension is used when it imports; otherwise, or when
``LDPFREQ_BACKEND=python`` is set, the numpy implementation is used. Both
produce identical reports for identical uniforms.
"""

import os

from . import _kernels_py

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _kernels_py}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels


def get_backend(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return active
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable kernel backend {name!r}; have {sorted(BACKENDS)}") from None


def _select():
    wanted = os.environ.get("LDPFREQ_BACKEND", "").strip().lower()
    if wanted:
        return wanted, get_backend(wanted)
    if _ckernels is not None:
        return "cython", _ckernels
    return "python", _kernels_py


BACKEND, active = _select()
