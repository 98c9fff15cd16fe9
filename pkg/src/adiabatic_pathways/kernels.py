"""Backend selection for the propagation kernels.

The compiled extension is used when importable; otherwise the numpy
fallback. Set ``ADIABATIC_PATHWAYS_PURE=1`` to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("ADIABATIC_PATHWAYS_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback

propagate = _impl.propagate
costates = _impl.costates
energies = _impl.energies


def backends():
    """Map of available backend name -> kernel module."""
    out = {"python": _fallback}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
