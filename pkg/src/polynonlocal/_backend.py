"""Select the stencil kernels at import time.

The compiled extension is preferred; the numpy module is used when the
extension was not built. Both expose ``stencil_apply`` and
``stencil_energy`` with the same signatures.
"""
from . import _stencil_py

try:
    from . import _stencil_ext
except ImportError:  # extension not built
    _stencil_ext = None

BACKENDS = {"python": _stencil_py}
if _stencil_ext is not None:
    BACKENDS["cython"] = _stencil_ext

NAME = "cython" if _stencil_ext is not None else "python"
_active = BACKENDS[NAME]


def get(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return _active
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"backend {name!r} unavailable; choose from {sorted(BACKENDS)}"
        ) from None
