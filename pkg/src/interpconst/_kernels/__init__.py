"""Hot kernels with a compiled core and a pure-Python fallback.

The Cython extension ``_core`` is used when it was built and importable;
setting ``INTERPCONST_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

from . import _fallback

fallback = _fallback
compiled = None
if not os.environ.get("INTERPCONST_PURE_PYTHON"):
    try:
        from . import _core as compiled
    except ImportError:
        compiled = None

_impl = compiled if compiled is not None else _fallback
BACKEND = "compiled" if compiled is not None else "python"

fm_local_batch = _impl.fm_local_batch
jacobi_eigh = _impl.jacobi_eigh
QUAD_EXPONENTS = _fallback.QUAD_EXPONENTS

__all__ = ["BACKEND", "QUAD_EXPONENTS", "compiled", "fallback", "fm_local_batch", "jacobi_eigh"]
