"""Hot numeric kernels with a compiled core and a pure-numpy fallback.

The compiled extension is preferred when importable; set the environment
variable ``PARETODUEL_PURE_PYTHON=1`` to force the fallback (used by the
benchmark to compare both).
"""

import os

if os.environ.get("PARETODUEL_PURE_PYTHON"):
    from . import _fallback as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fallback as _impl

BACKEND = _impl.BACKEND
hv_exact = _impl.hv_exact
matern52_cross = _impl.matern52_cross
matern52_grad_x = _impl.matern52_grad_x

__all__ = ["BACKEND", "hv_exact", "matern52_cross", "matern52_grad_x"]
