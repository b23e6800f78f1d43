"""Kernel backend selection.

The compiled extension is preferred; set ``QUNCERTAINTY_PURE_PYTHON=1`` to
force the pure-Python fallback.
"""

import os

if os.environ.get("QUNCERTAINTY_PURE_PYTHON"):
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _pykernels as _impl

        BACKEND = "python"

jacobi_eigh = _impl.jacobi_eigh
mle_iterate = _impl.mle_iterate

__all__ = ["BACKEND", "jacobi_eigh", "mle_iterate"]
