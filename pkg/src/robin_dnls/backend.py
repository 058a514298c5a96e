"""Selects the compiled step kernel, falling back to pure Python.

Set ROBIN_DNLS_PURE_PYTHON=1 to force the numpy/scipy fallback (used by the
backend-parity tests and the benchmark).
"""

import os

if os.environ.get("ROBIN_DNLS_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels_c as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

cn_step = _impl.cn_step
BACKEND_NAME = _impl.BACKEND_NAME
