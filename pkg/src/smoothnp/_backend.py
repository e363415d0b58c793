"""Selects the compiled core when it is importable, else the NumPy fallback.

Set ``SMOOTHNP_BACKEND=python`` to force the fallback.
"""

import os

from . import _pycore

if os.environ.get("SMOOTHNP_BACKEND", "").lower() == "python":
    _impl = _pycore
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _pycore
        BACKEND = "python"

kernel_cdf = _impl.kernel_cdf
sign_sum_rows = _impl.sign_sum_rows
walsh_sum_rows = _impl.walsh_sum_rows
walsh_sum_direct = _impl.walsh_sum_direct
walsh_count_rows = _impl.walsh_count_rows
