"""Kernel backend selection.

The compiled extension implements the hot loops; the pure-Python module
is a drop-in replacement used when the extension is unavailable or when
EDSKETCH_PURE=1 is set. Both produce bit-identical results.
"""

import os

from . import _pykernel

if os.environ.get("EDSKETCH_PURE") == "1":
    kernel = _pykernel
else:
    try:
        from . import _ckernel as kernel  # type: ignore[no-redef]
    except ImportError:
        kernel = _pykernel

BACKEND = kernel.BACKEND
