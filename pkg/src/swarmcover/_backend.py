"""Kernel backend selection.

The compiled extension is used when importable. Setting ``SWARMCOVER_PURE=1``
forces the pure-Python kernels (useful for debugging and for benchmarks).
"""

import os

from swarmcover import _kernels_py

if os.environ.get("SWARMCOVER_PURE") == "1":
    kernels = _kernels_py
else:
    try:
        from swarmcover import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _kernels_py

BACKEND = "python" if kernels is _kernels_py else "compiled"
