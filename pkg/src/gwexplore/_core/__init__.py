"""Backend dispatch for the hot kernels.

The compiled extension is used when available; set GWEXPLORE_PURE=1 to force
the pure Python fallback.  Both backends are bit-identical by construction
(shared draw sources, matching operation order), so the choice only affects
speed.
"""

import os

if os.environ.get("GWEXPLORE_PURE"):
    from gwexplore._core import pykernels as kernels
    BACKEND = "pure"
else:
    try:
        from gwexplore._core import speedups as kernels
        BACKEND = "speedups"
    except ImportError:
        from gwexplore._core import pykernels as kernels
        BACKEND = "pure"

HAVE_SPEEDUPS = BACKEND == "speedups"

__all__ = ["kernels", "BACKEND", "HAVE_SPEEDUPS"]
