"""Backend selection for the numeric kernels.

The compiled extension is used when it was built; otherwise the numpy/pure
Python versions are used. ``FLATLEAVES_PURE=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
orbit_ranks = _kernels_py.orbit_ranks
coset_masks = _kernels_py.coset_masks

if not os.environ.get("FLATLEAVES_PURE"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        orbit_ranks = _compiled.orbit_ranks
        coset_masks = _compiled.coset_masks

# the largest prime below 2**31; residues multiply safely in int64
MODULUS_PRIME = 2147483647

__all__ = ["BACKEND", "orbit_ranks", "coset_masks", "MODULUS_PRIME"]
