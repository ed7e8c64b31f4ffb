"""Kernel backend selection.

The hot per-pair kernels ship in two versions: numba-compiled loops
(``_kernels_numba``) and vectorized numpy (``_kernels_numpy``). The env var
``SELFKIN_BACKEND`` picks one ("numba" or "numpy"); unset means numba when it
imports, numpy otherwise. Both produce equal results to float rounding, but a
given run sticks to one backend so results are reproducible bit-for-bit.
"""

import os

from . import _kernels_numpy

_FORCED = os.environ.get("SELFKIN_BACKEND", "").strip().lower()

if _FORCED not in ("", "numba", "numpy"):
    raise RuntimeError(f"SELFKIN_BACKEND must be 'numba' or 'numpy', got {_FORCED!r}")

if _FORCED == "numpy":
    _impl = _kernels_numpy
    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl
        BACKEND = "numba"
    except ImportError:
        if _FORCED == "numba":
            raise
        _impl = _kernels_numpy
        BACKEND = "numpy"

forward_pair = _impl.forward_pair
backward_pair = _impl.backward_pair
