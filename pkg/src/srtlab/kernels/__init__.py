"""Hot-loop kernels with a compiled core and a pure-numpy fallback.

The compiled extension is preferred when present; set SRTLAB_NO_EXT=1 to
force the numpy implementation (used by the benchmark and the
backend-equivalence tests).  Both expose the same functions:

    backproject_2d(values, t_start, t_step, z, wz, x1, x2, nthreads)
    backproject_3d(values, t_start, t_step, z2, z3, w2, w3, x1, x2, x3, nthreads)

plus interp_uniform (numpy only; not performance critical).
"""

from __future__ import annotations

import os

from . import pykernels
from .pykernels import interp_uniform

_impl = pykernels
if not os.environ.get("SRTLAB_NO_EXT"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pykernels

HAVE_EXTENSION = _impl is not pykernels


def backend() -> str:
    """Name of the active kernel backend ('cython' or 'numpy')."""
    return _impl.BACKEND


def default_threads() -> int:
    return max(1, os.cpu_count() or 1)


def backproject_2d(values, t_start, t_step, z, wz, x1, x2, nthreads=0):
    import numpy as np
    args = [np.ascontiguousarray(a, dtype=float)
            for a in (values, z, wz, x1, x2)]
    nth = nthreads if nthreads > 0 else default_threads()
    return _impl.backproject_2d(args[0], float(t_start), float(t_step),
                                *args[1:], nth)


def backproject_3d(values, t_start, t_step, z2, z3, w2, w3, x1, x2, x3,
                   nthreads=0):
    import numpy as np
    args = [np.ascontiguousarray(a, dtype=float)
            for a in (values, z2, z3, w2, w3, x1, x2, x3)]
    nth = nthreads if nthreads > 0 else default_threads()
    return _impl.backproject_3d(args[0], float(t_start), float(t_step),
                                *args[1:], nth)


def implementations() -> dict:
    """Every available backend, for side-by-side benchmarking."""
    out = {"numpy": pykernels}
    if HAVE_EXTENSION:
        out["cython"] = _impl
    return out
