"""Hot numeric kernels with a compiled Cython core and a pure
numpy fallback selected at import time.

Both implementations share the contract of :func:`assign`: nearest
centroid per row by squared Euclidean distance, ties broken by the lowest
centroid index, so results are identical across backends.
"""

from . import core_py

try:
    from . import core_cy as _impl

    BACKEND = "cython"
except ImportError:  # compiled extension not built
    _impl = core_py
    BACKEND = "python"

assign = _impl.assign
pairwise_sq_dists = _impl.pairwise_sq_dists

__all__ = ["assign", "pairwise_sq_dists", "BACKEND", "core_py"]
