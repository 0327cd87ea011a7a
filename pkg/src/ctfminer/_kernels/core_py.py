"""Pure numpy implementations of the clustering kernels."""

from __future__ import annotations

import numpy as np


def pairwise_sq_dists(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, shape (n_points, n_centroids).

    Computed with an explicit difference (not the expanded dot-product
    form) and a sequential accumulation over dimensions, so results match
    the compiled kernel bit-for-bit.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    out = np.zeros((x.shape[0], c.shape[0]), dtype=np.float64)
    for j in range(x.shape[1]):
        diff = x[:, j, None] - c[None, :, j]
        out += diff * diff
    return out


def assign(x: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-centroid labels and squared distances; ties break to the
    lowest centroid index."""
    d = pairwise_sq_dists(x, c)
    labels = np.argmin(d, axis=1)
    return labels.astype(np.int64), d[np.arange(len(x)), labels]
