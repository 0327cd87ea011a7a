"""Seeded k-means over sentiment series, elbow analysis, and the
line/spider view aggregations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .sentiment import SentimentSeries, WindowGrid


class KTooLarge(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class FeatureVector:
    trainee_id: str
    values: tuple[float, ...]
    level_aggregates: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "trainee_id": self.trainee_id,
            "values": list(self.values),
            "level_aggregates": list(self.level_aggregates),
        }


def extract_features(series: Sequence[SentimentSeries], grid: WindowGrid) -> list[FeatureVector]:
    """Cluster features: the cumulative series verbatim, plus per-level
    mean normalized scores recovered by differencing (the spider axes)."""
    lengths = {len(s.cumulative) for s in series}
    if len(lengths) > 1:
        raise LengthMismatch(f"series lengths differ: {sorted(lengths)}")
    if lengths and lengths != {len(grid.windows)}:
        raise LengthMismatch("series length does not match the window grid")
    features = []
    for s in series:
        diffs = []
        prev = 0.0
        for v in s.cumulative:
            diffs.append(v - prev)
            prev = v
        aggregates = []
        for level in grid.levels:
            idxs = [w.index for w in grid.windows if w.level == level]
            aggregates.append(sum(diffs[i] for i in idxs) / len(idxs) if idxs else 0.0)
        if any(not np.isfinite(v) for v in s.cumulative):
            raise ValueError(f"non-finite feature values for {s.trainee_id}")
        features.append(FeatureVector(s.trainee_id, s.cumulative, tuple(aggregates)))
    return features


@dataclass(frozen=True)
class ClusterResult:
    k: int
    assignments: dict
    centroids: tuple[tuple[float, ...], ...]
    wcss: float
    seed: int
    iterations: int
    restarts: int = 10
    max_iter: int = 100
    tol: float = 1e-6

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "restarts": self.restarts,
            "max_iter": self.max_iter,
            "tol": self.tol,
            "iterations": self.iterations,
            "wcss": self.wcss,
            "assignments": dict(sorted(self.assignments.items())),
            "centroids": [list(c) for c in self.centroids],
        }


def _kmeanspp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Distance-weighted seeding."""
    n = len(x)
    centers = [int(rng.integers(n))]
    for _ in range(1, k):
        d = _kernels.pairwise_sq_dists(x, x[centers]).min(axis=1)
        total = d.sum()
        if total <= 0:
            # All remaining points coincide with a chosen center.
            remaining = [i for i in range(n) if i not in centers]
            centers.append(remaining[0] if remaining else centers[-1])
            continue
        r = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(d), r))
        centers.append(min(idx, n - 1))
    return x[centers].copy()


def _lloyd(
    x: np.ndarray, centroids: np.ndarray, max_iter: int, tol: float
) -> tuple[np.ndarray, np.ndarray, float, int]:
    k = len(centroids)
    labels = np.zeros(len(x), dtype=np.int64)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        labels, sqd = _kernels.assign(x, centroids)
        new_centroids = centroids.copy()
        for j in range(k):
            members = x[labels == j]
            if len(members):
                new_centroids[j] = members.mean(axis=0)
            else:
                # Re-seed an empty cluster from the farthest point.
                far = int(np.argmax(sqd))
                new_centroids[j] = x[far]
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift < tol:
            break
    labels, sqd = _kernels.assign(x, centroids)
    return labels, centroids, float(sqd.sum()), iterations


def kmeans(
    features: Sequence[FeatureVector],
    k: int,
    seed: int = 0,
    restarts: int = 10,
    max_iter: int = 100,
    tol: float = 1e-6,
    warm_start: Optional[np.ndarray] = None,
) -> ClusterResult:
    """Best-of-restarts seeded k-means; deterministic for fixed inputs and
    seed."""
    if not features:
        raise EmptyInput("no feature vectors")
    if not 1 <= k <= len(features):
        raise KTooLarge(f"k={k} with {len(features)} feature vectors")
    x = np.asarray([f.values for f in features], dtype=np.float64)
    best: Optional[tuple[np.ndarray, np.ndarray, float, int]] = None
    inits = []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        inits.append(_kmeanspp_init(x, k, rng))
    if warm_start is not None and len(warm_start) == k:
        inits.append(np.asarray(warm_start, dtype=np.float64))
    for init in inits:
        result = _lloyd(x, init, max_iter, tol)
        if best is None or result[2] < best[2] - 1e-12:
            best = result
    labels, centroids, wcss, iterations = best
    assignments = {f.trainee_id: int(labels[i]) for i, f in enumerate(features)}
    return ClusterResult(
        k=k,
        assignments=assignments,
        centroids=tuple(tuple(float(v) for v in c) for c in centroids),
        wcss=wcss,
        seed=seed,
        iterations=iterations,
        restarts=restarts,
        max_iter=max_iter,
        tol=tol,
    )


@dataclass(frozen=True)
class ElbowSeries:
    points: tuple[tuple[int, float], ...]
    suggested_k: int

    def to_json(self) -> dict:
        return {
            "points": [{"k": k, "wcss": w} for k, w in self.points],
            "suggested_k": self.suggested_k,
        }


def _knee(points: Sequence[tuple[int, float]]) -> int:
    """k with the largest perpendicular distance from the first-last chord."""
    if len(points) < 3:
        return points[0][0] if len(points) == 1 else points[-1][0] if points[-1][1] < points[0][1] else points[0][0]
    (x1, y1), (x2, y2) = points[0], points[-1]
    norm = np.hypot(x2 - x1, y2 - y1)
    if norm == 0:
        return points[0][0]
    best_k, best_d = points[0][0], -1.0
    for xk, yk in points:
        d = abs((y2 - y1) * xk - (x2 - x1) * yk + x2 * y1 - y2 * x1) / norm
        if d > best_d + 1e-12:
            best_d = d
            best_k = xk
    return best_k


def elbow(
    features: Sequence[FeatureVector], k_max: int, seed: int = 0, restarts: int = 10
) -> ElbowSeries:
    """WCSS for k = 1..k_max with warm starts so the series is
    non-increasing, plus a chord-distance knee suggestion."""
    if k_max > len(features):
        raise KTooLarge(f"k_max={k_max} with {len(features)} feature vectors")
    x = np.asarray([f.values for f in features], dtype=np.float64)
    points: list[tuple[int, float]] = []
    prev_centroids: Optional[np.ndarray] = None
    prev_wcss = float("inf")
    for k in range(1, k_max + 1):
        warm = None
        if prev_centroids is not None:
            _, sqd = _kernels.assign(x, prev_centroids)
            far = int(np.argmax(sqd))
            warm = np.vstack([prev_centroids, x[far][None, :]])
        result = kmeans(features, k, seed=seed, restarts=restarts, warm_start=warm)
        wcss = min(result.wcss, prev_wcss)
        points.append((k, wcss))
        prev_centroids = np.asarray(result.centroids, dtype=np.float64)
        prev_wcss = wcss
    if len(points) == 1:
        suggested = 1
    elif points[0][1] <= 1e-12:
        suggested = 1
    else:
        suggested = _knee(points)
    return ElbowSeries(tuple(points), suggested)


def cluster_views(result: ClusterResult, features: Sequence[FeatureVector]) -> dict:
    """Line-view membership with cluster-size bars and the spider-view
    centroids over per-level aggregates."""
    by_cluster: dict[int, list[FeatureVector]] = {i: [] for i in range(result.k)}
    for f in features:
        by_cluster[result.assignments[f.trainee_id]].append(f)
    sizes = [len(by_cluster[i]) for i in range(result.k)]
    line_view = {
        "bars": sizes,
        "members": {str(i): sorted(f.trainee_id for f in by_cluster[i]) for i in range(result.k)},
    }
    spider = []
    for i in range(result.k):
        members = by_cluster[i]
        if members:
            dims = len(members[0].level_aggregates)
            centroid = [
                sum(f.level_aggregates[d] for f in members) / len(members)
                for d in range(dims)
            ]
        else:
            centroid = []
        spider.append(centroid)
    return {"line_view": line_view, "spider_view": {"centroids": spider}}
