"""Dense symmetric eigendecomposition, spectral embeddings, and approximate
k-means (k-means++ seeding plus Lloyd iterations, best of several restarts).

The (1 + gamma) approximation factor of the abstract clustering step is
treated as a heuristic: multi-restart k-means++ stands in for a certified
solver, and acceptance tests absorb the variability over seeds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import LabelAssignment
from .rng import SeedLike, as_generator


@dataclass(frozen=True)
class Embedding:
    U: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.U, dtype=np.float64)
        if not np.all(np.isfinite(U)):
            raise ValueError("embedding must be finite")
        object.__setattr__(self, "U", U)


def sym_eigs(M: np.ndarray, k: int, by_abs: bool = True):
    """Top-k eigenpairs of a symmetric matrix, sorted by |lambda| (or by
    lambda when by_abs is False), largest first."""
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    if k < 1 or k > n:
        raise ValueError("need 1 <= k <= n")
    if not np.allclose(M, M.T, atol=1e-10 * max(1.0, float(np.abs(M).max()))):
        raise ValueError("M must be symmetric")
    vals, vecs = np.linalg.eigh(M)
    order = np.argsort(-np.abs(vals)) if by_abs else np.argsort(-vals)
    sel = order[:k]
    return vals[sel], vecs[:, sel]


def _kmeans_pp_init(points, k, rng):
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[c:] = points[rng.integers(n, size=k - c)]
            break
        centers[c] = points[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((points - centers[c]) ** 2, axis=1))
    return centers


def _lloyd(points, centers, max_iter=100):
    n, k = points.shape[0], centers.shape[0]
    labels = None
    for _ in range(max_iter):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            mask = labels == c
            if mask.any():
                centers[c] = points[mask].mean(axis=0)
            else:
                # Re-seed an empty cluster at the point farthest from its center.
                far = d2[np.arange(n), labels].argmax()
                centers[c] = points[far]
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    cost = float(d2[np.arange(n), labels].sum())
    return labels, centers, cost


def approx_kmeans(
    points: np.ndarray,
    k: int,
    gamma: float = 1.0,
    restarts: int = 20,
    seed: SeedLike = 0,
):
    """Best of `restarts` k-means++-seeded Lloyd runs.

    Returns (membership, centers, cost) where cost is the squared Frobenius
    objective. gamma is the nominal approximation slack; it is recorded by
    callers but the guarantee here is empirical.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be 2-D")
    n = points.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError("k must not exceed the number of points")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = as_generator(seed)
    best = None
    for _ in range(restarts):
        centers = _kmeans_pp_init(points, k, rng)
        labels, centers, cost = _lloyd(points, centers)
        if best is None or cost < best[2]:
            best = (labels, centers, cost)
        if best[2] == 0.0:
            break
    labels, centers, cost = best
    return LabelAssignment(labels, k), centers, cost


def spectral_cluster(
    M: np.ndarray,
    k: int,
    gamma: float = 1.0,
    seed: SeedLike = 0,
    restarts: int = 20,
) -> LabelAssignment:
    """Cluster the rows of the top-k (by absolute eigenvalue) eigenvector
    matrix of M with approximate k-means."""
    _, vecs = sym_eigs(M, k, by_abs=True)
    emb = Embedding(vecs)  # rejects non-finite spectra before clustering
    labels, _, _ = approx_kmeans(emb.U, k, gamma=gamma, restarts=restarts, seed=seed)
    return labels
