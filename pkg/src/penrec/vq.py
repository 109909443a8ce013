"""Codebook training (splitting k-means) and nearest-centroid quantization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SPLIT_EPS = 1e-3
LLOYD_TOL = 1e-6
LLOYD_MAX_ITER = 100


@dataclass
class Codebook:
    centroids: np.ndarray                 # (size, dim)
    distortion_history: list[float] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.centroids.shape[0]


def _assign(vectors: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, float]:
    d2 = ((vectors[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    nearest = np.argmin(d2, axis=1)
    return nearest, float(d2[np.arange(len(vectors)), nearest].mean())


def _child(c: np.ndarray) -> np.ndarray:
    return c + SPLIT_EPS * np.where(np.abs(c) > 1e-8, np.abs(c), 1.0)


def train_codebook(
    vectors: np.ndarray, size: int = 256, seed: int = 0
) -> Codebook:
    """Grow the codebook from the global mean by binary splits plus Lloyd
    iterations.

    Each split keeps the parent centroid and adds a perturbed child, so the
    distortion history is non-increasing across the whole run, splits
    included.  Empty cells are refilled from the worst cell's far point.
    The procedure is fully deterministic; seed is part of the interface for
    callers that persist it alongside the model.
    """
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim != 2:
        raise ValueError("vectors must be a (n, dim) matrix")
    distinct = len(np.unique(vectors, axis=0))
    if distinct < size:
        raise ValueError(f"need at least {size} distinct vectors, got {distinct}")
    centroids = vectors.mean(axis=0, keepdims=True)
    history: list[float] = []
    while True:
        centroids, history = _lloyd(vectors, centroids, history)
        n = len(centroids)
        if n >= size:
            break
        n_split = min(n, size - n)
        grown = [c for c in centroids]
        for k in range(n_split):
            grown.append(_child(centroids[k]))
        centroids = np.array(grown)
    return Codebook(centroids=centroids, distortion_history=history)


def _lloyd(
    vectors: np.ndarray, centroids: np.ndarray, history: list[float]
) -> tuple[np.ndarray, list[float]]:
    prev = np.inf
    for _ in range(LLOYD_MAX_ITER):
        nearest, distortion = _assign(vectors, centroids)
        history.append(distortion)
        new = centroids.copy()
        counts = np.bincount(nearest, minlength=len(centroids))
        for k in range(len(centroids)):
            if counts[k] > 0:
                new[k] = vectors[nearest == k].mean(axis=0)
        empty = np.flatnonzero(counts == 0)
        if len(empty):
            # refill from the cell with the largest total distortion
            d2 = ((vectors - new[nearest]) ** 2).sum(axis=1)
            per_cell = np.bincount(nearest, weights=d2, minlength=len(centroids))
            for k in empty:
                worst = int(np.argmax(per_cell))
                far = vectors[nearest == worst]
                far_pt = far[np.argmax(((far - new[worst]) ** 2).sum(axis=1))]
                new[k] = far_pt
                per_cell[worst] = 0.0
        centroids = new
        if prev - distortion <= LLOYD_TOL * max(abs(prev), 1e-30) and not len(empty):
            break
        prev = distortion
    return centroids, history


def quantize(codebook: Codebook, vector: np.ndarray) -> int:
    """Index of the Euclidean-nearest centroid; ties take the lowest index."""
    v = np.asarray(vector, dtype=float)
    if v.shape != (codebook.centroids.shape[1],):
        raise ValueError(
            f"vector dimension {v.shape} does not match codebook ({codebook.centroids.shape[1]},)"
        )
    d2 = ((codebook.centroids - v) ** 2).sum(axis=1)
    return int(np.argmin(d2))


def quantize_batch(codebook: Codebook, vectors: np.ndarray) -> np.ndarray:
    vectors = np.asarray(vectors, dtype=float)
    d2 = ((vectors[:, None, :] - codebook.centroids[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)
