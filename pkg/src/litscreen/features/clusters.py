"""Cluster-distance topic features.

k-means (k-means++ seeding, Lloyd iterations) over any document
representation; each document is then encoded as its distances to the
cluster centroids, normalized so every row sums to 1. Works over dense
embeddings and sparse tf-idf rows alike, covering both the
embedding-clustering and bag-of-words-clustering topic models.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from litscreen.features.base import FeatureMatrix


class ClusterError(ValueError):
    pass


@dataclass
class ClusterModel:
    centroids: np.ndarray  # c x p, dense
    distance: str = "euclidean"  # {euclidean, cosine}

    def __post_init__(self) -> None:
        self.centroids = np.asarray(self.centroids, dtype=np.float64)
        if self.centroids.ndim != 2 or self.centroids.shape[0] < 2:
            raise ClusterError("need at least 2 centroids")
        if not np.all(np.isfinite(self.centroids)):
            raise ClusterError("centroids contain non-finite values")
        if self.distance not in ("euclidean", "cosine"):
            raise ClusterError(f"unknown distance {self.distance!r}")

    @property
    def c(self) -> int:
        return self.centroids.shape[0]

    def distances(self, X) -> np.ndarray:
        """Distance of each row of X to each centroid."""
        if self.distance == "euclidean":
            return _euclidean_distances(X, self.centroids)
        return _cosine_distances(X, self.centroids)

    def distance_rows(self, X) -> np.ndarray:
        """Distances normalized so each row sums to 1."""
        dist = self.distances(X)
        sums = dist.sum(axis=1, keepdims=True)
        if np.any(sums == 0):
            raise ClusterError("a document is at zero distance from every centroid")
        return dist / sums


def _row_sq_norms(X) -> np.ndarray:
    if sp.issparse(X):
        return np.asarray(X.multiply(X).sum(axis=1)).ravel()
    return np.einsum("ij,ij->i", X, X)


def _euclidean_distances(X, centroids: np.ndarray) -> np.ndarray:
    cross = X @ centroids.T
    if sp.issparse(cross):
        cross = cross.toarray()
    cross = np.asarray(cross)
    sq = _row_sq_norms(X)[:, None] + np.einsum("ij,ij->i", centroids, centroids)[None, :] - 2.0 * cross
    np.maximum(sq, 0.0, out=sq)
    return np.sqrt(sq)


def _cosine_distances(X, centroids: np.ndarray) -> np.ndarray:
    cross = X @ centroids.T
    if sp.issparse(cross):
        cross = cross.toarray()
    cross = np.asarray(cross, dtype=np.float64)
    xn = np.sqrt(_row_sq_norms(X))
    cn = np.linalg.norm(centroids, axis=1)
    xn[xn == 0] = 1.0
    cn[cn == 0] = 1.0
    sim = cross / xn[:, None] / cn[None, :]
    return np.clip(1.0 - sim, 0.0, 2.0)


def _mean_rows(X, indices: np.ndarray) -> np.ndarray:
    sub = X[indices]
    if sp.issparse(sub):
        return np.asarray(sub.mean(axis=0)).ravel()
    return np.asarray(sub, dtype=np.float64).mean(axis=0)


def _kmeans_pp_init(X, c: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    first = int(rng.integers(n))
    centroids = [np.asarray(X[first].todense()).ravel() if sp.issparse(X) else np.asarray(X[first], dtype=np.float64)]
    closest_sq = _euclidean_distances(X, np.vstack(centroids))[:, 0] ** 2
    for _ in range(1, c):
        total = closest_sq.sum()
        if total <= 0:
            # all remaining points coincide with a centroid; pick any unused point
            candidates = np.flatnonzero(closest_sq == 0)
            pick = int(rng.choice(candidates))
        else:
            u = rng.random() * total
            pick = int(np.searchsorted(np.cumsum(closest_sq), u))
            pick = min(pick, n - 1)
        row = np.asarray(X[pick].todense()).ravel() if sp.issparse(X) else np.asarray(X[pick], dtype=np.float64)
        centroids.append(row)
        d = _euclidean_distances(X, row[None, :])[:, 0] ** 2
        np.minimum(closest_sq, d, out=closest_sq)
    return np.vstack(centroids)


def cluster_topics(
    matrix: FeatureMatrix | np.ndarray | sp.spmatrix,
    c: int,
    seed: int = 0,
    distance: str = "euclidean",
    max_iter: int = 100,
) -> tuple[ClusterModel, FeatureMatrix]:
    """Cluster document rows and return normalized centroid-distance features.

    Returns (model, features) where features.values[d, j] is the distance of
    document d to centroid j divided by the document's total distance over
    all centroids.
    """
    X = matrix.values if isinstance(matrix, FeatureMatrix) else matrix
    n = X.shape[0]
    if c < 2:
        raise ClusterError(f"cluster count must be >= 2, got {c}")
    if c > n:
        raise ClusterError(f"cluster count {c} exceeds document count {n}")

    dense = np.asarray(X.todense()) if sp.issparse(X) else np.asarray(X, dtype=np.float64)
    if np.all(dense == dense[0]):
        raise ClusterError("all rows are identical; clustering is undefined")

    work = X
    if distance == "cosine":
        norms = np.sqrt(_row_sq_norms(X))
        norms[norms == 0] = 1.0
        work = (X.multiply(1.0 / norms[:, None]).tocsr() if sp.issparse(X) else X / norms[:, None])

    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(work, c, rng)
    assignment = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iter):
        dist = _euclidean_distances(work, centroids)
        new_assignment = dist.argmin(axis=1)
        for j in range(c):
            members = np.flatnonzero(new_assignment == j)
            if members.size:
                centroids[j] = _mean_rows(work, members)
            else:
                # reseed an empty cluster at the point farthest from its centroid
                farthest = int(dist.min(axis=1).argmax())
                centroids[j] = (
                    np.asarray(work[farthest].todense()).ravel()
                    if sp.issparse(work)
                    else np.asarray(work[farthest], dtype=np.float64)
                )
                new_assignment[farthest] = j
        if distance == "cosine":
            cn = np.linalg.norm(centroids, axis=1)
            cn[cn == 0] = 1.0
            centroids = centroids / cn[:, None]
        if np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment

    model = ClusterModel(centroids=centroids, distance=distance)
    rows = model.distance_rows(X)
    return model, FeatureMatrix(values=rows, kind="cluster_distance_dense")
