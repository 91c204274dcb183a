"""Shared feature-matrix containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

KINDS = ("tfidf_sparse", "topic_dense", "embedding_dense", "cluster_distance_dense")


@dataclass
class FeatureMatrix:
    """n x p document representation in corpus row order.

    ``flagged`` lists row indices built from degenerate input (for example
    zero-token documents); such rows are kept so document identity survives
    screening.
    """

    values: np.ndarray | sp.csr_matrix
    kind: str
    flagged: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown feature kind {self.kind!r}")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def rows(self, indices) -> np.ndarray | sp.csr_matrix:
        return self.values[np.asarray(indices, dtype=np.intp)]


@dataclass
class TopicMatrix:
    """Per-document topic proportions: non-negative rows summing to 1."""

    V: np.ndarray
    flagged: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        self.V = np.asarray(self.V, dtype=np.float64)
        if self.V.ndim != 2:
            raise ValueError("topic matrix must be 2-dimensional")

    @property
    def n(self) -> int:
        return self.V.shape[0]

    @property
    def k(self) -> int:
        return self.V.shape[1]

    def validate(self, atol: float = 1e-6) -> None:
        if np.any(self.V < -atol):
            raise ValueError("topic matrix has negative entries")
        sums = self.V.sum(axis=1)
        if not np.allclose(sums, 1.0, atol=atol):
            raise ValueError("topic matrix rows must sum to 1")

    def as_features(self) -> FeatureMatrix:
        return FeatureMatrix(values=self.V, kind="topic_dense", flagged=self.flagged)
