"""Novelty scoring by principal-subspace projection.

The projector holds the top-t eigenvectors of S^T S, where S stacks the
topic vectors of the labelled documents. A document's novelty is
1 - ||U U^T v|| / ||v||: near 0 when its topic vector lies inside the
labelled subspace, near 1 when orthogonal to it. The Gram matrix S^T S is
deliberately not mean-centered; centering is available as a switch but is
not the default behavior.

Eigenpairs come from power iteration with deflation on the k x k Gram
matrix, which stays cheap because k is the topic count, not the corpus
size.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from litscreen.features.base import TopicMatrix

_POWER_MAX_ITER = 200_000
_POWER_REL_TOL = 1e-12
_RANK_REL_TOL = 1e-10


@dataclass
class NoveltyProjector:
    U: np.ndarray  # k x t, orthonormal columns
    t: int
    source_count: int
    rank_reduced: bool = False  # requested t exceeded rank(S^T S)

    @property
    def k(self) -> int:
        return self.U.shape[0]


def _power_iteration(A: np.ndarray, basis: list[np.ndarray], scale: float) -> tuple[float, np.ndarray]:
    """Dominant eigenpair of symmetric PSD A, deflated against `basis`."""
    k = A.shape[0]
    # start from the largest column of A (one power step ahead of a unit vector)
    col_norms = np.linalg.norm(A, axis=0)
    x = A[:, int(col_norms.argmax())].copy()
    for b in basis:
        x -= (b @ x) * b
    if np.linalg.norm(x) < 1e-30:
        rng = np.random.default_rng(0)
        x = rng.standard_normal(k)
        for b in basis:
            x -= (b @ x) * b
    x /= np.linalg.norm(x)

    tol = max(_POWER_REL_TOL * scale, 1e-300)
    for _ in range(_POWER_MAX_ITER):
        y = A @ x
        for b in basis:
            y -= (b @ y) * b
        lam = float(x @ y)  # Rayleigh quotient at the current unit iterate
        residual = np.linalg.norm(y - lam * x)
        norm = np.linalg.norm(y)
        if norm < 1e-30:
            return 0.0, x
        x = y / norm
        if residual <= tol:
            break
    z = A @ x
    for b in basis:
        z -= (b @ z) * b
    return float(x @ z), x


def _fix_sign(v: np.ndarray) -> np.ndarray:
    threshold = 1e-12 * max(np.abs(v).max(), 1e-300)
    for comp in v:
        if abs(comp) > threshold:
            return v if comp > 0 else -v
    return v


def principal_eigenvectors(A: np.ndarray, t: int) -> tuple[np.ndarray, np.ndarray, bool]:
    """Top-t unit eigenvectors of a symmetric PSD matrix by deflated power
    iteration. Returns (U, eigenvalues, rank_reduced); columns carry the
    sign convention that their first nonzero component is positive.
    """
    A = np.asarray(A, dtype=np.float64)
    k = A.shape[0]
    if A.shape != (k, k):
        raise ValueError("matrix must be square")
    t = min(t, k)

    work = A.copy()
    # infinity norm bounds the spectral radius for symmetric A; good tolerance scale
    scale = float(np.abs(A).sum(axis=1).max()) if k else 0.0
    basis: list[np.ndarray] = []
    eigenvalues: list[float] = []
    rank_reduced = False
    for _ in range(t):
        lam, v = _power_iteration(work, basis, scale if scale > 0 else 1.0)
        if scale <= 0 or lam <= _RANK_REL_TOL * scale:
            rank_reduced = True
            break
        basis.append(v)
        eigenvalues.append(lam)
        work = work - lam * np.outer(v, v)

    U = np.column_stack([_fix_sign(v) for v in basis]) if basis else np.zeros((k, 0))
    return U, np.asarray(eigenvalues), rank_reduced


def fit_projector(
    V: TopicMatrix | np.ndarray,
    labelled_ids: Iterable[int],
    t: int,
    center: bool = False,
) -> NoveltyProjector:
    """Build the projector from the labelled rows of the topic matrix.

    `labelled_ids` are row indices into V. If t exceeds the rank of S^T S
    the component count is reduced to the rank and the projector is marked
    rank_reduced.
    """
    rows = np.asarray(sorted(set(int(i) for i in labelled_ids)), dtype=np.intp)
    if rows.size == 0:
        raise ValueError("labelled set is empty")
    if t < 1:
        raise ValueError(f"component count must be >= 1, got {t}")
    M = V.V if isinstance(V, TopicMatrix) else np.asarray(V, dtype=np.float64)
    S = M[rows]
    if center:
        S = S - S.mean(axis=0, keepdims=True)
    t_eff = min(t, rows.size, S.shape[1])
    gram = S.T @ S
    U, _, rank_reduced = principal_eigenvectors(gram, t_eff)
    if U.shape[1] == 0:
        raise ValueError("labelled topic vectors are all zero; cannot fit a projector")
    return NoveltyProjector(
        U=U,
        t=U.shape[1],
        source_count=int(rows.size),
        rank_reduced=rank_reduced or U.shape[1] < t,
    )


def novelty_score(proj: NoveltyProjector, v: np.ndarray) -> float:
    """1 - ||U U^T v|| / ||v||, clamped to [0, 1]."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.shape[0] != proj.k:
        raise ValueError(f"expected a length-{proj.k} topic vector, got {v.shape[0]}")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("topic vector has zero norm")
    # ||U U^T v|| = ||U^T v|| because U has orthonormal columns
    projected = np.linalg.norm(proj.U.T @ v)
    return float(np.clip(1.0 - projected / norm, 0.0, 1.0))


def novelty_scores(proj: NoveltyProjector, rows: np.ndarray) -> np.ndarray:
    """Vectorized novelty_score over the rows of a topic matrix."""
    rows = np.asarray(rows, dtype=np.float64)
    norms = np.linalg.norm(rows, axis=1)
    if np.any(norms == 0):
        raise ValueError("topic vectors must have nonzero norm")
    projected = np.linalg.norm(rows @ proj.U, axis=1)
    return np.clip(1.0 - projected / norms, 0.0, 1.0)


def assign_topic(v: Sequence[float] | np.ndarray) -> int:
    """Index of the largest entry; ties go to the lowest index."""
    v = np.asarray(v)
    if v.size == 0:
        raise ValueError("cannot assign a topic to an empty vector")
    return int(np.argmax(v))


def topics_discovered(V: TopicMatrix | np.ndarray, labelled_ids: Iterable[int]) -> int:
    """Number of distinct argmax topics over the labelled rows."""
    M = V.V if isinstance(V, TopicMatrix) else np.asarray(V)
    rows = sorted(set(int(i) for i in labelled_ids))
    if not rows:
        return 0
    return len({int(np.argmax(M[r])) for r in rows})


def occupied_topics(V: TopicMatrix | np.ndarray) -> int:
    """Number of distinct argmax topics across the whole pool."""
    M = V.V if isinstance(V, TopicMatrix) else np.asarray(V)
    if M.shape[0] == 0:
        return 0
    return len(set(np.argmax(M, axis=1).tolist()))
