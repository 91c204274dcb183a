"""Paragraph vectors: a compact PV-DBOW trainer plus a text interchange format.

Each document owns a dense vector trained to predict context words sampled
from inside a window, using negative sampling against a unigram^0.75 noise
distribution. Training is single-threaded and seeded, so vectors are
reproducible. Externally trained embeddings can be loaded from the text
format written by save_embeddings (header "n dim", then "id v1 ... vdim"
per line).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

from litscreen.corpus import Corpus, TokenizerConfig, tokenize


class EmbeddingError(ValueError):
    pass


@dataclass
class EmbeddingSet:
    """id -> fixed-dimension vector, kept in corpus order."""

    ids: tuple[str, ...]
    vectors: np.ndarray  # n x dim, float64

    def __post_init__(self) -> None:
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.ids):
            raise EmbeddingError("vector matrix shape does not match id count")
        self._index = {doc_id: i for i, doc_id in enumerate(self.ids)}

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def get(self, doc_id: str) -> np.ndarray:
        return self.vectors[self._index[doc_id]]


@njit(cache=True)
def _dbow_train(token_ids, doc_offsets, noise_cdf, doc_vecs, word_vecs,
                window, negative, epochs, lr0, lr_min, seed):
    np.random.seed(seed)
    n_docs = doc_offsets.shape[0] - 1
    dim = doc_vecs.shape[1]
    total_updates = epochs * token_ids.shape[0]
    done = 0
    grad = np.empty(dim, dtype=np.float32)

    for _ in range(epochs):
        for d in range(n_docs):
            start = doc_offsets[d]
            end = doc_offsets[d + 1]
            length = end - start
            if length == 0:
                continue
            for i in range(length):
                lr = lr0 - (lr0 - lr_min) * (done / total_updates)
                done += 1

                # pick a context word within a reduced window of position i;
                # single-token documents predict their only token
                if length == 1:
                    target = token_ids[start]
                else:
                    r = np.random.randint(1, window + 1)
                    lo = i - r
                    if lo < 0:
                        lo = 0
                    hi = i + r
                    if hi > length - 1:
                        hi = length - 1
                    j = np.random.randint(lo, hi)  # hi - lo slots excluding one
                    if j >= i:
                        j += 1
                    target = token_ids[start + j]

                h = doc_vecs[d]
                for c in range(dim):
                    grad[c] = 0.0
                for s in range(negative + 1):
                    if s == 0:
                        w = target
                        label = 1.0
                    else:
                        u = np.random.random()
                        w = np.searchsorted(noise_cdf, u)
                        if w == target:
                            continue
                        label = 0.0
                    dot = 0.0
                    for c in range(dim):
                        dot += h[c] * word_vecs[w, c]
                    if dot > 8.0:
                        f = 1.0
                    elif dot < -8.0:
                        f = 0.0
                    else:
                        f = 1.0 / (1.0 + np.exp(-dot))
                    g = (label - f) * lr
                    for c in range(dim):
                        grad[c] += g * word_vecs[w, c]
                        word_vecs[w, c] += g * h[c]
                for c in range(dim):
                    h[c] += grad[c]


def pv_train(
    corpus: Corpus,
    dim: int = 300,
    window: int = 5,
    negative: int = 5,
    epochs: int = 20,
    seed: int = 0,
    tokenizer: TokenizerConfig | None = None,
    lr0: float = 0.025,
    lr_min: float = 1e-4,
) -> EmbeddingSet:
    """Train PV-DBOW document vectors over the corpus."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    if window < 1 or negative < 1 or epochs < 1:
        raise ValueError("window, negative, and epochs must all be >= 1")
    if corpus.n == 0:
        raise EmbeddingError("cannot train embeddings on an empty corpus")
    tokenizer = tokenizer or TokenizerConfig()

    token_lists = [tokenize(doc, tokenizer) for doc in corpus]
    vocab: dict[str, int] = {}
    counts: list[int] = []
    for tokens in token_lists:
        for tok in tokens:
            idx = vocab.get(tok)
            if idx is None:
                vocab[tok] = len(counts)
                counts.append(1)
            else:
                counts[idx] += 1
    if not vocab:
        raise EmbeddingError("corpus has zero tokens after preprocessing")
    if max(len(t) for t in token_lists) < 2:
        raise EmbeddingError(
            "degenerate corpus: no document has two or more tokens, window sampling is impossible"
        )

    token_ids = np.empty(sum(len(t) for t in token_lists), dtype=np.int32)
    doc_offsets = np.zeros(corpus.n + 1, dtype=np.int64)
    pos = 0
    for d, tokens in enumerate(token_lists):
        for tok in tokens:
            token_ids[pos] = vocab[tok]
            pos += 1
        doc_offsets[d + 1] = pos

    noise = np.asarray(counts, dtype=np.float64) ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())
    noise_cdf[-1] = 1.0

    rng = np.random.default_rng(seed)
    doc_vecs = ((rng.random((corpus.n, dim), dtype=np.float64) - 0.5) / dim).astype(np.float32)
    word_vecs = np.zeros((len(vocab), dim), dtype=np.float32)

    _dbow_train(
        token_ids,
        doc_offsets,
        noise_cdf,
        doc_vecs,
        word_vecs,
        int(window),
        int(negative),
        int(epochs),
        np.float64(lr0),
        np.float64(lr_min),
        int(seed),
    )
    return EmbeddingSet(ids=corpus.ids, vectors=doc_vecs.astype(np.float64))


def save_embeddings(embeddings: EmbeddingSet, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"{embeddings.n} {embeddings.dim}\n")
        for doc_id, vec in zip(embeddings.ids, embeddings.vectors):
            fh.write(doc_id + " " + " ".join(repr(float(x)) for x in vec) + "\n")


def load_embeddings(path: str | Path, corpus: Corpus) -> EmbeddingSet:
    """Load embeddings from the text format and align them to corpus order.

    Every corpus id must be present; vectors must all match the declared
    dimension.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise EmbeddingError(f"{path}:1: header must be 'n dim'")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise EmbeddingError(f"{path}:1: header must be two integers") from exc

        by_id: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            doc_id = parts[0]
            if len(parts) - 1 != dim:
                raise EmbeddingError(
                    f"{path}:{lineno}: expected {dim} values for {doc_id!r}, got {len(parts) - 1}"
                )
            try:
                by_id[doc_id] = np.asarray([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError as exc:
                raise EmbeddingError(f"{path}:{lineno}: non-numeric value for {doc_id!r}") from exc

    if len(by_id) != count:
        raise EmbeddingError(f"{path}: header declares {count} vectors, found {len(by_id)}")
    missing = [doc_id for doc_id in corpus.ids if doc_id not in by_id]
    if missing:
        raise EmbeddingError(f"{path}: missing vectors for corpus ids {missing[:5]!r}")
    vectors = np.vstack([by_id[doc_id] for doc_id in corpus.ids])
    return EmbeddingSet(ids=corpus.ids, vectors=vectors)
