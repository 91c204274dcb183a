"""Latent Dirichlet Allocation via collapsed Gibbs sampling.

The sampler keeps the standard count statistics (doc-topic, topic-word,
topic totals) and runs full sweeps over every token. Sampling is seeded and
single-threaded, so a fit is bit-reproducible. Held-out documents are folded
in by sampling their assignments while the topic-word counts stay frozen.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

from litscreen.corpus import Corpus, Document, Vocabulary, doc_term_ids, tokenize
from litscreen.features.base import TopicMatrix

LDA_FORMAT_VERSION = 1


@dataclass
class LdaModel:
    topic_word: np.ndarray  # k x |vocab| assignment counts
    doc_topic: np.ndarray  # n x k assignment counts
    topic_totals: np.ndarray  # k, row sums of topic_word
    doc_lengths: np.ndarray  # n, retained tokens per training document
    alpha: float
    beta: float
    seed: int
    iterations: int
    vocab_hash: str

    @property
    def k(self) -> int:
        return self.topic_word.shape[0]

    @property
    def vocab_size(self) -> int:
        return self.topic_word.shape[1]

    @property
    def n_docs(self) -> int:
        return self.doc_topic.shape[0]


@njit(cache=True)
def _gibbs_fit(doc_ids, word_ids, k, vocab_size, alpha, beta, sweeps, seed):
    np.random.seed(seed)
    n_tokens = word_ids.shape[0]
    n_docs = doc_ids.max() + 1 if n_tokens > 0 else 0

    z = np.empty(n_tokens, dtype=np.int32)
    n_dk = np.zeros((n_docs, k), dtype=np.int64)
    n_kw = np.zeros((k, vocab_size), dtype=np.int64)
    n_k = np.zeros(k, dtype=np.int64)

    for i in range(n_tokens):
        topic = np.random.randint(0, k)
        z[i] = topic
        n_dk[doc_ids[i], topic] += 1
        n_kw[topic, word_ids[i]] += 1
        n_k[topic] += 1

    probs = np.empty(k, dtype=np.float64)
    vbeta = vocab_size * beta
    for _ in range(sweeps):
        for i in range(n_tokens):
            d = doc_ids[i]
            w = word_ids[i]
            old = z[i]
            n_dk[d, old] -= 1
            n_kw[old, w] -= 1
            n_k[old] -= 1

            total = 0.0
            for t in range(k):
                p = (n_dk[d, t] + alpha) * (n_kw[t, w] + beta) / (n_k[t] + vbeta)
                total += p
                probs[t] = total
            u = np.random.random() * total
            new = 0
            while probs[new] < u:
                new += 1

            z[i] = new
            n_dk[d, new] += 1
            n_kw[new, w] += 1
            n_k[new] += 1

    return n_dk, n_kw, n_k


@njit(cache=True)
def _gibbs_infer(doc_ids, word_ids, n_kw, n_k, k, alpha, beta, sweeps, seed):
    np.random.seed(seed)
    n_tokens = word_ids.shape[0]
    n_docs = doc_ids.max() + 1 if n_tokens > 0 else 0
    vocab_size = n_kw.shape[1]

    z = np.empty(n_tokens, dtype=np.int32)
    n_dk = np.zeros((n_docs, k), dtype=np.int64)
    for i in range(n_tokens):
        topic = np.random.randint(0, k)
        z[i] = topic
        n_dk[doc_ids[i], topic] += 1

    probs = np.empty(k, dtype=np.float64)
    vbeta = vocab_size * beta
    for _ in range(sweeps):
        for i in range(n_tokens):
            d = doc_ids[i]
            w = word_ids[i]
            old = z[i]
            n_dk[d, old] -= 1

            total = 0.0
            for t in range(k):
                p = (n_dk[d, t] + alpha) * (n_kw[t, w] + beta) / (n_k[t] + vbeta)
                total += p
                probs[t] = total
            u = np.random.random() * total
            new = 0
            while probs[new] < u:
                new += 1

            z[i] = new
            n_dk[d, new] += 1

    return n_dk


def _flatten(term_ids_per_doc: list[list[int]]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    doc_ids: list[int] = []
    word_ids: list[int] = []
    lengths = np.zeros(len(term_ids_per_doc), dtype=np.int64)
    for d, ids in enumerate(term_ids_per_doc):
        lengths[d] = len(ids)
        doc_ids.extend([d] * len(ids))
        word_ids.extend(ids)
    return (
        np.asarray(doc_ids, dtype=np.int32),
        np.asarray(word_ids, dtype=np.int32),
        lengths,
    )


def lda_fit(
    corpus: Corpus,
    vocab: Vocabulary,
    k: int,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 500,
    seed: int = 0,
) -> LdaModel:
    """Fit an LDA model with `iterations` full Gibbs sweeps.

    alpha defaults to 50 / k. Deterministic for a fixed seed.
    """
    if k < 1:
        raise ValueError(f"topic count must be >= 1, got {k}")
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    if corpus.n == 0:
        raise ValueError("cannot fit LDA on an empty corpus")
    if alpha is None:
        alpha = 50.0 / k
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")

    term_ids = doc_term_ids(corpus, vocab)
    doc_ids, word_ids, lengths = _flatten(term_ids)
    if word_ids.size == 0:
        raise ValueError("corpus has zero retained tokens under this vocabulary")

    if k == 1:
        # single topic: every token belongs to topic 0, no sampling needed
        n_dk = lengths.reshape(-1, 1).astype(np.int64)
        n_kw = np.zeros((1, len(vocab)), dtype=np.int64)
        for ids in term_ids:
            for w in ids:
                n_kw[0, w] += 1
        n_k = np.array([word_ids.size], dtype=np.int64)
    else:
        n_dk, n_kw, n_k = _gibbs_fit(
            doc_ids, word_ids, k, len(vocab), float(alpha), float(beta), int(iterations), int(seed)
        )
        if n_dk.shape[0] < corpus.n:
            # trailing zero-token documents never appear in doc_ids
            pad = np.zeros((corpus.n - n_dk.shape[0], k), dtype=np.int64)
            n_dk = np.vstack([n_dk, pad])

    return LdaModel(
        topic_word=n_kw,
        doc_topic=n_dk,
        topic_totals=n_k,
        doc_lengths=lengths,
        alpha=float(alpha),
        beta=float(beta),
        seed=int(seed),
        iterations=int(iterations),
        vocab_hash=vocab.sha256(),
    )


def lda_doc_topics(model: LdaModel) -> TopicMatrix:
    """Smoothed per-document topic proportions from the fitted counts.

    row(d, i) = (doc_topic(d, i) + alpha) / (tokens(d) + k * alpha).
    Zero-token documents get a uniform row and are flagged.
    """
    k = model.k
    counts = model.doc_topic.astype(np.float64)
    lengths = model.doc_lengths.astype(np.float64)
    rows = (counts + model.alpha) / (lengths + k * model.alpha)[:, None]
    flagged = tuple(int(i) for i in np.flatnonzero(model.doc_lengths == 0))
    return TopicMatrix(V=rows, flagged=flagged)


def lda_infer(
    model: LdaModel,
    heldout: list[Document],
    vocab: Vocabulary,
    iterations: int = 100,
    seed: int = 0,
) -> TopicMatrix:
    """Fold held-out documents into the trained topic space.

    Topic-word counts stay fixed; only the held-out assignments are sampled.
    Out-of-vocabulary tokens are skipped; all-OOV documents get a uniform
    row and are flagged.
    """
    if vocab.sha256() != model.vocab_hash:
        raise ValueError("vocabulary does not match the one the model was trained with")
    term_ids = [
        [vocab.term_to_index[t] for t in tokenize(doc, vocab.tokenizer) if t in vocab.term_to_index]
        for doc in heldout
    ]
    doc_ids, word_ids, lengths = _flatten(term_ids)
    k = model.k

    if word_ids.size == 0:
        n_dk = np.zeros((len(heldout), k), dtype=np.int64)
    else:
        n_dk = _gibbs_infer(
            doc_ids,
            word_ids,
            model.topic_word,
            model.topic_totals,
            k,
            float(model.alpha),
            float(model.beta),
            int(iterations),
            int(seed),
        )
        if n_dk.shape[0] < len(heldout):
            n_dk = np.vstack([n_dk, np.zeros((len(heldout) - n_dk.shape[0], k), dtype=np.int64)])

    rows = (n_dk.astype(np.float64) + model.alpha) / (lengths.astype(np.float64) + k * model.alpha)[:, None]
    flagged = tuple(int(i) for i in np.flatnonzero(lengths == 0))
    return TopicMatrix(V=rows, flagged=flagged)


def save_lda(model: LdaModel, path: str | Path) -> None:
    """Persist the model as a single self-describing .npz file."""
    meta = {
        "format_version": LDA_FORMAT_VERSION,
        "alpha": model.alpha,
        "beta": model.beta,
        "seed": model.seed,
        "iterations": model.iterations,
        "vocab_hash": model.vocab_hash,
    }
    np.savez(
        Path(path),
        topic_word=model.topic_word,
        doc_topic=model.doc_topic,
        topic_totals=model.topic_totals,
        doc_lengths=model.doc_lengths,
        meta=np.frombuffer(json.dumps(meta, sort_keys=True).encode("utf-8"), dtype=np.uint8),
    )


def load_lda(path: str | Path) -> LdaModel:
    with np.load(Path(path)) as data:
        meta = json.loads(bytes(data["meta"]).decode("utf-8"))
        if meta.get("format_version") != LDA_FORMAT_VERSION:
            raise ValueError(f"unsupported LDA model format version {meta.get('format_version')!r}")
        return LdaModel(
            topic_word=data["topic_word"],
            doc_topic=data["doc_topic"],
            topic_totals=data["topic_totals"],
            doc_lengths=data["doc_lengths"],
            alpha=float(meta["alpha"]),
            beta=float(meta["beta"]),
            seed=int(meta["seed"]),
            iterations=int(meta["iterations"]),
            vocab_hash=str(meta["vocab_hash"]),
        )
