"""Synthetic corpora for benchmarking screening strategies.

These generators build labelled pools with known structure: disjoint
vocabulary clusters, cluster-specific relevance markers, and topic-mixture
documents drawn from known word distributions. They make strategy
comparisons and sampler-recovery checks reproducible without shipping any
review data.
"""

from __future__ import annotations

import numpy as np

from litscreen.corpus import Corpus, Document


def two_cluster_corpus(
    n: int = 1000,
    relevant_fraction: float = 0.05,
    seed: int = 0,
    base_vocab: int = 20,
    marker_vocab: int = 5,
    base_tokens: int = 15,
    marker_tokens: int = 25,
    veins: tuple[int, int] = (2, 3),
) -> tuple[Corpus, dict[str, str]]:
    """Two topical clusters with disjoint vocabularies; relevant documents
    sit in topical veins.

    Documents in cluster A draw from one word set, cluster B from another.
    Relevant documents additionally carry marker words from one of their
    cluster's veins (veins[0] distinct vein vocabularies in A, veins[1] in
    B, all disjoint), so a screener seeded inside one cluster has no direct
    relevance evidence about the other cluster's veins, while topic-level
    exploration can seek them out. Returns
    (corpus, cluster map id -> "A"/"B").
    """
    if n < 4:
        raise ValueError("need at least 4 documents")
    rng = np.random.default_rng(seed)
    n_a = n // 2
    n_relevant = int(round(relevant_fraction * n))
    if n_relevant < 2:
        raise ValueError("need at least 2 relevant documents (one per cluster)")
    rel_a = n_relevant - n_relevant // 2
    rel_b = n_relevant // 2

    base_words = {
        "A": [f"aqua{i:02d}" for i in range(base_vocab)],
        "B": [f"bryo{i:02d}" for i in range(base_vocab)],
    }
    vein_words = {
        cluster: [
            [f"vein{cluster.lower()}{v}w{i}" for i in range(marker_vocab)]
            for v in range(n_veins)
        ]
        for cluster, n_veins in (("A", veins[0]), ("B", veins[1]))
    }

    docs: list[Document] = []
    clusters: dict[str, str] = {}
    order = 0
    for cluster, count, rel_count in (("A", n_a, rel_a), ("B", n - n_a, rel_b)):
        rel_positions = rng.choice(count, size=rel_count, replace=False).tolist()
        vein_of = {pos: j % len(vein_words[cluster]) for j, pos in enumerate(rel_positions)}
        for i in range(count):
            tokens = list(rng.choice(base_words[cluster], size=base_tokens))
            label = 1 if i in vein_of else 0
            if label:
                tokens += list(rng.choice(vein_words[cluster][vein_of[i]], size=marker_tokens))
            doc_id = f"d{order:04d}"
            docs.append(Document(id=doc_id, title="", abstract=" ".join(tokens), label=label))
            clusters[doc_id] = cluster
            order += 1
    return Corpus(docs), clusters


def disjoint_vocab_groups(
    n_per_group: int = 20,
    vocab_per_group: int = 15,
    tokens_per_doc: int = 40,
    seed: int = 0,
) -> tuple[Corpus, dict[str, int]]:
    """Two unlabelled document groups with fully disjoint vocabularies.

    Returns (corpus, group map id -> 0/1). Useful for checking that an
    embedding separates the groups.
    """
    rng = np.random.default_rng(seed)
    groups: dict[str, int] = {}
    docs: list[Document] = []
    for g in range(2):
        vocab = [f"g{g}word{i:02d}" for i in range(vocab_per_group)]
        for i in range(n_per_group):
            tokens = rng.choice(vocab, size=tokens_per_doc)
            doc_id = f"g{g}d{i:03d}"
            docs.append(Document(id=doc_id, title="", abstract=" ".join(tokens)))
            groups[doc_id] = g
    return Corpus(docs), groups


def topic_mixture_corpus(
    n_docs: int = 200,
    words_per_doc: int = 50,
    k: int = 2,
    words_per_topic: int = 10,
    concentration: float = 0.5,
    seed: int = 0,
) -> tuple[Corpus, np.ndarray, list[str]]:
    """Documents sampled from k topics with disjoint word supports.

    Each document mixes topics via a Dirichlet(concentration) draw; each
    token picks a topic, then a word from that topic's (uniform)
    distribution. Returns (corpus, phi, word_list) where phi[k] is the
    generating word distribution over word_list.
    """
    rng = np.random.default_rng(seed)
    word_list = [f"t{t}w{i:02d}" for t in range(k) for i in range(words_per_topic)]
    vocab_size = k * words_per_topic
    phi = np.zeros((k, vocab_size))
    for t in range(k):
        phi[t, t * words_per_topic : (t + 1) * words_per_topic] = 1.0 / words_per_topic

    docs = []
    for d in range(n_docs):
        theta = rng.dirichlet([concentration] * k)
        topics = rng.choice(k, size=words_per_doc, p=theta)
        tokens = []
        for t in topics:
            tokens.append(word_list[int(rng.choice(vocab_size, p=phi[t]))])
        docs.append(Document(id=f"d{d:04d}", title="", abstract=" ".join(tokens)))
    return Corpus(docs), phi, word_list
