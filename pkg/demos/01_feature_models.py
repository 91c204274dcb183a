"""Tour of the five document representations.

Builds a small synthetic corpus and walks each feature model over it:
tf-idf bag-of-words, LDA topic proportions, paragraph vectors, and the two
cluster-distance topic models (over embeddings and over tf-idf).
"""

import numpy as np

from litscreen.corpus import build_vocabulary, tokenize
from litscreen.features import (
    cluster_topics,
    lda_doc_topics,
    lda_fit,
    pv_train,
    tfidf,
)
from litscreen.synthetic import two_cluster_corpus

corpus, clusters = two_cluster_corpus(n=120, relevant_fraction=0.1, seed=7)
print(f"corpus: {corpus.n} documents, relevant fraction {corpus.relevant_fraction:.3f}")
print("sample tokens:", tokenize(corpus[0])[:8])

vocab = build_vocabulary(corpus, min_df=1, max_df_fraction=1.0)
print(f"\nvocabulary: {len(vocab)} terms, e.g. {vocab.terms[:5]}")

# 1. tf-idf bag-of-words
bow = tfidf(corpus, vocab)
norms = np.sqrt(np.asarray(bow.values.multiply(bow.values).sum(axis=1)).ravel())
print(f"\n[bow]   sparse {bow.values.shape}, {bow.values.nnz} nonzeros, row norms ~ {norms.mean():.3f}")

# 2. LDA topic proportions (the novelty scorer also consumes these)
lda = lda_fit(corpus, vocab, k=6, alpha=0.5, iterations=150, seed=0)
topics = lda_doc_topics(lda)
print(f"[lda]   dense {topics.V.shape}, rows sum to {topics.V.sum(axis=1).mean():.6f}")
dominant = np.argmax(topics.V, axis=1)
for cluster in ("A", "B"):
    members = [i for i, doc in enumerate(corpus) if clusters[doc.id] == cluster]
    counts = np.bincount(dominant[members], minlength=6)
    print(f"        cluster {cluster} dominant-topic histogram: {counts.tolist()}")

# 3. paragraph vectors
emb = pv_train(corpus, dim=16, window=4, negative=5, epochs=20, seed=0)
unit = emb.vectors / np.linalg.norm(emb.vectors, axis=1, keepdims=True)
sims = unit @ unit.T
labels = np.asarray([clusters[d] == "A" for d in emb.ids])
same = labels[:, None] == labels[None, :]
off = ~np.eye(len(labels), dtype=bool)
print(f"[pv]    dense {emb.vectors.shape}, intra-cluster cosine {sims[same & off].mean():.3f} "
      f"vs inter-cluster {sims[~same].mean():.3f}")

# 4 & 5. cluster-distance topics over either representation
pv_model, pv_topics = cluster_topics(emb.vectors, c=6, seed=0)
bow_model, bow_topics = cluster_topics(bow, c=6, seed=0)
print(f"[pv_tm] rows sum to {pv_topics.values.sum(axis=1).mean():.6f} over {pv_model.c} centroids")
print(f"[bow_tm] rows sum to {bow_topics.values.sum(axis=1).mean():.6f} over {bow_model.c} centroids")
