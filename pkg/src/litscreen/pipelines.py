"""Feature-pipeline assembly shared by the CLI and the live service.

Maps a feature-model name ({bow, lda, pv, pv_tm, bow_tm}) plus a parameter
dict onto the concrete extractor calls, returning the classifier feature
matrix together with the intermediate artifacts (vocabulary, LDA model,
embeddings, cluster model) that callers may persist or reuse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from litscreen.corpus import Corpus, Vocabulary, build_vocabulary
from litscreen.features import (
    ClusterModel,
    EmbeddingSet,
    FeatureMatrix,
    LdaModel,
    TopicMatrix,
    cluster_topics,
    lda_doc_topics,
    lda_fit,
    pv_train,
    tfidf,
)

FEATURE_MODELS = ("bow", "lda", "pv", "pv_tm", "bow_tm")

DEFAULT_FEATURE_PARAMS: dict[str, Any] = {
    "min_df": 1,
    "max_df_fraction": 1.0,
    "sublinear_tf": False,
    "lda_topics": 300,
    "lda_alpha": None,  # 50 / k when unset
    "lda_beta": 0.01,
    "lda_iterations": 500,
    "lda_seed": 0,
    "pv_dim": 300,
    "pv_window": 5,
    "pv_negative": 5,
    "pv_epochs": 20,
    "pv_seed": 0,
    "clusters": 300,
    "cluster_seed": 0,
    "cluster_distance": "euclidean",
}


@dataclass
class FeatureBundle:
    model: str
    features: FeatureMatrix
    params: dict[str, Any]
    vocabulary: Vocabulary | None = None
    lda_model: LdaModel | None = None
    topic_matrix: TopicMatrix | None = None
    embeddings: EmbeddingSet | None = None
    cluster_model: ClusterModel | None = None


def resolve_params(overrides: dict[str, Any] | None = None) -> dict[str, Any]:
    params = dict(DEFAULT_FEATURE_PARAMS)
    for key, value in (overrides or {}).items():
        if key not in DEFAULT_FEATURE_PARAMS:
            raise ValueError(f"unknown feature parameter {key!r}")
        if value is not None:
            params[key] = value
    return params


def build_features(corpus: Corpus, model: str, params: dict[str, Any] | None = None) -> FeatureBundle:
    """Build the named document representation over the corpus.

    Cluster counts are capped at the corpus size so the large defaults stay
    usable on small pools.
    """
    if model not in FEATURE_MODELS:
        raise ValueError(f"unknown feature model {model!r}; expected one of {FEATURE_MODELS}")
    p = resolve_params(params)

    if model in ("bow", "bow_tm", "lda"):
        vocab = build_vocabulary(corpus, min_df=p["min_df"], max_df_fraction=p["max_df_fraction"])
    else:
        vocab = None

    if model == "bow":
        feats = tfidf(corpus, vocab, sublinear_tf=p["sublinear_tf"])
        return FeatureBundle(model=model, features=feats, params=p, vocabulary=vocab)

    if model == "lda":
        lda = lda_fit(
            corpus,
            vocab,
            k=p["lda_topics"],
            alpha=p["lda_alpha"],
            beta=p["lda_beta"],
            iterations=p["lda_iterations"],
            seed=p["lda_seed"],
        )
        topics = lda_doc_topics(lda)
        return FeatureBundle(
            model=model,
            features=topics.as_features(),
            params=p,
            vocabulary=vocab,
            lda_model=lda,
            topic_matrix=topics,
        )

    if model == "pv":
        emb = pv_train(
            corpus,
            dim=p["pv_dim"],
            window=p["pv_window"],
            negative=p["pv_negative"],
            epochs=p["pv_epochs"],
            seed=p["pv_seed"],
        )
        return FeatureBundle(
            model=model,
            features=FeatureMatrix(values=emb.vectors, kind="embedding_dense"),
            params=p,
            embeddings=emb,
        )

    c = max(2, min(p["clusters"], corpus.n))
    if model == "pv_tm":
        emb = pv_train(
            corpus,
            dim=p["pv_dim"],
            window=p["pv_window"],
            negative=p["pv_negative"],
            epochs=p["pv_epochs"],
            seed=p["pv_seed"],
        )
        cmodel, feats = cluster_topics(
            emb.vectors, c=c, seed=p["cluster_seed"], distance=p["cluster_distance"]
        )
        return FeatureBundle(
            model=model, features=feats, params=p, embeddings=emb, cluster_model=cmodel
        )

    # bow_tm
    base = tfidf(corpus, vocab, sublinear_tf=p["sublinear_tf"])
    cmodel, feats = cluster_topics(base, c=c, seed=p["cluster_seed"], distance=p["cluster_distance"])
    return FeatureBundle(
        model=model, features=feats, params=p, vocabulary=vocab, cluster_model=cmodel
    )


def build_topic_matrix(corpus: Corpus, params: dict[str, Any] | None = None) -> TopicMatrix:
    """LDA topic proportions used by the novelty scorer, independent of the
    classifier's feature model."""
    bundle = build_features(corpus, "lda", params)
    assert bundle.topic_matrix is not None
    return bundle.topic_matrix
