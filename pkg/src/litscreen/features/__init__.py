"""Document feature extractors: tf-idf, LDA topics, paragraph vectors, and
cluster-distance topics built over either representation."""

from litscreen.features.base import FeatureMatrix, TopicMatrix
from litscreen.features.clusters import ClusterError, ClusterModel, cluster_topics
from litscreen.features.lda import (
    LdaModel,
    lda_doc_topics,
    lda_fit,
    lda_infer,
    load_lda,
    save_lda,
)
from litscreen.features.pv import (
    EmbeddingError,
    EmbeddingSet,
    load_embeddings,
    pv_train,
    save_embeddings,
)
from litscreen.features.tfidf import tfidf

__all__ = [
    "ClusterError",
    "ClusterModel",
    "EmbeddingError",
    "EmbeddingSet",
    "FeatureMatrix",
    "LdaModel",
    "TopicMatrix",
    "cluster_topics",
    "lda_doc_topics",
    "lda_fit",
    "lda_infer",
    "load_embeddings",
    "load_lda",
    "pv_train",
    "save_embeddings",
    "save_lda",
    "tfidf",
]
