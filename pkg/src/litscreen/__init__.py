"""Active-learning screening engine for systematic reviews.

The package covers the full screening workflow: corpus ingestion, five
document representations (tf-idf, LDA topics, paragraph vectors, and
cluster-distance topics over either), a logistic relevance classifier,
subspace-projection novelty scoring, batch selection strategies (naive,
novelty-weighted, least-confidence), simulation with WSS@95 / recall
metrics, and a live HTTP screening service.
"""

from litscreen.corpus import (
    Corpus,
    Document,
    TokenizerConfig,
    Vocabulary,
    build_vocabulary,
    load_corpus,
    save_corpus,
    tokenize,
)
from litscreen.features import (
    ClusterModel,
    EmbeddingSet,
    FeatureMatrix,
    LdaModel,
    TopicMatrix,
    cluster_topics,
    lda_doc_topics,
    lda_fit,
    lda_infer,
    load_embeddings,
    pv_train,
    save_embeddings,
    tfidf,
)
from litscreen.metrics import MetricsReport, recall_at, wss95, yield_burden
from litscreen.model import Classifier, predict_proba, train
from litscreen.novelty import (
    NoveltyProjector,
    assign_topic,
    fit_projector,
    novelty_score,
    novelty_scores,
    topics_discovered,
)
from litscreen.screening import (
    MethodChoice,
    Oracle,
    ScreeningState,
    SimulatedOracle,
    StrategyConfig,
    rank_candidates,
    run_simulation,
    seed_labelled_set,
    select_method,
    step_ig,
    step_lc,
    step_naive,
)

__version__ = "0.1.0"

__all__ = [
    "Classifier",
    "ClusterModel",
    "Corpus",
    "Document",
    "EmbeddingSet",
    "FeatureMatrix",
    "LdaModel",
    "MethodChoice",
    "MetricsReport",
    "NoveltyProjector",
    "Oracle",
    "ScreeningState",
    "SimulatedOracle",
    "StrategyConfig",
    "TokenizerConfig",
    "TopicMatrix",
    "Vocabulary",
    "assign_topic",
    "build_vocabulary",
    "cluster_topics",
    "fit_projector",
    "lda_doc_topics",
    "lda_fit",
    "lda_infer",
    "load_corpus",
    "load_embeddings",
    "novelty_score",
    "novelty_scores",
    "predict_proba",
    "pv_train",
    "rank_candidates",
    "recall_at",
    "run_simulation",
    "save_corpus",
    "save_embeddings",
    "seed_labelled_set",
    "select_method",
    "step_ig",
    "step_lc",
    "step_naive",
    "tfidf",
    "tokenize",
    "topics_discovered",
    "train",
    "wss95",
    "yield_burden",
]
