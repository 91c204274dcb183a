"""Active-learning screening loops.

Three batch-selection strategies over a shared state machine:

* naive: rank the pool by predicted relevance, screen the top s.
* ig: while unexplored topics remain, rank by relevance x novelty, where
  novelty comes from projecting LDA topic vectors onto the labelled set's
  principal subspace; once enough topics are discovered, fall back to
  relevance-only ranking permanently.
* lc: during an initial fraction of screening, sample s documents whose
  predicted relevance lies inside a confidence band; afterwards behave
  like naive.

Selection and committing are split so that a live service can propose a
batch, collect human labels over time, and commit when complete; the
simulated steps wire the two together through a gold-label oracle.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from litscreen.corpus import Corpus
from litscreen.features.base import FeatureMatrix, TopicMatrix
from litscreen.metrics import (
    IterationCounts,
    MetricsReport,
    build_report,
    counts_from_labels,
    recall_at,
)
from litscreen.model import predict_proba, train
from litscreen.novelty import fit_projector, novelty_scores, occupied_topics, topics_discovered

TRACE_COLUMNS = (
    "iteration",
    "doc_id",
    "rank_score",
    "relevance",
    "novelty",
    "oracle_label",
    "cumulative_screened",
    "cumulative_relevant",
)

PHASE_NOVELTY = "novelty"
PHASE_RELEVANCE_ONLY = "relevance_only"


class ScreeningError(ValueError):
    pass


class CoverageError(ScreeningError):
    """Score maps must cover exactly the unlabelled set."""


@dataclass(frozen=True)
class StrategyConfig:
    strategy: str = "ig"  # {naive, ig, lc}
    batch_size: int = 25
    t: int = 3
    max_topics: int = 150
    lc_band: tuple[float, float] = (0.4, 0.6)
    lc_fraction: float = 0.10
    seed: int = 0
    seed_size: int | None = None  # defaults to batch_size

    def __post_init__(self) -> None:
        if self.strategy not in ("naive", "ig", "lc"):
            raise ScreeningError(f"unknown strategy {self.strategy!r}")
        if self.batch_size < 1:
            raise ScreeningError("batch_size must be >= 1")
        if self.t < 1:
            raise ScreeningError("t must be >= 1")
        if self.max_topics < 1:
            raise ScreeningError("max_topics must be >= 1")
        low, high = self.lc_band
        if not 0 <= low < high <= 1:
            raise ScreeningError(f"lc_band must satisfy 0 <= low < high <= 1, got {self.lc_band}")
        if not 0 < self.lc_fraction < 1:
            raise ScreeningError(f"lc_fraction must be in (0, 1), got {self.lc_fraction}")

    @property
    def effective_seed_size(self) -> int:
        return self.seed_size if self.seed_size is not None else self.batch_size


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    doc_id: str
    rank_score: float | None
    relevance: float | None
    novelty: float | None
    oracle_label: int
    cumulative_screened: int
    cumulative_relevant: int


@dataclass
class ScreeningState:
    """Labelled/unlabelled partition plus the per-document audit trace."""

    corpus: Corpus
    labelled: list[tuple[str, int]] = field(default_factory=list)
    unlabelled: set[str] = field(default_factory=set)
    iteration: int = 0
    phase: str = PHASE_NOVELTY
    topics_found: int = 0
    trace: list[TraceRecord] = field(default_factory=list)

    @property
    def labelled_ids(self) -> set[str]:
        return {doc_id for doc_id, _ in self.labelled}

    @property
    def screened_count(self) -> int:
        return len(self.labelled)

    @property
    def relevant_found(self) -> int:
        return sum(label for _, label in self.labelled)

    def labelled_positions(self) -> list[int]:
        return [self.corpus.position(doc_id) for doc_id, _ in self.labelled]

    def unlabelled_ids_in_order(self) -> list[str]:
        """Unlabelled ids in corpus order (the deterministic iteration order)."""
        return [doc_id for doc_id in self.corpus.ids if doc_id in self.unlabelled]

    def unlabelled_positions(self) -> list[int]:
        return [self.corpus.position(doc_id) for doc_id in self.unlabelled_ids_in_order()]

    def screened_labels_in_order(self) -> list[int]:
        return [label for _, label in self.labelled]

    def check_partition(self) -> None:
        labelled = self.labelled_ids
        if labelled & self.unlabelled:
            raise ScreeningError("labelled and unlabelled sets overlap")
        if labelled | self.unlabelled != set(self.corpus.ids):
            raise ScreeningError("labelled and unlabelled sets do not cover the corpus")
        if len(self.labelled) != len(labelled):
            raise ScreeningError("a document was screened twice")


class Oracle:
    """Source of screening decisions; simulation answers from gold labels."""

    mode = "live"

    def label(self, doc_id: str) -> int:
        raise NotImplementedError


class SimulatedOracle(Oracle):
    mode = "simulated"

    def __init__(self, corpus: Corpus):
        if not corpus.fully_labelled:
            raise ScreeningError("simulation requires a fully labelled corpus")
        self._labels = {doc.id: int(doc.label) for doc in corpus}

    def label(self, doc_id: str) -> int:
        return self._labels[doc_id]


def seed_labelled_set(
    corpus: Corpus,
    size: int,
    seed: int,
    oracle: Oracle | None = None,
    max_attempts: int = 100,
    candidate_ids: Sequence[str] | None = None,
) -> ScreeningState:
    """Draw the initial labelled set: a random sample redrawn until it
    contains at least one relevant and one irrelevant document.

    candidate_ids restricts where the sample may come from (the rest of the
    corpus still enters the unlabelled pool); used by experiments that seed
    from a deliberately narrow region of the pool.
    """
    if size >= corpus.n:
        raise ScreeningError(f"seed size {size} must be smaller than the corpus ({corpus.n})")
    if size < 2:
        raise ScreeningError("seed size must be >= 2 to cover both classes")
    oracle = oracle or SimulatedOracle(corpus)
    if isinstance(oracle, SimulatedOracle):
        gold = [doc.label for doc in corpus]
        if sum(gold) == 0:
            raise ScreeningError("corpus has zero relevant documents; screening is undefined")
        if sum(gold) == corpus.n:
            raise ScreeningError("corpus has zero irrelevant documents; screening is undefined")

    rng = np.random.default_rng(seed)
    ids: Sequence[str] = corpus.ids
    if candidate_ids is not None:
        ids = [doc_id for doc_id in corpus.ids if doc_id in set(candidate_ids)]
        if len(ids) < size:
            raise ScreeningError("candidate set is smaller than the requested seed size")
    for _ in range(max_attempts):
        positions = rng.choice(len(ids), size=size, replace=False)
        batch = [ids[int(p)] for p in positions]
        labels = {doc_id: oracle.label(doc_id) for doc_id in batch}
        if 0 < sum(labels.values()) < size:
            state = ScreeningState(corpus=corpus, unlabelled=set(corpus.ids))
            _append_batch(state, batch, labels, iteration=0, rank_scores=None, relevance=None, novelty=None)
            return state
    raise ScreeningError(
        f"could not draw a two-class seed of size {size} in {max_attempts} attempts"
    )


def _append_batch(
    state: ScreeningState,
    batch: Sequence[str],
    labels: Mapping[str, int],
    iteration: int,
    rank_scores: Mapping[str, float] | None,
    relevance: Mapping[str, float] | None,
    novelty: Mapping[str, float] | None,
) -> None:
    screened = state.screened_count
    relevant = state.relevant_found
    for doc_id in batch:
        if doc_id not in state.unlabelled:
            raise ScreeningError(f"document {doc_id!r} is not in the unlabelled pool")
        label = int(labels[doc_id])
        if label not in (0, 1):
            raise ScreeningError(f"label for {doc_id!r} must be 0 or 1, got {label!r}")
        state.unlabelled.remove(doc_id)
        state.labelled.append((doc_id, label))
        screened += 1
        relevant += label
        state.trace.append(
            TraceRecord(
                iteration=iteration,
                doc_id=doc_id,
                rank_score=None if rank_scores is None else float(rank_scores[doc_id]),
                relevance=None if relevance is None else float(relevance[doc_id]),
                novelty=None if novelty is None else float(novelty[doc_id]),
                oracle_label=label,
                cumulative_screened=screened,
                cumulative_relevant=relevant,
            )
        )
    state.iteration = iteration


def rank_candidates(
    state: ScreeningState,
    relevance: Mapping[str, float],
    novelty: Mapping[str, float] | None = None,
) -> list[str]:
    """Order the unlabelled pool by p(r|d) * p(n|d) (or p(r|d) alone),
    descending; ties break on ascending document id."""
    if set(relevance) != state.unlabelled:
        raise CoverageError("relevance scores must cover exactly the unlabelled set")
    if novelty is not None and set(novelty) != state.unlabelled:
        raise CoverageError("novelty scores must cover exactly the unlabelled set")
    if novelty is None:
        scores = {doc_id: float(p) for doc_id, p in relevance.items()}
    else:
        scores = {doc_id: float(relevance[doc_id]) * float(novelty[doc_id]) for doc_id in relevance}
    return sorted(scores, key=lambda doc_id: (-scores[doc_id], doc_id))


@dataclass(frozen=True)
class ProposedBatch:
    ids: tuple[str, ...]
    rank_scores: dict[str, float] | None
    relevance: dict[str, float] | None
    novelty: dict[str, float] | None
    phase_used: str


def resolve_phase(state: ScreeningState, effective_max_topics: int) -> str:
    if state.phase == PHASE_RELEVANCE_ONLY:
        return PHASE_RELEVANCE_ONLY
    if state.topics_found >= effective_max_topics:
        return PHASE_RELEVANCE_ONLY
    return PHASE_NOVELTY


def effective_topic_bound(config: StrategyConfig, V: TopicMatrix | np.ndarray) -> int:
    """Phase-switch threshold: the configured topic budget, capped at the
    number of topics the pool actually occupies (guarantees the novelty
    phase terminates)."""
    return min(config.max_topics, occupied_topics(V))


def select_batch_naive(state: ScreeningState, relevance: Mapping[str, float], s: int) -> ProposedBatch:
    order = rank_candidates(state, relevance)
    batch = tuple(order[: min(s, len(order))])
    rel = {doc_id: float(relevance[doc_id]) for doc_id in batch}
    return ProposedBatch(ids=batch, rank_scores=dict(rel), relevance=rel, novelty=None, phase_used=PHASE_RELEVANCE_ONLY)


def select_batch_ig(
    state: ScreeningState,
    V: TopicMatrix | np.ndarray,
    relevance: Mapping[str, float],
    config: StrategyConfig,
    effective_max_topics: int | None = None,
    force_novelty: float | None = None,
) -> ProposedBatch:
    """Novelty-weighted selection while the novelty phase is active.

    force_novelty substitutes a constant for every novelty score (a
    diagnostic mode: with 1.0 the ranking degenerates to pure relevance);
    forced scores are not recorded in the trace.
    """
    M = V.V if isinstance(V, TopicMatrix) else np.asarray(V)
    if effective_max_topics is None:
        effective_max_topics = effective_topic_bound(config, M)
    phase = resolve_phase(state, effective_max_topics)
    if phase == PHASE_RELEVANCE_ONLY:
        return select_batch_naive(state, relevance, config.batch_size)

    pool = state.unlabelled_ids_in_order()
    if force_novelty is not None:
        nov = {doc_id: float(force_novelty) for doc_id in pool}
        recorded_novelty = None
    else:
        t = min(config.t, state.screened_count)
        proj = fit_projector(M, state.labelled_positions(), t=t)
        values = novelty_scores(proj, M[[state.corpus.position(d) for d in pool]])
        nov = {doc_id: float(v) for doc_id, v in zip(pool, values)}
        recorded_novelty = nov

    order = rank_candidates(state, relevance, nov)
    batch = tuple(order[: min(config.batch_size, len(order))])
    scores = {doc_id: float(relevance[doc_id]) * nov[doc_id] for doc_id in batch}
    return ProposedBatch(
        ids=batch,
        rank_scores=scores,
        relevance={doc_id: float(relevance[doc_id]) for doc_id in batch},
        novelty=None if recorded_novelty is None else {doc_id: recorded_novelty[doc_id] for doc_id in batch},
        phase_used=PHASE_NOVELTY,
    )


def select_batch_lc(
    state: ScreeningState,
    relevance: Mapping[str, float],
    config: StrategyConfig,
    progress: float | None = None,
) -> ProposedBatch:
    """Least-confidence sampling inside the band during the initial
    lc_fraction of screening, then pure relevance ranking."""
    if progress is None:
        progress = state.screened_count / state.corpus.n
    if progress >= config.lc_fraction:
        return select_batch_naive(state, relevance, config.batch_size)

    low, high = config.lc_band
    pool = state.unlabelled_ids_in_order()
    band = [doc_id for doc_id in pool if low <= relevance[doc_id] <= high]
    s = min(config.batch_size, len(pool))
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, state.iteration + 1]))
    if len(band) >= s:
        picks = rng.choice(len(band), size=s, replace=False)
        batch = tuple(band[int(i)] for i in picks)
    else:
        remainder = rank_candidates(state, relevance)
        fill = [doc_id for doc_id in remainder if doc_id not in band]
        batch = tuple(band + fill[: s - len(band)])
    rel = {doc_id: float(relevance[doc_id]) for doc_id in batch}
    return ProposedBatch(ids=batch, rank_scores=dict(rel), relevance=rel, novelty=None, phase_used=PHASE_RELEVANCE_ONLY)


def commit_batch(
    state: ScreeningState,
    proposed: ProposedBatch,
    labels: Mapping[str, int],
    V: TopicMatrix | np.ndarray | None = None,
) -> None:
    """Apply labels for a proposed batch: move documents into the labelled
    set, append trace rows, and refresh the discovered-topic counter."""
    missing = [doc_id for doc_id in proposed.ids if doc_id not in labels]
    if missing:
        raise ScreeningError(f"labels missing for batch documents {missing[:5]!r}")
    _append_batch(
        state,
        proposed.ids,
        labels,
        iteration=state.iteration + 1,
        rank_scores=proposed.rank_scores,
        relevance=proposed.relevance,
        novelty=proposed.novelty,
    )
    if proposed.phase_used == PHASE_RELEVANCE_ONLY and state.phase == PHASE_NOVELTY:
        # permanent once any batch was selected by relevance alone under ig;
        # harmless for strategies that never read the phase
        state.phase = PHASE_RELEVANCE_ONLY
    if V is not None:
        M = V.V if isinstance(V, TopicMatrix) else np.asarray(V)
        state.topics_found = topics_discovered(M, state.labelled_positions())


def step_naive(state: ScreeningState, relevance: Mapping[str, float], oracle: Oracle, s: int) -> None:
    if not state.unlabelled:
        raise ScreeningError("unlabelled pool is empty")
    proposed = select_batch_naive(state, relevance, s)
    labels = {doc_id: oracle.label(doc_id) for doc_id in proposed.ids}
    commit_batch(state, proposed, labels)


def step_ig(
    state: ScreeningState,
    V: TopicMatrix | np.ndarray,
    relevance: Mapping[str, float],
    oracle: Oracle,
    config: StrategyConfig,
    effective_max_topics: int | None = None,
    force_novelty: float | None = None,
) -> None:
    if not state.unlabelled:
        raise ScreeningError("unlabelled pool is empty")
    proposed = select_batch_ig(state, V, relevance, config, effective_max_topics, force_novelty)
    labels = {doc_id: oracle.label(doc_id) for doc_id in proposed.ids}
    commit_batch(state, proposed, labels, V=V)


def step_lc(
    state: ScreeningState,
    relevance: Mapping[str, float],
    oracle: Oracle,
    config: StrategyConfig,
    progress: float | None = None,
) -> None:
    if not state.unlabelled:
        raise ScreeningError("unlabelled pool is empty")
    proposed = select_batch_lc(state, relevance, config, progress)
    labels = {doc_id: oracle.label(doc_id) for doc_id in proposed.ids}
    commit_batch(state, proposed, labels)


def run_simulation(
    corpus: Corpus,
    features: FeatureMatrix,
    V: TopicMatrix | np.ndarray | None,
    config: StrategyConfig,
    classifier_lam: float = 1.0,
    until_screened: int | None = None,
    force_novelty: float | None = None,
    seed_candidate_ids: Sequence[str] | None = None,
) -> tuple[ScreeningState, MetricsReport | None]:
    """Run one full screening simulation.

    Seeds the labelled set, then repeatedly trains the relevance classifier
    on the labelled documents, scores the pool, and commits one batch per
    the configured strategy until the pool is exhausted (or until_screened
    documents have been screened). Returns the final state and, for
    complete runs, the metrics report; partial runs return report=None.
    """
    if not corpus.fully_labelled:
        raise ScreeningError("simulation requires a fully labelled corpus")
    if features.n != corpus.n:
        raise ScreeningError("feature matrix row count does not match the corpus")
    if config.strategy == "ig" and V is None:
        raise ScreeningError("ig strategy needs the topic matrix for novelty scoring")
    if V is not None:
        M = V.V if isinstance(V, TopicMatrix) else np.asarray(V)
        if M.shape[0] != corpus.n:
            raise ScreeningError("topic matrix row count does not match the corpus")
    else:
        M = None

    oracle = SimulatedOracle(corpus)
    state = seed_labelled_set(
        corpus, config.effective_seed_size, config.seed, oracle, candidate_ids=seed_candidate_ids
    )
    gold = np.asarray([doc.label for doc in corpus], dtype=np.int64)
    total_relevant = int(gold.sum())
    effective = effective_topic_bound(config, M) if (config.strategy == "ig" and M is not None) else None

    counts: list[IterationCounts] = [_iteration_counts(state, gold, None, iteration=0)]
    while state.unlabelled and (until_screened is None or state.screened_count < until_screened):
        X = features.rows(state.labelled_positions())
        y = np.asarray([label for _, label in state.labelled], dtype=np.float64)
        clf = train(X, y, lam=classifier_lam)
        pool = state.unlabelled_ids_in_order()
        probs = predict_proba(clf, features.rows([corpus.position(d) for d in pool]))
        relevance = {doc_id: float(p) for doc_id, p in zip(pool, probs)}

        if config.strategy == "naive":
            step_naive(state, relevance, oracle, config.batch_size)
        elif config.strategy == "ig":
            step_ig(state, M, relevance, oracle, config, effective, force_novelty)
        else:
            step_lc(state, relevance, oracle, config)

        counts.append(_iteration_counts(state, gold, relevance, iteration=state.iteration))

    report = None
    if not state.unlabelled:
        report = build_report(
            counts,
            state.screened_labels_in_order(),
            total_relevant=total_relevant,
            total_docs=corpus.n,
        )
    return state, report


def _iteration_counts(
    state: ScreeningState,
    gold: np.ndarray,
    relevance: Mapping[str, float] | None,
    iteration: int,
) -> IterationCounts:
    """Counts at the end of an iteration; the classifier used for ranking
    supplies 0.5-thresholded predictions on the residual pool. Before any
    classifier exists (the seed iteration) the automatic screen abstains."""
    screened_gold = [label for _, label in state.labelled]
    residual_ids = state.unlabelled_ids_in_order()
    unscreened_gold = [int(gold[state.corpus.position(d)]) for d in residual_ids]
    if relevance is None:
        preds = None
    else:
        preds = [1 if relevance[d] >= 0.5 else 0 for d in residual_ids]
    return counts_from_labels(screened_gold, unscreened_gold, preds, iteration=iteration)


@dataclass(frozen=True)
class MethodChoice:
    chosen: str  # {bow, pv}
    recall_bow: float
    recall_pv: float
    tie: bool


def choose_method(recall_bow: float, recall_pv: float) -> MethodChoice:
    """Pick the feature model with higher early recall; ties go to bow and
    are flagged."""
    if recall_pv > recall_bow:
        return MethodChoice("pv", recall_bow, recall_pv, tie=False)
    return MethodChoice("bow", recall_bow, recall_pv, tie=recall_pv == recall_bow)


def select_method(
    corpus: Corpus,
    features_bow: FeatureMatrix,
    features_pv: FeatureMatrix,
    V: TopicMatrix | np.ndarray,
    config_bow: StrategyConfig,
    config_pv: StrategyConfig | None = None,
    cutoff: float = 0.10,
) -> MethodChoice:
    """Run both novelty-weighted pipelines through the first `cutoff`
    fraction of the pool and keep the one with higher recall there."""
    if config_pv is None:
        config_pv = config_bow
    if config_bow.strategy != "ig" or config_pv.strategy != "ig":
        raise ScreeningError("method selection compares the ig strategy under two feature models")
    limit = int(np.ceil(cutoff * corpus.n))
    total_relevant = sum(int(doc.label) for doc in corpus)

    recalls = {}
    for name, feats, cfg in (("bow", features_bow, config_bow), ("pv", features_pv, config_pv)):
        state, _ = run_simulation(corpus, feats, V, cfg, until_screened=limit)
        recalls[name] = recall_at(
            state.screened_labels_in_order(), total_relevant, cutoff, total_docs=corpus.n
        )
    return choose_method(recalls["bow"], recalls["pv"])


def trace_csv_text(state: ScreeningState) -> str:
    """Canonical trace serialization: identical runs produce identical bytes."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for rec in state.trace:
        writer.writerow(
            [
                rec.iteration,
                rec.doc_id,
                "" if rec.rank_score is None else repr(float(rec.rank_score)),
                "" if rec.relevance is None else repr(float(rec.relevance)),
                "" if rec.novelty is None else repr(float(rec.novelty)),
                rec.oracle_label,
                rec.cumulative_screened,
                rec.cumulative_relevant,
            ]
        )
    return buf.getvalue()


def write_trace_csv(state: ScreeningState, path: str | Path) -> None:
    Path(path).write_text(trace_csv_text(state), encoding="utf-8")
