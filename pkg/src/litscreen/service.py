"""Live screening service: a reviewer's include/exclude decisions drive
batch selection over HTTP.

Sessions are event-sourced: every session directory holds an append-only
events.jsonl (one "created" event, then one "label" event per decision).
Replaying the log through the deterministic selection code reconstructs the
exact in-memory state, so a restarted service resumes every session with an
identical pending batch.

Live sessions never read gold labels; until the reviewer has supplied both
an include and an exclude, batches are drawn uniformly at random (seeded),
after which the configured strategy takes over.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from litscreen.corpus import Corpus, load_corpus
from litscreen.features.base import FeatureMatrix, TopicMatrix
from litscreen.model import predict_proba, train
from litscreen.pipelines import build_features, build_topic_matrix, resolve_params
from litscreen.screening import (
    PHASE_NOVELTY,
    ProposedBatch,
    ScreeningState,
    StrategyConfig,
    commit_batch,
    effective_topic_bound,
    select_batch_ig,
    select_batch_lc,
    select_batch_naive,
    trace_csv_text,
)

SERVICE_VERSION = 1


class SessionCreateRequest(BaseModel):
    corpus_ref: str
    feature_model: str = "bow"
    strategy: str = "naive"
    config: dict[str, Any] = {}


class LabelItem(BaseModel):
    id: str
    label: int


class LabelsRequest(BaseModel):
    labels: list[LabelItem]


def _split_config(raw: dict[str, Any]) -> tuple[StrategyConfig, dict[str, Any], float]:
    """Split a flat config dict into strategy, feature, and classifier parts."""
    raw = dict(raw)
    lam = float(raw.pop("lambda", 1.0))
    strategy_kwargs: dict[str, Any] = {}
    for key in ("batch_size", "t", "max_topics", "lc_fraction", "seed", "seed_size"):
        if key in raw:
            strategy_kwargs[key] = raw.pop(key)
    low = raw.pop("lc_low", None)
    high = raw.pop("lc_high", None)
    if low is not None or high is not None:
        strategy_kwargs["lc_band"] = (float(low if low is not None else 0.4),
                                      float(high if high is not None else 0.6))
    feature_params = resolve_params(raw)
    return StrategyConfig(**strategy_kwargs), feature_params, lam


@dataclass
class Session:
    session_id: str
    corpus_ref: str
    feature_model: str
    strategy: str
    raw_config: dict[str, Any]
    corpus: Corpus
    features: FeatureMatrix
    topic_matrix: TopicMatrix | None
    config: StrategyConfig
    classifier_lam: float
    state: ScreeningState
    pending: ProposedBatch | None = None
    received: dict[str, int] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def effective_max_topics(self) -> int | None:
        if self.topic_matrix is None:
            return None
        return effective_topic_bound(self.config, self.topic_matrix)

    def labelled_classes(self) -> set[int]:
        return {label for _, label in self.state.labelled}

    def propose_next(self) -> None:
        """Compute the next pending batch; random until both classes are
        labelled, then strategy-driven."""
        if not self.state.unlabelled:
            self.pending = None
            return
        pool = self.state.unlabelled_ids_in_order()
        s = min(self.config.batch_size, len(pool))
        if len(self.labelled_classes()) < 2:
            rng = np.random.default_rng(
                np.random.SeedSequence([self.config.seed, self.state.iteration + 1])
            )
            picks = rng.choice(len(pool), size=s, replace=False)
            ids = tuple(pool[int(i)] for i in sorted(int(x) for x in picks))
            self.pending = ProposedBatch(
                ids=ids, rank_scores=None, relevance=None, novelty=None,
                phase_used=self.state.phase,
            )
            return

        positions = self.state.labelled_positions()
        X = self.features.rows(positions)
        y = np.asarray([label for _, label in self.state.labelled], dtype=np.float64)
        clf = train(X, y, lam=self.classifier_lam)
        probs = predict_proba(
            clf, self.features.rows([self.corpus.position(d) for d in pool])
        )
        relevance = {doc_id: float(p) for doc_id, p in zip(pool, probs)}

        if self.strategy == "naive":
            self.pending = select_batch_naive(self.state, relevance, self.config.batch_size)
        elif self.strategy == "ig":
            self.pending = select_batch_ig(
                self.state, self.topic_matrix, relevance, self.config, self.effective_max_topics
            )
        else:
            self.pending = select_batch_lc(self.state, relevance, self.config)

    def apply_label(self, doc_id: str, label: int) -> str:
        """Record one decision; returns {accepted, duplicate} or raises."""
        if self.pending is None or doc_id not in self.pending.ids:
            raise KeyError(doc_id)
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        if doc_id in self.received:
            if self.received[doc_id] == label:
                return "duplicate"
            raise PermissionError(f"conflicting decision for {doc_id!r}")
        self.received[doc_id] = label
        return "accepted"

    def maybe_commit(self) -> bool:
        """Commit the pending batch once every document has a decision."""
        if self.pending is None or set(self.received) != set(self.pending.ids):
            return False
        commit_batch(self.state, self.pending, self.received, V=self.topic_matrix)
        self.received = {}
        self.propose_next()
        return True


def _load_session_corpus(data_dir: Path, corpus_ref: str) -> Corpus:
    path = Path(corpus_ref)
    if not path.is_absolute():
        path = data_dir / path
    if not path.exists():
        raise FileNotFoundError(f"corpus file not found: {path}")
    return load_corpus(path)


def _new_session(
    data_dir: Path,
    session_id: str,
    corpus_ref: str,
    feature_model: str,
    strategy: str,
    raw_config: dict[str, Any],
) -> Session:
    corpus = _load_session_corpus(data_dir, corpus_ref)
    config, feature_params, lam = _split_config(raw_config)
    if strategy not in ("naive", "ig", "lc"):
        raise ValueError(f"unknown strategy {strategy!r}")
    bundle = build_features(corpus, feature_model, feature_params)
    topic_matrix = None
    if strategy == "ig":
        topic_matrix = (
            bundle.topic_matrix
            if bundle.topic_matrix is not None
            else build_topic_matrix(corpus, feature_params)
        )
    state = ScreeningState(corpus=corpus, unlabelled=set(corpus.ids), phase=PHASE_NOVELTY)
    session = Session(
        session_id=session_id,
        corpus_ref=corpus_ref,
        feature_model=feature_model,
        strategy=strategy,
        raw_config=raw_config,
        corpus=corpus,
        features=bundle.features,
        topic_matrix=topic_matrix,
        config=config,
        classifier_lam=lam,
        state=state,
    )
    session.propose_next()
    return session


class SessionStore:
    """Disk-backed session registry with append-only event logs."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.sessions_dir = self.data_dir / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._store_lock = threading.Lock()
        self._replay_all()

    def _events_path(self, session_id: str) -> Path:
        return self.sessions_dir / session_id / "events.jsonl"

    def _append_event(self, session_id: str, event: dict) -> None:
        path = self._events_path(session_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
            fh.flush()

    def _replay_all(self) -> None:
        for events in sorted(self.sessions_dir.glob("*/events.jsonl")):
            try:
                self._replay_one(events)
            except Exception as exc:  # corrupt log: surface, do not crash the rest
                raise RuntimeError(f"corrupt session store at {events}: {exc}") from exc

    def _replay_one(self, events_path: Path) -> None:
        lines = events_path.read_text(encoding="utf-8").splitlines()
        if not lines:
            return
        created = json.loads(lines[0])
        if created.get("event") != "created":
            raise ValueError("first event must be 'created'")
        session = _new_session(
            self.data_dir,
            created["session_id"],
            created["corpus_ref"],
            created["feature_model"],
            created["strategy"],
            created.get("config", {}),
        )
        for line in lines[1:]:
            event = json.loads(line)
            if event.get("event") != "label":
                raise ValueError(f"unexpected event {event.get('event')!r}")
            session.apply_label(event["doc_id"], int(event["label"]))
            session.maybe_commit()
        self._sessions[session.session_id] = session

    def create(self, req: SessionCreateRequest) -> Session:
        session_id = uuid.uuid4().hex
        session = _new_session(
            self.data_dir, session_id, req.corpus_ref, req.feature_model, req.strategy, req.config
        )
        self._append_event(
            session_id,
            {
                "event": "created",
                "version": SERVICE_VERSION,
                "session_id": session_id,
                "corpus_ref": req.corpus_ref,
                "feature_model": req.feature_model,
                "strategy": req.strategy,
                "config": req.config,
                "created_at": time.time(),
            },
        )
        with self._store_lock:
            self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")

    def record_label(self, session: Session, doc_id: str, label: int) -> None:
        self._append_event(
            session.session_id,
            {"event": "label", "doc_id": doc_id, "label": int(label), "at": time.time()},
        )


def create_app(data_dir: str | Path) -> FastAPI:
    store = SessionStore(data_dir)
    app = FastAPI(title="litscreen live screening service")
    app.state.store = store

    @app.post("/sessions")
    def create_session(req: SessionCreateRequest):
        try:
            session = store.create(req)
        except FileNotFoundError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"session_id": session.session_id}

    @app.get("/sessions/{session_id}/batch")
    def get_batch(session_id: str):
        session = store.get(session_id)
        with session.lock:
            if session.pending is None:
                return {"iteration": session.state.iteration, "docs": [], "complete": True}
            docs = []
            for doc_id in session.pending.ids:
                doc = session.corpus.get(doc_id)
                docs.append(
                    {
                        "id": doc_id,
                        "title": doc.title,
                        "abstract": doc.abstract,
                        "relevance": None
                        if session.pending.relevance is None
                        else session.pending.relevance.get(doc_id),
                        "novelty": None
                        if session.pending.novelty is None
                        else session.pending.novelty.get(doc_id),
                    }
                )
            return {
                "iteration": session.state.iteration + 1,
                "docs": docs,
                "complete": False,
            }

    @app.post("/sessions/{session_id}/labels")
    def post_labels(session_id: str, req: LabelsRequest):
        session = store.get(session_id)
        accepted = 0
        with session.lock:
            for item in req.labels:
                try:
                    outcome = session.apply_label(item.id, item.label)
                except KeyError:
                    raise HTTPException(
                        status_code=400,
                        detail=f"document {item.id!r} is not in the pending batch",
                    )
                except PermissionError as exc:
                    raise HTTPException(status_code=409, detail=str(exc))
                except ValueError as exc:
                    raise HTTPException(status_code=400, detail=str(exc))
                if outcome == "accepted":
                    store.record_label(session, item.id, item.label)
                    accepted += 1
            remaining = 0 if session.pending is None else len(session.pending.ids) - len(session.received)
            session.maybe_commit()
        return {"accepted": accepted, "remaining_in_batch": remaining}

    @app.get("/sessions/{session_id}/progress")
    def get_progress(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return {
                "screened": session.state.screened_count,
                "total": session.corpus.n,
                "relevant_found": session.state.relevant_found,
                "phase": session.state.phase,
                "topics_found": session.state.topics_found,
                "iteration": session.state.iteration,
            }

    @app.get("/sessions/{session_id}/export")
    def export_trace(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return PlainTextResponse(trace_csv_text(session.state), media_type="text/csv")

    return app
