"""Versioned on-disk feature artifacts with content hashing.

Every feature build lands in its own directory with a meta.json recording
the corpus hash, the build parameters, and a sha256 per artifact file.
Loads verify those hashes and abort on mismatch instead of silently
recomputing; rebuild requests that match an existing valid artifact are
cache hits.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np
import scipy.sparse as sp

from litscreen.corpus import Corpus, TokenizerConfig, Vocabulary
from litscreen.features import (
    FeatureMatrix,
    TopicMatrix,
    load_embeddings,
    load_lda,
    save_embeddings,
    save_lda,
)
from litscreen.pipelines import FeatureBundle

ARTIFACT_FORMAT_VERSION = 1


class ArtifactError(RuntimeError):
    pass


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _canonical_params(params: dict[str, Any]) -> str:
    return json.dumps(params, sort_keys=True)


def save_vocabulary(vocab: Vocabulary, path: Path) -> None:
    payload = {
        "terms": vocab.terms,
        "doc_freqs": list(vocab.doc_freqs),
        "n_docs": vocab.n_docs,
        "tokenizer": {
            "lowercase": vocab.tokenizer.lowercase,
            "keep_hyphens": vocab.tokenizer.keep_hyphens,
            "min_token_len": vocab.tokenizer.min_token_len,
            "stopwords": sorted(vocab.tokenizer.stopwords),
        },
    }
    path.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_vocabulary(path: Path) -> Vocabulary:
    payload = json.loads(path.read_text(encoding="utf-8"))
    tok = payload["tokenizer"]
    config = TokenizerConfig(
        lowercase=tok["lowercase"],
        keep_hyphens=tok["keep_hyphens"],
        min_token_len=tok["min_token_len"],
        stopwords=frozenset(tok["stopwords"]),
    )
    return Vocabulary(
        term_to_index={t: i for i, t in enumerate(payload["terms"])},
        doc_freqs=tuple(payload["doc_freqs"]),
        n_docs=payload["n_docs"],
        tokenizer=config,
    )


def save_feature_artifacts(bundle: FeatureBundle, corpus: Corpus, out_dir: str | Path) -> Path:
    """Persist a feature bundle; returns the artifact directory."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files: dict[str, str] = {}

    def _register(name: str) -> None:
        files[name] = _sha256_file(out_dir / name)

    if bundle.vocabulary is not None:
        save_vocabulary(bundle.vocabulary, out_dir / "vocab.json")
        _register("vocab.json")

    if bundle.model == "bow":
        sp.save_npz(out_dir / "matrix.npz", bundle.features.values)
        _register("matrix.npz")
    elif bundle.model == "lda":
        save_lda(bundle.lda_model, out_dir / "lda_model.npz")
        _register("lda_model.npz")
        np.save(out_dir / "topics.npy", bundle.topic_matrix.V)
        _register("topics.npy")
    elif bundle.model == "pv":
        save_embeddings(bundle.embeddings, out_dir / "embeddings.txt")
        _register("embeddings.txt")
    elif bundle.model == "pv_tm":
        save_embeddings(bundle.embeddings, out_dir / "embeddings.txt")
        _register("embeddings.txt")
        np.savez(out_dir / "centroids.npz", centroids=bundle.cluster_model.centroids,
                 distance=np.frombuffer(bundle.cluster_model.distance.encode(), dtype=np.uint8))
        _register("centroids.npz")
        np.save(out_dir / "matrix.npy", bundle.features.values)
        _register("matrix.npy")
    elif bundle.model == "bow_tm":
        np.savez(out_dir / "centroids.npz", centroids=bundle.cluster_model.centroids,
                 distance=np.frombuffer(bundle.cluster_model.distance.encode(), dtype=np.uint8))
        _register("centroids.npz")
        np.save(out_dir / "matrix.npy", bundle.features.values)
        _register("matrix.npy")
    else:
        raise ArtifactError(f"unknown feature model {bundle.model!r}")

    meta = {
        "format_version": ARTIFACT_FORMAT_VERSION,
        "model": bundle.model,
        "params": bundle.params,
        "corpus_sha256": corpus.sha256(),
        "files": files,
    }
    (out_dir / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8")
    return out_dir


def read_meta(artifact_dir: str | Path) -> dict:
    meta_path = Path(artifact_dir) / "meta.json"
    if not meta_path.exists():
        raise ArtifactError(f"no artifact at {artifact_dir} (missing meta.json)")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta.get("format_version") != ARTIFACT_FORMAT_VERSION:
        raise ArtifactError(f"unsupported artifact format version {meta.get('format_version')!r}")
    return meta


def verify_artifact(artifact_dir: str | Path, corpus: Corpus | None = None) -> dict:
    """Validate file hashes (and corpus identity when given); returns meta."""
    artifact_dir = Path(artifact_dir)
    meta = read_meta(artifact_dir)
    if corpus is not None and meta["corpus_sha256"] != corpus.sha256():
        raise ArtifactError(
            f"artifact at {artifact_dir} was built from a different corpus "
            f"(stored {meta['corpus_sha256'][:12]}..., current {corpus.sha256()[:12]}...)"
        )
    for name, digest in meta["files"].items():
        path = artifact_dir / name
        if not path.exists():
            raise ArtifactError(f"artifact file missing: {path}")
        actual = _sha256_file(path)
        if actual != digest:
            raise ArtifactError(
                f"hash mismatch for {path}: stored {digest[:12]}..., actual {actual[:12]}..."
            )
    return meta


def cache_hit(artifact_dir: str | Path, corpus: Corpus, params: dict[str, Any]) -> bool:
    """True when a valid artifact for this exact corpus+params already exists."""
    try:
        meta = verify_artifact(artifact_dir, corpus)
    except ArtifactError:
        return False
    return _canonical_params(meta["params"]) == _canonical_params(params)


def load_feature_matrix(artifact_dir: str | Path, corpus: Corpus) -> FeatureMatrix:
    """Load the classifier feature matrix from a verified artifact."""
    artifact_dir = Path(artifact_dir)
    meta = verify_artifact(artifact_dir, corpus)
    model = meta["model"]
    if model == "bow":
        values = sp.load_npz(artifact_dir / "matrix.npz")
        return FeatureMatrix(values=values, kind="tfidf_sparse")
    if model == "lda":
        values = np.load(artifact_dir / "topics.npy")
        return FeatureMatrix(values=values, kind="topic_dense")
    if model == "pv":
        emb = load_embeddings(artifact_dir / "embeddings.txt", corpus)
        return FeatureMatrix(values=emb.vectors, kind="embedding_dense")
    if model in ("pv_tm", "bow_tm"):
        values = np.load(artifact_dir / "matrix.npy")
        return FeatureMatrix(values=values, kind="cluster_distance_dense")
    raise ArtifactError(f"unknown feature model {model!r}")


def load_topic_matrix(artifact_dir: str | Path, corpus: Corpus) -> TopicMatrix:
    """Load the LDA topic matrix (novelty input) from a verified artifact."""
    artifact_dir = Path(artifact_dir)
    meta = verify_artifact(artifact_dir, corpus)
    if meta["model"] != "lda":
        raise ArtifactError(f"artifact at {artifact_dir} is {meta['model']!r}, expected lda")
    return TopicMatrix(V=np.load(artifact_dir / "topics.npy"))


def load_lda_model(artifact_dir: str | Path, corpus: Corpus):
    artifact_dir = Path(artifact_dir)
    meta = verify_artifact(artifact_dir, corpus)
    if meta["model"] != "lda":
        raise ArtifactError(f"artifact at {artifact_dir} is {meta['model']!r}, expected lda")
    return load_lda(artifact_dir / "lda_model.npz")
