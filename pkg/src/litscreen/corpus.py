"""Corpus ingestion, tokenization, and vocabulary construction.

Documents are title/abstract pairs with an optional binary relevance label
(1 = included in the review, 0 = excluded). A Corpus preserves file order
and owns an id -> position index; a Vocabulary maps retained terms to
contiguous indices in lexicographic order.
"""

from __future__ import annotations

import csv
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence


class CorpusError(ValueError):
    """Raised for malformed input files or invariant violations."""


class EmptyVocabularyError(CorpusError):
    """Raised when document-frequency filtering removes every term."""


# Minimal English stop-word list: articles, conjunctions, prepositions,
# pronouns, auxiliaries, and a few high-frequency adverbs. Configurable via
# TokenizerConfig.stopwords.
DEFAULT_STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are as at be because
    been before being below between both but by can cannot could did do does
    doing down during each few for from further had has have having he her
    here hers herself him himself his how i if in into is it its itself just
    me more most my myself no nor not now of off on once only or other our
    ours ourselves out over own same she should so some such than that the
    their theirs them themselves then there these they this those through to
    too under until up very was we were what when where which while who whom
    why will with would you your yours yourself yourselves
    """.split()
)

_WORD_RE = re.compile(r"[a-z0-9]+")
_WORD_HYPHEN_RE = re.compile(r"[a-z0-9]+(?:-[a-z0-9]+)*")


@dataclass(frozen=True)
class TokenizerConfig:
    """Preprocessing switches; defaults give reproducible IR-style tokens."""

    lowercase: bool = True
    keep_hyphens: bool = False
    min_token_len: int = 2
    stopwords: frozenset[str] = DEFAULT_STOPWORDS


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    abstract: str
    label: int | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("document id must be a non-empty string")
        if not self.title and not self.abstract:
            raise CorpusError(f"document {self.id!r}: title and abstract both empty")
        if self.label is not None and self.label not in (0, 1):
            raise CorpusError(f"document {self.id!r}: label must be 0 or 1, got {self.label!r}")

    @property
    def text(self) -> str:
        return f"{self.title} {self.abstract}" if self.title and self.abstract else (self.title or self.abstract)


class Corpus:
    """Ordered, immutable collection of documents with unique ids."""

    def __init__(self, documents: Iterable[Document]):
        self._documents: tuple[Document, ...] = tuple(documents)
        self._index: dict[str, int] = {}
        for pos, doc in enumerate(self._documents):
            if doc.id in self._index:
                raise CorpusError(f"duplicate document id {doc.id!r}")
            self._index[doc.id] = pos

    def __len__(self) -> int:
        return len(self._documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self._documents)

    def __getitem__(self, pos: int) -> Document:
        return self._documents[pos]

    @property
    def n(self) -> int:
        return len(self._documents)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self._documents)

    def get(self, doc_id: str) -> Document:
        return self._documents[self._index[doc_id]]

    def position(self, doc_id: str) -> int:
        return self._index[doc_id]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._index

    @property
    def fully_labelled(self) -> bool:
        return all(d.label is not None for d in self._documents)

    @property
    def relevant_fraction(self) -> float:
        """Fraction of label==1 documents; defined only for fully labelled corpora."""
        if not self._documents:
            raise CorpusError("relevant_fraction undefined for an empty corpus")
        if not self.fully_labelled:
            raise CorpusError("relevant_fraction undefined: corpus has unlabelled documents")
        return sum(1 for d in self._documents if d.label == 1) / len(self._documents)

    def labels(self) -> list[int | None]:
        return [d.label for d in self._documents]

    def sha256(self) -> str:
        """Content hash over the canonical JSONL serialization."""
        h = hashlib.sha256()
        for doc in self._documents:
            h.update(_doc_json(doc).encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()


def _doc_json(doc: Document) -> str:
    rec: dict = {"id": doc.id, "title": doc.title, "abstract": doc.abstract}
    if doc.label is not None:
        rec["label"] = doc.label
    return json.dumps(rec, ensure_ascii=False, sort_keys=True)


def _parse_label(raw, where: str) -> int | None:
    if raw is None or raw == "":
        return None
    if raw in (0, 1):
        return int(raw)
    if isinstance(raw, str) and raw.strip() in ("0", "1"):
        return int(raw.strip())
    raise CorpusError(f"{where}: label must be 0 or 1, got {raw!r}")


def load_corpus(path: str | Path, format: str | None = None) -> Corpus:
    """Load a corpus from JSONL (canonical) or CSV.

    JSONL: one object per line with keys id, title, abstract and optional
    label. CSV: header row with the same column names, UTF-8. The format is
    inferred from the file extension when not given explicitly.
    """
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format not in ("jsonl", "csv"):
        raise CorpusError(f"unknown corpus format {format!r}")

    docs: list[Document] = []
    seen: set[str] = set()
    if format == "jsonl":
        with path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
                if not isinstance(rec, dict) or "id" not in rec:
                    raise CorpusError(f"{path}:{lineno}: expected an object with an 'id' field")
                docs.append(_record_to_doc(rec, f"{path}:{lineno}", seen))
    else:
        with path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            required = {"id", "title", "abstract"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise CorpusError(f"{path}: CSV header must contain columns id, title, abstract")
            for rowno, row in enumerate(reader, start=2):
                docs.append(_record_to_doc(row, f"{path}:{rowno}", seen))
    return Corpus(docs)


def _record_to_doc(rec: dict, where: str, seen: set[str]) -> Document:
    doc_id = str(rec.get("id", "")).strip()
    if not doc_id:
        raise CorpusError(f"{where}: missing document id")
    if doc_id in seen:
        raise CorpusError(f"{where}: duplicate document id {doc_id!r}")
    seen.add(doc_id)
    try:
        return Document(
            id=doc_id,
            title=str(rec.get("title") or ""),
            abstract=str(rec.get("abstract") or ""),
            label=_parse_label(rec.get("label"), where),
        )
    except CorpusError as exc:
        raise CorpusError(f"{where}: {exc}") from exc


def save_corpus(corpus: Corpus, path: str | Path, format: str = "jsonl") -> None:
    """Serialize a corpus; load_corpus(save_corpus(c)) round-trips exactly."""
    path = Path(path)
    if format == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for doc in corpus:
                fh.write(_doc_json(doc) + "\n")
    elif format == "csv":
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "title", "abstract", "label"])
            for doc in corpus:
                writer.writerow([doc.id, doc.title, doc.abstract, "" if doc.label is None else doc.label])
    else:
        raise CorpusError(f"unknown corpus format {format!r}")


def tokenize(doc: Document, config: TokenizerConfig | None = None) -> list[str]:
    """Tokenize title + " " + abstract into lowercased alphanumeric tokens.

    Tokens shorter than config.min_token_len and stop-words are dropped.
    With keep_hyphens, internal hyphens survive ("covid-19" stays one token);
    otherwise hyphens separate tokens.
    """
    config = config or TokenizerConfig()
    text = f"{doc.title} {doc.abstract}"
    if config.lowercase:
        text = text.lower()
    pattern = _WORD_HYPHEN_RE if config.keep_hyphens else _WORD_RE
    return [
        tok
        for tok in pattern.findall(text)
        if len(tok) >= config.min_token_len and tok not in config.stopwords
    ]


@dataclass(frozen=True)
class Vocabulary:
    """Term -> contiguous index map plus per-term document frequencies."""

    term_to_index: dict[str, int]
    doc_freqs: tuple[int, ...]
    n_docs: int
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)

    def __len__(self) -> int:
        return len(self.term_to_index)

    def __contains__(self, term: str) -> bool:
        return term in self.term_to_index

    @property
    def terms(self) -> list[str]:
        ordered = [""] * len(self.term_to_index)
        for term, idx in self.term_to_index.items():
            ordered[idx] = term
        return ordered

    def sha256(self) -> str:
        h = hashlib.sha256()
        for term, idx in sorted(self.term_to_index.items()):
            h.update(f"{term}\t{idx}\t{self.doc_freqs[idx]}\n".encode("utf-8"))
        h.update(str(self.n_docs).encode())
        return h.hexdigest()


def build_vocabulary(
    corpus: Corpus,
    min_df: int = 1,
    max_df_fraction: float = 1.0,
    tokenizer: TokenizerConfig | None = None,
) -> Vocabulary:
    """Build the vocabulary of terms with document frequency in
    [min_df, max_df_fraction * n], indexed lexicographically.
    """
    if min_df < 1:
        raise ValueError(f"min_df must be >= 1, got {min_df}")
    if not 0 < max_df_fraction <= 1:
        raise ValueError(f"max_df_fraction must be in (0, 1], got {max_df_fraction}")
    tokenizer = tokenizer or TokenizerConfig()

    df: dict[str, int] = {}
    for doc in corpus:
        for term in set(tokenize(doc, tokenizer)):
            df[term] = df.get(term, 0) + 1

    max_df = max_df_fraction * corpus.n
    retained = sorted(t for t, c in df.items() if min_df <= c <= max_df)
    if not retained:
        raise EmptyVocabularyError(
            f"no terms left after df filtering (min_df={min_df}, max_df_fraction={max_df_fraction})"
        )
    term_to_index = {t: i for i, t in enumerate(retained)}
    return Vocabulary(
        term_to_index=term_to_index,
        doc_freqs=tuple(df[t] for t in retained),
        n_docs=corpus.n,
        tokenizer=tokenizer,
    )


def tokenized_corpus(corpus: Corpus, config: TokenizerConfig | None = None) -> list[list[str]]:
    """Token lists for every document, in corpus order."""
    config = config or TokenizerConfig()
    return [tokenize(doc, config) for doc in corpus]


def doc_term_ids(
    corpus: Corpus, vocab: Vocabulary
) -> list[list[int]]:
    """Vocabulary indices per document; out-of-vocabulary tokens are skipped."""
    out: list[list[int]] = []
    for doc in corpus:
        out.append(
            [vocab.term_to_index[t] for t in tokenize(doc, vocab.tokenizer) if t in vocab.term_to_index]
        )
    return out
