"""tf-idf bag-of-words features.

Weighting: entry(d, t) = tf(d, t) * idf(t) with idf(t) = ln((1 + n) / (1 + df(t))) + 1,
then L2 row normalization. tf is the raw in-document count, or 1 + ln(count)
in sublinear mode. Rows of zero-token documents stay all-zero and are flagged.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from litscreen.corpus import Corpus, Vocabulary, doc_term_ids
from litscreen.features.base import FeatureMatrix


def tfidf(corpus: Corpus, vocab: Vocabulary, sublinear_tf: bool = False) -> FeatureMatrix:
    if vocab.n_docs != corpus.n:
        raise ValueError(
            f"vocabulary was built from {vocab.n_docs} documents but corpus has {corpus.n}"
        )
    n = corpus.n
    idf = np.log((1.0 + n) / (1.0 + np.asarray(vocab.doc_freqs, dtype=np.float64))) + 1.0

    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    flagged: list[int] = []
    for row, term_ids in enumerate(doc_term_ids(corpus, vocab)):
        counts: dict[int, int] = {}
        for t in term_ids:
            counts[t] = counts.get(t, 0) + 1
        if not counts:
            flagged.append(row)
        for t in sorted(counts):
            tf = 1.0 + np.log(counts[t]) if sublinear_tf else float(counts[t])
            indices.append(t)
            data.append(tf * idf[t])
        indptr.append(len(indices))

    matrix = sp.csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int32), np.asarray(indptr, dtype=np.int32)),
        shape=(n, len(vocab)),
    )
    _normalize_rows_l2(matrix)
    return FeatureMatrix(values=matrix, kind="tfidf_sparse", flagged=tuple(flagged))


def _normalize_rows_l2(matrix: sp.csr_matrix) -> None:
    norms = np.sqrt(np.asarray(matrix.multiply(matrix).sum(axis=1)).ravel())
    nonzero = norms > 0
    scale = np.ones_like(norms)
    scale[nonzero] = 1.0 / norms[nonzero]
    # scale each row in place via the data array
    row_lengths = np.diff(matrix.indptr)
    matrix.data *= np.repeat(scale, row_lengths)
