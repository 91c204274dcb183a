"""Screening metrics: yield, burden, WSS@95, recall at a screened fraction.

Counts follow the manual/automatic split: every document is either manually
screened (M counts, decisions equal the gold labels) or handled by the
automatic classifier (A counts from 0.5-thresholded predictions):

    yield  = (TP_M + TP_A) / (TP_M + TP_A + FN_A)
    burden = (TP_M + TN_M + TP_A + FP_A) / N
    WSS@95 = (1 - burden) at the earliest point where yield >= 0.95

The manual-only variant treats the classifier as abstaining (all-negative
predictions), which reduces yield to manual recall and burden to the
screened fraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class IterationCounts:
    """Confusion counts at the end of one screening iteration."""

    iteration: int
    tp_m: int
    tn_m: int
    tp_a: int
    fp_a: int
    fn_a: int
    tn_a: int

    @property
    def n(self) -> int:
        return self.tp_m + self.tn_m + self.tp_a + self.fp_a + self.fn_a + self.tn_a

    def manual_only(self) -> "IterationCounts":
        """Counts with an abstaining (all-negative) automatic screen."""
        return IterationCounts(
            iteration=self.iteration,
            tp_m=self.tp_m,
            tn_m=self.tn_m,
            tp_a=0,
            fp_a=0,
            fn_a=self.tp_a + self.fn_a,
            tn_a=self.fp_a + self.tn_a,
        )


def counts_from_labels(
    screened_gold: Sequence[int],
    unscreened_gold: Sequence[int],
    auto_predictions: Sequence[int] | None,
    iteration: int = 0,
) -> IterationCounts:
    """Build counts from gold labels and classifier predictions.

    auto_predictions=None means the classifier abstains (all negative).
    """
    screened = np.asarray(screened_gold, dtype=np.int64)
    unscreened = np.asarray(unscreened_gold, dtype=np.int64)
    if auto_predictions is None:
        preds = np.zeros_like(unscreened)
    else:
        preds = np.asarray(auto_predictions, dtype=np.int64)
        if preds.shape != unscreened.shape:
            raise MetricsError(
                f"predictions cover {preds.shape[0]} docs but {unscreened.shape[0]} are unscreened"
            )
    return IterationCounts(
        iteration=iteration,
        tp_m=int((screened == 1).sum()),
        tn_m=int((screened == 0).sum()),
        tp_a=int(((preds == 1) & (unscreened == 1)).sum()),
        fp_a=int(((preds == 1) & (unscreened == 0)).sum()),
        fn_a=int(((preds == 0) & (unscreened == 1)).sum()),
        tn_a=int(((preds == 0) & (unscreened == 0)).sum()),
    )


def yield_burden(counts: IterationCounts) -> tuple[float, float]:
    """(yield, burden) for one iteration's counts."""
    relevant = counts.tp_m + counts.tp_a + counts.fn_a
    if relevant == 0:
        raise MetricsError("yield undefined: no relevant documents")
    y = (counts.tp_m + counts.tp_a) / relevant
    b = (counts.tp_m + counts.tn_m + counts.tp_a + counts.fp_a) / counts.n
    return float(y), float(b)


def wss95(
    yield_curve: Sequence[float],
    burden_curve: Sequence[float],
    threshold: float = 0.95,
) -> tuple[float, int]:
    """Work saved over sampling: (1 - burden, iteration) at the earliest
    iteration whose yield reaches the threshold."""
    if len(yield_curve) != len(burden_curve):
        raise MetricsError("yield and burden curves differ in length")
    for i, (y, b) in enumerate(zip(yield_curve, burden_curve)):
        if y >= threshold:
            return float(1.0 - b), i
    raise MetricsError(
        f"yield never reached {threshold}; complete traces end at yield 1.0"
    )


def recall_at(
    screened_gold_in_order: Sequence[int],
    total_relevant: int,
    fraction: float,
    total_docs: int | None = None,
) -> float:
    """Fraction of relevant documents found in the first ceil(fraction * N)
    manually screened documents."""
    if not 0 < fraction <= 1:
        raise MetricsError(f"fraction must be in (0, 1], got {fraction}")
    if total_relevant < 1:
        raise MetricsError("recall undefined: no relevant documents")
    labels = np.asarray(screened_gold_in_order, dtype=np.int64)
    n = total_docs if total_docs is not None else labels.shape[0]
    cutoff = int(np.ceil(fraction * n))
    if labels.shape[0] < cutoff:
        raise MetricsError(
            f"trace covers {labels.shape[0]} screened docs; need {cutoff} for fraction {fraction}"
        )
    return float((labels[:cutoff] == 1).sum() / total_relevant)


@dataclass
class MetricsReport:
    """Per-run metric bundle; classifier-assisted and manual-only variants."""

    wss95: float
    cut_iteration: int
    recall_at: dict[float, float]
    yield_curve: list[float]
    burden_curve: list[float]
    wss95_manual: float
    cut_iteration_manual: int
    yield_curve_manual: list[float]
    burden_curve_manual: list[float]
    threshold: float = 0.95
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "wss95": self.wss95,
            "cut_iteration": self.cut_iteration,
            "recall_at": {repr(float(k)): v for k, v in sorted(self.recall_at.items())},
            "yield_curve": self.yield_curve,
            "burden_curve": self.burden_curve,
            "wss95_manual": self.wss95_manual,
            "cut_iteration_manual": self.cut_iteration_manual,
            "yield_curve_manual": self.yield_curve_manual,
            "burden_curve_manual": self.burden_curve_manual,
            "threshold": self.threshold,
            **({"extras": self.extras} if self.extras else {}),
        }


def build_report(
    iteration_counts: Sequence[IterationCounts],
    screened_gold_in_order: Sequence[int],
    total_relevant: int,
    total_docs: int,
    fractions: Sequence[float] = (0.05, 0.10, 0.25, 0.50, 1.0),
    threshold: float = 0.95,
) -> MetricsReport:
    """Assemble the full report from per-iteration counts and the manual
    screening order."""
    yields, burdens, yields_m, burdens_m = [], [], [], []
    for counts in iteration_counts:
        y, b = yield_burden(counts)
        ym, bm = yield_burden(counts.manual_only())
        yields.append(y)
        burdens.append(b)
        yields_m.append(ym)
        burdens_m.append(bm)
    w, cut = wss95(yields, burdens, threshold)
    wm, cut_m = wss95(yields_m, burdens_m, threshold)
    recalls = {
        float(f): recall_at(screened_gold_in_order, total_relevant, f, total_docs)
        for f in fractions
    }
    return MetricsReport(
        wss95=w,
        cut_iteration=cut,
        recall_at=recalls,
        yield_curve=yields,
        burden_curve=burdens,
        wss95_manual=wm,
        cut_iteration_manual=cut_m,
        yield_curve_manual=yields_m,
        burden_curve_manual=burdens_m,
        threshold=threshold,
    )


def paired_t_test(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Paired t-test across seeds; returns (statistic, p_value).

    Degenerate pairs (identical series) yield (0.0, 1.0).
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.size < 2:
        raise MetricsError("paired t-test needs two equal-length series of size >= 2")
    diffs = xs - ys
    if np.allclose(diffs, diffs[0]):
        # zero-variance differences: identical series are indistinguishable,
        # a constant nonzero gap is a perfectly consistent difference
        if abs(diffs[0]) < 1e-12:
            return 0.0, 1.0
        return float(np.inf if diffs[0] > 0 else -np.inf), 0.0
    result = stats.ttest_rel(xs, ys)
    return float(result.statistic), float(result.pvalue)
