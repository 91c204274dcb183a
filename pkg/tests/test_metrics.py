import math

import numpy as np
import pytest

from litscreen.metrics import (
    IterationCounts,
    MetricsError,
    build_report,
    counts_from_labels,
    paired_t_test,
    recall_at,
    wss95,
    yield_burden,
)


class TestYieldBurden:
    def test_paper_shaped_fixture(self):
        # N=100: 40 screened (9 relevant), classifier on the other 60 docs
        # finds the single remaining relevant (TP_A=1) plus 4 false alarms
        counts = IterationCounts(0, tp_m=9, tn_m=31, tp_a=1, fp_a=4, fn_a=0, tn_a=55)
        y, b = yield_burden(counts)
        assert y == 1.0
        assert b == pytest.approx(0.45)
        assert counts.n == 100

    def test_counts_from_labels_matches_fixture(self):
        screened = [1] * 9 + [0] * 31
        unscreened = [1] + [0] * 59
        preds = [1] + [1, 1, 1, 1] + [0] * 55
        counts = counts_from_labels(screened, unscreened, preds)
        assert (counts.tp_m, counts.tn_m) == (9, 31)
        assert (counts.tp_a, counts.fp_a, counts.fn_a, counts.tn_a) == (1, 4, 0, 55)

    def test_everything_screened_manually(self):
        counts = counts_from_labels([1, 0, 1, 0, 0], [], [])
        y, b = yield_burden(counts)
        assert y == 1.0
        assert b == 1.0

    def test_nothing_screened_all_negative(self):
        counts = counts_from_labels([], [1, 0, 0, 1], None)
        y, b = yield_burden(counts)
        assert y == 0.0
        assert b == 0.0

    def test_zero_relevant_rejected(self):
        counts = counts_from_labels([0, 0], [0], None)
        with pytest.raises(MetricsError):
            yield_burden(counts)

    def test_manual_only_routes_positives_to_fn(self):
        counts = IterationCounts(0, tp_m=2, tn_m=3, tp_a=4, fp_a=5, fn_a=1, tn_a=6)
        manual = counts.manual_only()
        assert manual.tp_a == manual.fp_a == 0
        assert manual.fn_a == 5  # tp_a + fn_a
        assert manual.tn_a == 11
        assert manual.n == counts.n


def perfect_order_curves(R, N):
    """Gold-perfect screening one document at a time, abstaining classifier."""
    yields, burdens = [], []
    for screened in range(N + 1):
        tp_m = min(screened, R)
        counts = counts_from_labels(
            [1] * tp_m + [0] * (screened - tp_m),
            [1] * (R - tp_m) + [0] * (N - screened - (R - tp_m)),
            None,
        )
        y, b = yield_burden(counts)
        yields.append(y)
        burdens.append(b)
    return yields, burdens


class TestWss95:
    def test_documented_fixture(self):
        counts = IterationCounts(0, tp_m=9, tn_m=31, tp_a=1, fp_a=4, fn_a=0, tn_a=55)
        y, b = yield_burden(counts)
        w, cut = wss95([0.5, y], [0.2, b])
        assert w == pytest.approx(0.55)
        assert cut == 1

    def test_gold_perfect_closed_form_random_pairs(self, rng):
        for _ in range(20):
            N = int(rng.integers(20, 300))
            R = int(rng.integers(1, max(2, N // 4)))
            yields, burdens = perfect_order_curves(R, N)
            w, cut = wss95(yields, burdens)
            assert cut == math.ceil(0.95 * R)
            assert w == pytest.approx(1.0 - math.ceil(0.95 * R) / N, abs=1e-12)

    def test_random_order_work_saved_near_zero(self, rng):
        # screening in random order saves almost nothing at 95% yield
        N, R = 2000, 200
        values = []
        for seed in range(10):
            order = np.random.default_rng(seed).permutation(np.array([1] * R + [0] * (N - R)))
            cumulative = np.cumsum(order)
            yields = (cumulative / R).tolist()
            burdens = (np.arange(1, N + 1) / N).tolist()
            w, _ = wss95(yields, burdens)
            values.append(w)
        assert abs(float(np.mean(values))) < 0.1

    def test_never_qualifying_curve_rejected(self):
        with pytest.raises(MetricsError):
            wss95([0.1, 0.5, 0.9], [0.2, 0.4, 0.9])

    def test_threshold_configurable(self):
        w, cut = wss95([0.6, 0.8, 1.0], [0.1, 0.3, 1.0], threshold=0.8)
        assert cut == 1
        assert w == pytest.approx(0.7)


class TestRecallAt:
    def test_exhaustive_fraction_is_one(self):
        labels = [0, 1, 0, 1, 0]
        assert recall_at(labels, 2, 1.0) == 1.0

    def test_gold_perfect_first_decile(self):
        labels = [1] * 10 + [0] * 90
        assert recall_at(labels, 10, 0.10) == 1.0

    def test_matches_counting_oracle(self, rng):
        labels = (rng.random(200) < 0.2).astype(int).tolist()
        total = sum(labels)
        for fraction in (0.05, 0.1, 0.25, 0.5):
            cutoff = math.ceil(fraction * 200)
            expected = sum(labels[:cutoff]) / total
            assert recall_at(labels, total, fraction) == pytest.approx(expected)

    def test_non_decreasing_in_fraction(self, rng):
        labels = (rng.random(100) < 0.3).astype(int).tolist()
        total = sum(labels)
        values = [recall_at(labels, total, f) for f in (0.1, 0.2, 0.5, 0.8, 1.0)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_partial_trace_rejected(self):
        with pytest.raises(MetricsError):
            recall_at([1, 0], 1, 0.5, total_docs=100)

    def test_bad_fraction(self):
        with pytest.raises(MetricsError):
            recall_at([1], 1, 0.0)


class TestBuildReport:
    def test_curves_and_modes(self):
        counts = [
            counts_from_labels([1, 0], [1, 0, 0, 0], None, iteration=0),
            counts_from_labels([1, 0, 1, 0], [0, 0], [0, 0], iteration=1),
            counts_from_labels([1, 0, 1, 0, 0, 0], [], [], iteration=2),
        ]
        report = build_report(counts, [1, 0, 1, 0, 0, 0], total_relevant=2, total_docs=6,
                              fractions=(0.5, 1.0))
        assert report.yield_curve[-1] == 1.0
        assert report.burden_curve[-1] == 1.0
        assert all(b2 >= b1 for b1, b2 in zip(report.burden_curve_manual, report.burden_curve_manual[1:]))
        assert report.recall_at[1.0] == 1.0
        payload = report.to_dict()
        assert "wss95" in payload and "wss95_manual" in payload


class TestPairedTTest:
    def test_identical_series(self):
        stat, p = paired_t_test([0.5, 0.6, 0.7], [0.5, 0.6, 0.7])
        assert stat == 0.0 and p == 1.0

    def test_constant_gap(self):
        stat, p = paired_t_test([0.6, 0.7, 0.8], [0.5, 0.6, 0.7])
        assert stat == np.inf and p == 0.0

    def test_matches_scipy_on_noisy_series(self, rng):
        from scipy import stats

        xs = rng.normal(0.6, 0.05, size=12)
        ys = xs - rng.normal(0.05, 0.02, size=12)
        stat, p = paired_t_test(xs, ys)
        ref = stats.ttest_rel(xs, ys)
        assert stat == pytest.approx(float(ref.statistic))
        assert p == pytest.approx(float(ref.pvalue))

    def test_size_validation(self):
        with pytest.raises(MetricsError):
            paired_t_test([1.0], [1.0])
