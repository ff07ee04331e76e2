import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from desknet import metrics
from desknet.errors import InvalidRangeError

label_arrays = st.lists(st.integers(0, 9), min_size=1, max_size=200)


class TestErrorRate:
    def test_all_correct(self):
        assert metrics.error_rate([1, 2, 3], [1, 2, 3]) == 0.0

    def test_all_wrong(self):
        assert metrics.error_rate([1, 2, 3], [2, 3, 4]) == 100.0

    def test_three_of_eight(self):
        pred = [0, 1, 2, 3, 4, 5, 6, 7]
        true = [0, 1, 2, 9, 9, 9, 6, 7]  # 3 mismatches
        assert metrics.error_rate(pred, true) == 37.5

    def test_empty_rejected(self):
        with pytest.raises(InvalidRangeError):
            metrics.error_rate([], [])


class TestConfusion:
    def test_perfect_is_diagonal(self):
        labels = np.arange(10).repeat(3)
        cm = metrics.confusion(labels, labels)
        assert np.array_equal(cm, np.diag([3] * 10))

    def test_single_sample(self):
        cm = metrics.confusion([5], [3])
        want = np.zeros((10, 10), dtype=np.int64)
        want[3, 5] = 1
        assert np.array_equal(cm, want)

    @given(label_arrays)
    @settings(max_examples=30)
    def test_row_sums_are_true_counts(self, labels):
        true = np.array(labels)
        pred = np.roll(true, 1)
        cm = metrics.confusion(pred, true)
        assert cm.sum() == len(labels)
        for c in range(10):
            assert cm[c, :].sum() == int((true == c).sum())

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidRangeError):
            metrics.confusion([10], [0])


class TestPRF1:
    def test_diagonal_gives_100s(self):
        cm = np.diag([5] * 10)
        for cls in range(10):
            assert metrics.prf1(cm, cls) == (100.0, 100.0, 100.0)

    def test_absent_class_zero_by_convention(self):
        cm = np.zeros((10, 10), dtype=np.int64)
        cm[0, 0] = 4
        assert metrics.prf1(cm, 7) == (0.0, 0.0, 0.0)

    def test_hand_arithmetic(self):
        # TP=8, FP=2, FN=4: P=80, R=66.67, F1=72.73
        cm = np.zeros((10, 10), dtype=np.int64)
        cm[1, 1] = 8
        cm[0, 1] = 2  # false positives for class one
        cm[1, 0] = 4  # false negatives
        p, r, f1 = metrics.prf1(cm, 1)
        assert p == 80.0
        assert r == pytest.approx(200.0 / 3.0)
        assert f1 == pytest.approx(800.0 / 11.0)  # 72.7272...

    @given(label_arrays)
    @settings(max_examples=30)
    def test_f1_between_p_and_r(self, labels):
        true = np.array(labels)
        pred = np.roll(true, 1) if len(labels) > 1 else true
        cm = metrics.confusion(pred, true)
        for cls in range(10):
            p, r, f1 = metrics.prf1(cm, cls)
            if p > 0 and r > 0:
                assert min(p, r) - 1e-9 <= f1 <= max(p, r) + 1e-9


class TestReport:
    def test_micro_recall_complements_error_rate(self):
        rng = np.random.default_rng(4)
        true = rng.integers(0, 10, 500)
        pred = np.where(rng.uniform(size=500) < 0.3, rng.integers(0, 10, 500), true)
        rep = metrics.report(pred, true)
        cm = np.array(rep.confusion)
        assert metrics.micro_recall(cm) == pytest.approx(100.0 - rep.error_rate)

    def test_total_equals_sample_count(self):
        rng = np.random.default_rng(5)
        true = rng.integers(0, 10, 321)
        pred = rng.integers(0, 10, 321)
        rep = metrics.report(pred, true)
        assert int(np.sum(rep.confusion)) == 321

    def test_flags_on_missing_class(self):
        rep = metrics.report([0, 0, 0], [0, 1, 0])
        assert any("never predicted" in f for f in rep.flags)

    def test_round_trip_dict(self):
        rep = metrics.report([1, 2, 3], [1, 2, 2])
        again = metrics.MetricsReport.from_dict(rep.to_dict())
        assert again == rep

    def test_values_in_percent_range(self):
        rng = np.random.default_rng(6)
        true = rng.integers(0, 10, 200)
        pred = rng.integers(0, 10, 200)
        rep = metrics.report(pred, true)
        for v in [rep.error_rate, rep.macro_f1, *rep.precision, *rep.recall, *rep.f1]:
            assert 0.0 <= v <= 100.0


class TestAreaUnderSeries:
    def test_constant_series(self):
        assert metrics.area_under_series([0, 10, 20], [0.5, 0.5, 0.5], 20) == pytest.approx(0.5)

    def test_linear_ramp(self):
        # ramp 0 -> 1 over the window has mean 1/2
        assert metrics.area_under_series([0, 100], [0.0, 1.0], 100) == pytest.approx(0.5)

    def test_window_cut(self):
        # only points inside the window count
        v = metrics.area_under_series([0, 10, 1000], [1.0, 1.0, 0.0], 10)
        assert v == pytest.approx(1.0)

    def test_single_point(self):
        assert metrics.area_under_series([5], [0.7], 10) == pytest.approx(0.7)

    def test_empty_window_rejected(self):
        with pytest.raises(InvalidRangeError):
            metrics.area_under_series([50], [0.7], 10)
