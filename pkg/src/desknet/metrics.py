"""Classification metrics: error rate, confusion matrix, per-class P/R/F1.

All rates are percentages (0..100), displayed to two decimals. Division-
by-zero cases (a class never predicted, or never present) return 0 and are
flagged in the report rather than poisoning averages with NaN.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidRangeError

N_CLASSES = 10


def error_rate(pred_labels, true_labels) -> float:
    """100 * mismatches / N."""
    pred = np.asarray(pred_labels)
    true = np.asarray(true_labels)
    if pred.shape != true.shape or pred.size == 0:
        raise InvalidRangeError("need equal-length, non-empty label sequences")
    return 100.0 * float(np.count_nonzero(pred != true)) / pred.size


def accuracy(pred_labels, true_labels) -> float:
    """Fraction correct in [0, 1]."""
    return 1.0 - error_rate(pred_labels, true_labels) / 100.0


def confusion(pred_labels, true_labels) -> np.ndarray:
    """10x10 counts[true][pred]."""
    pred = np.asarray(pred_labels, dtype=np.int64)
    true = np.asarray(true_labels, dtype=np.int64)
    if pred.shape != true.shape:
        raise InvalidRangeError("label sequences must have equal length")
    for name, arr in (("pred", pred), ("true", true)):
        if arr.size and (arr.min() < 0 or arr.max() >= N_CLASSES):
            raise InvalidRangeError(f"{name} labels outside 0..{N_CLASSES - 1}")
    cm = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(cm, (true, pred), 1)
    return cm


def prf1(cm: np.ndarray, cls: int) -> tuple[float, float, float]:
    """Precision, recall, F1 for one class, in percent.

    Zero denominators yield 0 by convention (see MetricsReport.flags).
    """
    if not 0 <= cls < N_CLASSES:
        raise InvalidRangeError(f"class must be in 0..{N_CLASSES - 1}, got {cls}")
    tp = float(cm[cls, cls])
    fp = float(cm[:, cls].sum() - tp)
    fn = float(cm[cls, :].sum() - tp)
    precision = 100.0 * tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = 100.0 * tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


@dataclass
class MetricsReport:
    """Error rate plus per-class and macro P/R/F1, all in percent."""

    error_rate: float
    precision: list[float]
    recall: list[float]
    f1: list[float]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    confusion: list[list[int]]
    flags: list[str] = field(default_factory=list)  # zero-denominator notes

    def to_dict(self) -> dict:
        return {
            "error_rate": self.error_rate,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "confusion": self.confusion,
            "flags": self.flags,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(**d)

    def best_f1_class(self) -> int:
        return int(np.argmax(self.f1))


def report_from_confusion(cm: np.ndarray) -> MetricsReport:
    total = int(cm.sum())
    if total == 0:
        raise InvalidRangeError("empty confusion matrix")
    correct = int(np.trace(cm))
    err = 100.0 * (total - correct) / total
    ps, rs, fs, flags = [], [], [], []
    for cls in range(N_CLASSES):
        p, r, f = prf1(cm, cls)
        ps.append(p)
        rs.append(r)
        fs.append(f)
        if cm[:, cls].sum() == 0:
            flags.append(f"class {cls} never predicted")
        if cm[cls, :].sum() == 0:
            flags.append(f"class {cls} never present")
    return MetricsReport(
        error_rate=err,
        precision=ps,
        recall=rs,
        f1=fs,
        macro_precision=float(np.mean(ps)),
        macro_recall=float(np.mean(rs)),
        macro_f1=float(np.mean(fs)),
        confusion=cm.tolist(),
        flags=flags,
    )


def report(pred_labels, true_labels) -> MetricsReport:
    return report_from_confusion(confusion(pred_labels, true_labels))


def micro_recall(cm: np.ndarray) -> float:
    """Percent of all samples whose true class was predicted (= 100 - error)."""
    return 100.0 * float(np.trace(cm)) / float(cm.sum())


def area_under_series(xs, ys, x_max: float) -> float:
    """Mean of a piecewise-linear series over [first x, x_max] (trapezoid).

    Used to compare training-accuracy curves over a fixed sample window.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    keep = xs <= x_max
    xs, ys = xs[keep], ys[keep]
    if xs.size == 0:
        raise InvalidRangeError("no series points inside the window")
    if xs.size == 1 or xs[-1] == xs[0]:
        return float(ys[-1])
    return float(np.trapezoid(ys, xs) / (xs[-1] - xs[0]))
