"""Machine-readable run reports.

Every run emits a JSON record (exact float round-trip via repr) and/or a
CSV series file; each experiment additionally emits one table file shaped
like its classic presentation: learning-rate columns per epoch row,
width rows by model columns, digit rows by precision/recall/F1.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .errors import InvalidRangeError
from .train import RunRecord

FORMATS = ("csv", "json")


def _float(x) -> str:
    return repr(float(x))


def write_record_json(record: RunRecord, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(record.to_dict(), indent=2, sort_keys=True) + "\n")


def read_record_json(path) -> RunRecord:
    return RunRecord.from_dict(json.loads(Path(path).read_text()))


def write_series_csv(record: RunRecord, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["samples_seen", "loss", "train_acc", "test_acc"])
        for p in record.series:
            w.writerow([p.samples_seen, _float(p.loss), _float(p.train_acc), _float(p.test_acc)])


def write_lr_table(per_lr_epoch_errors: dict[float, list[float]], path) -> None:
    """Rows = epochs, one error column per learning rate."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lrs = list(per_lr_epoch_errors)
    n_epochs = max(len(v) for v in per_lr_epoch_errors.values())
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["epoch"] + [f"lr={lr:g}" for lr in lrs])
        for e in range(n_epochs):
            row = [e + 1]
            for lr in lrs:
                errs = per_lr_epoch_errors[lr]
                row.append(_float(errs[e]) if e < len(errs) else "diverged")
            w.writerow(row)


def write_width_table(rows: list[dict], path) -> None:
    """Rows = widths; columns = the two MLP variants and the CNN."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["width", "mlp_lr_default", "mlp_lr_best", "cnn"])
        for r in rows:
            w.writerow(
                [r["width"], _float(r["mlp_lr_default"]), _float(r["mlp_lr_best"]), _float(r["cnn"])]
            )


def write_digit_table(report_dict: dict, path) -> None:
    """Rows = digits 0..9; columns = precision, recall, F1 (percent)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["digit", "precision", "recall", "f1"])
        for d in range(10):
            w.writerow(
                [d, _float(report_dict["precision"][d]), _float(report_dict["recall"][d]),
                 _float(report_dict["f1"][d])]
            )


def write_table_json(obj, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def emit_run(record: RunRecord, out_dir, name: str) -> list[Path]:
    """Write one run's full JSON record plus its plotting series CSV."""
    out_dir = Path(out_dir)
    paths = [out_dir / f"{name}.json", out_dir / f"{name}_series.csv"]
    write_record_json(record, paths[0])
    write_series_csv(record, paths[1])
    return paths


def table_path(out_dir, name: str, fmt: str) -> Path:
    if fmt not in FORMATS:
        raise InvalidRangeError(f"format must be one of {FORMATS}, got {fmt!r}")
    return Path(out_dir) / f"{name}.{fmt}"
