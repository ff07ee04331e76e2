"""The built-in experiments.

exp1  MLP learning-rate sweep on MNIST (epoch-by-epoch error table)
exp2  MLP-vs-CNN comparison across first-hidden-layer widths
exp3  per-digit precision/recall/F1 of the MNIST CNN, per seed
exp4  CIFAR-10 CNN, plain SGD vs momentum 0.9, no dropout
exp5  CIFAR-10 CNN with dropout, momentum SGD vs Adadelta

Desk-scale defaults (10k MNIST subset, 150k CIFAR sample budget) keep
every experiment laptop-sized; ``full_scale`` restores the classic sizes.
Every run embeds its config and seed in its record and saves a checkpoint
so each reported number can be recomputed from disk.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import report as report_io
from .data import load_dataset
from .metrics import area_under_series
from .train import RunConfig, RunRecord, run_training

EXP1_LRS = (1.0, 0.5, 0.1, 0.01)
EXP2_WIDTHS = (196, 392, 784, 1568, 3136, 6272, 9408, 12544)
DEFAULT_LR = 0.5  # classic toolkit default for the MNIST MLP sweeps
BEST_LR = 0.1  # winner of the exp1 sweep; exp2's second MLP and the CNN use it
CIFAR_DEFAULT_LR = 0.01


@dataclass
class ExperimentConfig:
    data_dir: str = "data"
    out_dir: str = "runs"
    fmt: str = "csv"
    seed: int = 7
    epochs: int = 10
    batch_size: int = 32
    subset: int | None = 10_000  # MNIST desk-scale training subset
    width: int = 784
    widths: tuple[int, ...] = EXP2_WIDTHS
    seeds: tuple[int, ...] = (7, 17)  # exp3 per-digit runs
    lr: float | None = None
    momentum: float | None = None
    optimizer: str | None = None
    dropout_rate: float = 0.5
    dropout_after_pool: bool = False
    sample_budget: int = 150_000  # CIFAR desk-scale budget
    eval_every: int = 5000
    eval_slice: int = 1000
    full_scale: bool = False

    def __post_init__(self):
        if self.full_scale:
            self.subset = None
            self.sample_budget = 2_000_000


def _mnist(cfg: ExperimentConfig):
    train = load_dataset("mnist", cfg.data_dir, "train")
    test = load_dataset("mnist", cfg.data_dir, "test")
    return train, test


def _run(cfg: ExperimentConfig, run_cfg: RunConfig, name: str, train, test) -> RunRecord:
    ckpt = Path(cfg.out_dir) / f"{name}.ckpt"
    record = run_training(run_cfg, train, test, checkpoint_path=ckpt)
    report_io.emit_run(record, cfg.out_dir, name)
    return record


def run_lr_sweep(cfg: ExperimentConfig) -> dict:
    """exp1: train one MLP per learning rate; tabulate per-epoch error."""
    train, test = _mnist(cfg)
    test_table: dict[float, list[float]] = {}
    train_table: dict[float, list[float]] = {}
    records: dict[float, RunRecord] = {}
    for lr in EXP1_LRS:
        rc = RunConfig(
            dataset="mnist", data_dir=cfg.data_dir, arch="mlp", width=cfg.width,
            optimizer="sgd", lr=lr, batch_size=cfg.batch_size, seed=cfg.seed,
            subset=cfg.subset, epochs=cfg.epochs,
        )
        rec = _run(cfg, rc, f"exp1_lr{lr:g}_seed{cfg.seed}", train, test)
        records[lr] = rec
        test_table[lr] = rec.epoch_test_error
        train_table[lr] = rec.epoch_train_error
    if cfg.fmt == "csv":
        report_io.write_lr_table(test_table, report_io.table_path(cfg.out_dir, "exp1_test_error", "csv"))
        report_io.write_lr_table(train_table, report_io.table_path(cfg.out_dir, "exp1_train_error", "csv"))
    else:
        report_io.write_table_json(
            {"test_error": {str(k): v for k, v in test_table.items()},
             "train_error": {str(k): v for k, v in train_table.items()}},
            report_io.table_path(cfg.out_dir, "exp1_error", "json"),
        )
    finals = {lr: records[lr].final_test_error() for lr in EXP1_LRS}
    best_lr = min(finals, key=finals.get)
    return {"test_error": test_table, "train_error": train_table,
            "final_test_error": finals, "best_lr": best_lr, "records": records}


def run_width_sweep(cfg: ExperimentConfig) -> dict:
    """exp2: MLP at the default and best lr, plus the CNN, per width."""
    train, test = _mnist(cfg)
    rows = []
    records: dict[tuple[str, int], RunRecord] = {}
    for width in cfg.widths:
        row = {"width": width}
        for col, arch, lr in (
            ("mlp_lr_default", "mlp", DEFAULT_LR),
            ("mlp_lr_best", "mlp", BEST_LR),
            ("cnn", "mnist_cnn", BEST_LR),
        ):
            rc = RunConfig(
                dataset="mnist", data_dir=cfg.data_dir, arch=arch, width=width,
                optimizer="sgd", lr=lr, batch_size=cfg.batch_size, seed=cfg.seed,
                subset=cfg.subset, epochs=cfg.epochs,
            )
            rec = _run(cfg, rc, f"exp2_{col}_w{width}_seed{cfg.seed}", train, test)
            records[(col, width)] = rec
            row[col] = rec.final_test_error()
        rows.append(row)
    if cfg.fmt == "csv":
        report_io.write_width_table(rows, report_io.table_path(cfg.out_dir, "exp2_width_error", "csv"))
    else:
        report_io.write_table_json(rows, report_io.table_path(cfg.out_dir, "exp2_width_error", "json"))
    return {"rows": rows, "records": records}


def run_per_digit(cfg: ExperimentConfig) -> dict:
    """exp3: per-digit P/R/F1 of the CNN; best-F1 digit recorded per seed."""
    train, test = _mnist(cfg)
    per_seed = {}
    for seed in cfg.seeds:
        rc = RunConfig(
            dataset="mnist", data_dir=cfg.data_dir, arch="mnist_cnn", width=cfg.width,
            optimizer=cfg.optimizer or "sgd",
            lr=cfg.lr if cfg.lr is not None else BEST_LR,
            momentum=cfg.momentum if cfg.momentum is not None else 0.0,
            batch_size=cfg.batch_size, seed=seed, subset=cfg.subset, epochs=cfg.epochs,
        )
        rec = _run(cfg, rc, f"exp3_seed{seed}", train, test)
        rep = rec.final
        name = f"exp3_digits_seed{seed}"
        if cfg.fmt == "csv":
            report_io.write_digit_table(rep, report_io.table_path(cfg.out_dir, name, "csv"))
        else:
            report_io.write_table_json(rep, report_io.table_path(cfg.out_dir, name, "json"))
        per_seed[seed] = {
            "record": rec,
            "report": rep,
            "best_f1_digit": int(np.argmax(rep["f1"])),
        }
    summary = {str(s): {"best_f1_digit": v["best_f1_digit"],
                        "error_rate": v["report"]["error_rate"]}
               for s, v in per_seed.items()}
    report_io.write_table_json(summary, Path(cfg.out_dir) / "exp3_summary.json")
    return per_seed


def _run_cifar_variant(cfg: ExperimentConfig, name: str, optimizer: str, lr: float,
                       momentum: float, dropout_rate: float, train, test) -> RunRecord:
    rc = RunConfig(
        dataset="cifar10", data_dir=cfg.data_dir, arch="cifar_cnn",
        optimizer=optimizer, lr=lr, momentum=momentum,
        dropout_rate=dropout_rate, dropout_after_pool=cfg.dropout_after_pool,
        batch_size=cfg.batch_size, seed=cfg.seed,
        sample_budget=cfg.sample_budget, eval_every=cfg.eval_every,
        eval_slice=cfg.eval_slice,
    )
    return _run(cfg, rc, name, train, test)


def run_cifar(cfg: ExperimentConfig, dropout: bool) -> dict:
    """exp4 (dropout=False): SGD vs SGD+0.9. exp5 (dropout=True): SGD+ vs Adadelta."""
    train = load_dataset("cifar10", cfg.data_dir, "train")
    test = load_dataset("cifar10", cfg.data_dir, "test")
    lr = cfg.lr if cfg.lr is not None else CIFAR_DEFAULT_LR
    rate = cfg.dropout_rate if dropout else 0.0
    tag = "exp5" if dropout else "exp4"
    if dropout:
        variants = [("sgd_momentum", "momentum", 0.9), ("adadelta", "adadelta", 0.0)]
    else:
        variants = [("sgd", "sgd", 0.0), ("sgd_momentum", "momentum", 0.9)]
    records = {}
    for label, opt, mu in variants:
        records[label] = _run_cifar_variant(
            cfg, f"{tag}_{label}_seed{cfg.seed}", opt, lr, mu, rate, train, test
        )
    out = {"records": records}
    if dropout:
        out["auc_train_acc"] = {
            label: area_under_series(
                [p.samples_seen for p in rec.series],
                [p.train_acc for p in rec.series],
                cfg.sample_budget,
            )
            for label, rec in records.items()
        }
        report_io.write_table_json(
            {k: v for k, v in out["auc_train_acc"].items()},
            Path(cfg.out_dir) / f"{tag}_auc.json",
        )
    return out
