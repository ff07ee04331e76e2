"""Experiment drivers at fixture scale: wiring, outputs, and invariants.

The classic-trend assertions (which learning rate wins, CNN vs MLP gaps)
belong to the acceptance suite and need the real datasets; here the same
code paths run end to end on the synthetic fixtures.
"""

import json

import numpy as np
import pytest

from desknet import experiments
from desknet.experiments import ExperimentConfig
from desknet.metrics import micro_recall


def tiny_cfg(fixture_data_dir, tmp_path, **kw):
    base = dict(
        data_dir=str(fixture_data_dir), out_dir=str(tmp_path / "out"), seed=7,
        epochs=1, batch_size=16, subset=64, width=8,
        sample_budget=64, eval_every=32, eval_slice=32,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_exp1_produces_table_and_best_lr(fixture_data_dir, tmp_path):
    cfg = tiny_cfg(fixture_data_dir, tmp_path)
    out = experiments.run_lr_sweep(cfg)
    assert set(out["test_error"]) == set(experiments.EXP1_LRS)
    assert out["best_lr"] in experiments.EXP1_LRS
    assert (tmp_path / "out" / "exp1_test_error.csv").is_file()
    assert (tmp_path / "out" / "exp1_train_error.csv").is_file()
    for lr in experiments.EXP1_LRS:
        assert (tmp_path / "out" / f"exp1_lr{lr:g}_seed7.json").is_file()
        assert (tmp_path / "out" / f"exp1_lr{lr:g}_seed7.ckpt").is_file()


def test_exp1_deterministic_across_calls(fixture_data_dir, tmp_path):
    cfg = tiny_cfg(fixture_data_dir, tmp_path)
    a = experiments.run_lr_sweep(cfg)
    b = experiments.run_lr_sweep(cfg)
    assert a["test_error"] == b["test_error"]


def test_exp2_rows_cover_all_widths(fixture_data_dir, tmp_path):
    cfg = tiny_cfg(fixture_data_dir, tmp_path, widths=(8, 16))
    out = experiments.run_width_sweep(cfg)
    assert [r["width"] for r in out["rows"]] == [8, 16]
    for row in out["rows"]:
        for col in ("mlp_lr_default", "mlp_lr_best", "cnn"):
            assert np.isfinite(row[col])
    assert (tmp_path / "out" / "exp2_width_error.csv").is_file()


def test_exp2_same_width_same_seed_identical(fixture_data_dir, tmp_path):
    cfg = tiny_cfg(fixture_data_dir, tmp_path, widths=(8, 8))
    out = experiments.run_width_sweep(cfg)
    assert out["rows"][0] == {**out["rows"][1]}


def test_exp3_reports_per_seed(fixture_data_dir, tmp_path):
    cfg = tiny_cfg(fixture_data_dir, tmp_path, seeds=(7, 17), epochs=2)
    out = experiments.run_per_digit(cfg)
    assert set(out) == {7, 17}
    for seed, res in out.items():
        rep = res["report"]
        assert 0 <= res["best_f1_digit"] <= 9
        cm = np.array(rep["confusion"])
        assert micro_recall(cm) == pytest.approx(100.0 - rep["error_rate"])
        assert (tmp_path / "out" / f"exp3_digits_seed{seed}.csv").is_file()
    summary = json.loads((tmp_path / "out" / "exp3_summary.json").read_text())
    assert set(summary) == {"7", "17"}


def test_exp4_two_sgd_variants(fixture_data_dir, tmp_path):
    cfg = tiny_cfg(fixture_data_dir, tmp_path, batch_size=8, sample_budget=32,
                   eval_every=16, eval_slice=24)
    out = experiments.run_cifar(cfg, dropout=False)
    assert set(out["records"]) == {"sgd", "sgd_momentum"}
    for rec in out["records"].values():
        assert rec.config["arch"] == "cifar_cnn"
        assert rec.config["dropout_rate"] == 0.0
        assert [p.samples_seen for p in rec.series][0] == 0


def test_exp5_dropout_variants_and_auc(fixture_data_dir, tmp_path):
    cfg = tiny_cfg(fixture_data_dir, tmp_path, batch_size=8, sample_budget=32,
                   eval_every=16, eval_slice=24)
    out = experiments.run_cifar(cfg, dropout=True)
    assert set(out["records"]) == {"sgd_momentum", "adadelta"}
    for rec in out["records"].values():
        assert rec.config["dropout_rate"] == 0.5
    assert set(out["auc_train_acc"]) == {"sgd_momentum", "adadelta"}
    for v in out["auc_train_acc"].values():
        assert 0.0 <= v <= 1.0
    assert (tmp_path / "out" / "exp5_auc.json").is_file()


def test_budget_zero_gives_single_chance_level_point(fixture_data_dir, tmp_path):
    cfg = tiny_cfg(fixture_data_dir, tmp_path, sample_budget=0, eval_slice=100)
    out = experiments.run_cifar(cfg, dropout=False)
    for rec in out["records"].values():
        assert len(rec.series) == 1
        assert rec.series[0].samples_seen == 0
        # untrained net on the balanced fixture test slice: near chance
        assert 0.0 <= rec.series[0].test_acc <= 0.35


def test_full_scale_flag_switches_sizes():
    cfg = ExperimentConfig(full_scale=True)
    assert cfg.subset is None
    assert cfg.sample_budget == 2_000_000
