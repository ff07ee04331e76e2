"""Command-line interface.

    desknet exp1 --data-dir data --out runs/exp1       learning-rate sweep
    desknet exp2 --widths 196,784,3136,12544           width comparison
    desknet exp3 --seeds 7,17                          per-digit P/R/F1
    desknet exp4 / exp5                                CIFAR-10 optimizer runs
    desknet serve --listen 127.0.0.1:7788              live steerable engine
    desknet fetch-data --data-dir data                 download datasets
    desknet bench                                      kernel backend timings
"""

from __future__ import annotations

import argparse
import sys

from . import experiments, fetch
from .errors import DesknetError


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--data-dir", default="data", help="dataset directory (see fetch-data)")
    p.add_argument("--out", default="runs", help="output directory for records and tables")
    p.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt",
                   help="table file format")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--subset", type=int, default=10_000,
                   help="train on the first N samples (0 = full set)")
    p.add_argument("--lr", type=float, default=None, help="override learning rate")
    p.add_argument("--momentum", type=float, default=None)
    p.add_argument("--optimizer", choices=("sgd", "momentum", "adadelta"), default=None)
    p.add_argument("--dropout-rate", type=float, default=0.5)
    p.add_argument("--width", type=int, default=784, help="first hidden layer width")
    p.add_argument("--full-scale", action="store_true",
                   help="classic sizes: full MNIST train set / 2M CIFAR samples")


def _cfg(args) -> experiments.ExperimentConfig:
    cfg = experiments.ExperimentConfig(
        data_dir=args.data_dir,
        out_dir=args.out,
        fmt=args.fmt,
        seed=args.seed,
        epochs=args.epochs,
        batch_size=args.batch_size,
        subset=args.subset or None,
        width=args.width,
        lr=args.lr,
        momentum=args.momentum,
        optimizer=args.optimizer,
        dropout_rate=args.dropout_rate,
        full_scale=args.full_scale,
    )
    if getattr(args, "widths", None):
        cfg.widths = tuple(int(w) for w in args.widths.split(","))
    if getattr(args, "seeds", None):
        cfg.seeds = tuple(int(s) for s in args.seeds.split(","))
    if getattr(args, "sample_budget", None):
        cfg.sample_budget = args.sample_budget
    if getattr(args, "eval_every", None):
        cfg.eval_every = args.eval_every
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="desknet", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("exp1", help="MNIST MLP learning-rate sweep")
    _add_common(p1)

    p2 = sub.add_parser("exp2", help="MNIST MLP vs CNN across hidden widths")
    _add_common(p2)
    p2.add_argument("--widths", default=None,
                    help="comma-separated hidden widths (default: the classic 8)")

    p3 = sub.add_parser("exp3", help="per-digit precision/recall/F1 of the MNIST CNN")
    _add_common(p3)
    p3.add_argument("--seeds", default="7,17", help="comma-separated seeds")

    for tag, hlp in (("exp4", "CIFAR-10: plain SGD vs momentum 0.9"),
                     ("exp5", "CIFAR-10 with dropout: momentum SGD vs Adadelta")):
        p = sub.add_parser(tag, help=hlp)
        _add_common(p)
        p.add_argument("--sample-budget", type=int, default=None,
                       help="training samples to consume (default 150000)")
        p.add_argument("--eval-every", type=int, default=None,
                       help="evaluation cadence in samples (default 5000)")

    ps = sub.add_parser("serve", help="live steerable training engine")
    ps.add_argument("--listen", default="127.0.0.1:7788", help="host:port to bind")
    ps.add_argument("--stats-every", type=int, default=2000,
                    help="stats event cadence in samples")
    ps.add_argument("--data-dir", default="data")

    pf = sub.add_parser("fetch-data", help="download and verify the datasets")
    pf.add_argument("--data-dir", default="data")
    pf.add_argument("--datasets", default="mnist,cifar10")
    pf.add_argument("--base-url", default=None, help="alternative mirror base URL")

    pb = sub.add_parser("bench", help="compare compiled and numpy kernel backends")
    pb.add_argument("--repeat", type=int, default=3)

    args = parser.parse_args(argv)
    try:
        if args.command == "exp1":
            result = experiments.run_lr_sweep(_cfg(args))
            print(f"best learning rate: {result['best_lr']:g}")
            for lr, err in result["final_test_error"].items():
                print(f"  lr={lr:<6g} final test error {err:.2f}%")
        elif args.command == "exp2":
            result = experiments.run_width_sweep(_cfg(args))
            for row in result["rows"]:
                print(
                    f"  width {row['width']:>6}: mlp(default) {row['mlp_lr_default']:.2f}%  "
                    f"mlp(best) {row['mlp_lr_best']:.2f}%  cnn {row['cnn']:.2f}%"
                )
        elif args.command == "exp3":
            result = experiments.run_per_digit(_cfg(args))
            for seed, res in result.items():
                print(f"  seed {seed}: best-F1 digit {res['best_f1_digit']}, "
                      f"error {res['report']['error_rate']:.2f}%")
        elif args.command in ("exp4", "exp5"):
            result = experiments.run_cifar(_cfg(args), dropout=args.command == "exp5")
            for label, rec in result["records"].items():
                last = rec.series[-1]
                print(f"  {label}: final train acc {last.train_acc:.3f}, "
                      f"test acc {last.test_acc:.3f} at {last.samples_seen} samples")
            if "auc_train_acc" in result:
                for label, auc in result["auc_train_acc"].items():
                    print(f"  {label}: mean train accuracy over window {auc:.3f}")
        elif args.command == "serve":
            from .serve import serve_forever

            serve_forever(args.listen, args.stats_every, args.data_dir)
        elif args.command == "fetch-data":
            fetch.fetch(args.data_dir, tuple(args.datasets.split(",")), args.base_url)
        elif args.command == "bench":
            from .bench import run_benchmark

            run_benchmark(args.repeat)
    except DesknetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
