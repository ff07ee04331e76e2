"""The training loop and its run records.

One TrainingSession drives both the headless experiments and the live
serve engine, so a run with an empty control stream is the same code path
(and therefore the same numbers) as a batch run. Hyperparameter changes
only ever land between batches.

Recorded series: ``(samples_seen, loss, train_acc, test_acc)``. Train
loss/accuracy are sliding-window statistics over the most recent
``train_window`` training samples; the origin point (samples_seen 0)
measures the untrained network on the first ``eval_slice`` training
samples instead. Test accuracy comes from the first ``eval_slice`` test
samples in budget mode and the full test split at epoch boundaries.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import asdict, dataclass, field

import numpy as np

from . import checkpoint, kernels, metrics
from .data import LabeledImageSet, load_dataset, one_hot_batch, shuffled_batches
from .errors import DivergedError, InvalidRangeError, NonFiniteError
from .loss import softmax_xent
from .models import build_model
from .network import Network
from .optim import HyperParams, make_optimizer
from .rng import RandomSource


@dataclass
class RunConfig:
    """Everything a single training run depends on."""

    dataset: str = "mnist"
    data_dir: str = "data"
    arch: str = "mlp"
    width: int = 784
    optimizer: str = "sgd"
    lr: float = 0.01
    momentum: float = 0.0
    rho: float = 0.95
    eps: float = 1e-6
    dropout_rate: float = 0.0
    dropout_after_pool: bool = False
    batch_size: int = 32
    seed: int = 7
    subset: int | None = None  # first n training samples
    test_subset: int | None = None
    epochs: int | None = None  # epoch mode
    sample_budget: int | None = None  # budget mode
    eval_every: int = 5000
    eval_slice: int = 1000
    train_window: int = 1000

    def validate(self):
        if (self.epochs is None) == (self.sample_budget is None):
            raise InvalidRangeError("set exactly one of epochs / sample_budget")
        if self.batch_size < 1:
            raise InvalidRangeError("batch_size must be >= 1")
        HyperParams(self.lr, self.momentum, self.rho, self.eps).validate()
        return self


@dataclass
class SeriesPoint:
    samples_seen: int
    loss: float
    train_acc: float
    test_acc: float


@dataclass
class RunRecord:
    """Config echo plus everything a run measured."""

    config: dict
    backend: str
    series: list[SeriesPoint] = field(default_factory=list)
    epoch_test_error: list[float] = field(default_factory=list)
    epoch_train_error: list[float] = field(default_factory=list)
    final: dict | None = None  # MetricsReport.to_dict() on the test split
    wall_clock: float = 0.0
    diverged: bool = False
    hyper_events: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        d = dict(d)
        d["series"] = [SeriesPoint(**p) for p in d["series"]]
        return cls(**d)

    def final_test_error(self) -> float:
        if self.diverged or not self.series:
            return float("inf")
        return 100.0 * (1.0 - self.series[-1].test_acc)


def predict_labels(net: Network, images: np.ndarray, batch_size: int = 512) -> np.ndarray:
    """Argmax class for every image, in eval mode."""
    mode = net.mode
    net.eval()
    try:
        out = np.empty(images.shape[0], dtype=np.int64)
        for start in range(0, images.shape[0], batch_size):
            logits, _ = net.forward(images[start : start + batch_size])
            out[start : start + batch_size] = logits.argmax(axis=1)
        return out
    finally:
        net.mode = mode


def evaluate(net: Network, dataset: LabeledImageSet, limit: int | None = None):
    """(accuracy fraction, MetricsReport) over the first ``limit`` samples."""
    images = dataset.images.data
    labels = dataset.labels
    if limit is not None:
        images, labels = images[:limit], labels[:limit]
    pred = predict_labels(net, images)
    rep = metrics.report(pred, labels)
    return 1.0 - rep.error_rate / 100.0, rep


def _eval_loss(net: Network, dataset: LabeledImageSet, limit: int):
    """(mean loss, accuracy) of the untrained/frozen net on a data prefix."""
    images = dataset.images.data[:limit]
    labels = dataset.labels[:limit]
    mode = net.mode
    net.eval()
    try:
        logits, _ = net.forward(images)
    finally:
        net.mode = mode
    loss, _ = softmax_xent(logits, one_hot_batch(labels))
    acc = float((logits.argmax(axis=1) == labels).mean())
    return loss, acc


class TrainingSession:
    """A stepwise training run: one batch per step, controls between steps."""

    def __init__(self, cfg: RunConfig, train_set: LabeledImageSet | None = None,
                 test_set: LabeledImageSet | None = None):
        self.cfg = cfg.validate()
        self.rng = RandomSource(cfg.seed)
        if train_set is None:
            train_set = load_dataset(cfg.dataset, cfg.data_dir, "train")
        if test_set is None:
            test_set = load_dataset(cfg.dataset, cfg.data_dir, "test")
        if cfg.subset:
            train_set = train_set.subset(min(cfg.subset, len(train_set)))
        if cfg.test_subset:
            test_set = test_set.subset(min(cfg.test_subset, len(test_set)))
        self.train_set, self.test_set = train_set, test_set

        self.net = build_model(
            cfg.arch, self.rng, width=cfg.width,
            dropout_rate=cfg.dropout_rate, dropout_after_pool=cfg.dropout_after_pool,
        )
        self.hp = HyperParams(cfg.lr, cfg.momentum, cfg.rho, cfg.eps).validate()
        self.optimizer = make_optimizer(cfg.optimizer, self.net.params, self.hp)

        self.samples_seen = 0
        self.epoch = 0
        self.diverged = False
        self.series: list[SeriesPoint] = []
        self.epoch_test_error: list[float] = []
        self.epoch_train_error: list[float] = []
        self.hyper_events: list[dict] = []
        self.last_eval = (float("nan"), None)  # (test_acc, MetricsReport)
        self._window: deque[tuple[int, float, int]] = deque()  # (n, loss*n, correct)
        self._batches = None
        self._started = time.perf_counter()

    # -- hyperparameter steering ------------------------------------------

    HYPER_KEYS = ("lr", "momentum", "optimizer", "dropout_rate", "rho", "eps")

    def set_hyper(self, key: str, value) -> None:
        """Validate and apply a knob change; takes effect on the next batch."""
        if key not in self.HYPER_KEYS:
            raise InvalidRangeError(
                f"unknown hyperparameter {key!r}; valid: {', '.join(self.HYPER_KEYS)}"
            )
        if key == "optimizer":
            # fresh state buffers for the new rule
            self.optimizer = make_optimizer(str(value), self.net.params, self.hp)
        elif key == "dropout_rate":
            rate = float(value)
            if not 0.0 <= rate < 1.0:
                raise InvalidRangeError(f"dropout rate must be in [0,1), got {rate}")
            changed = False
            for layer in self.net.layers:
                if layer.kind == "dropout":
                    layer.rate = rate
                    changed = True
            if not changed:
                raise InvalidRangeError("this architecture has no dropout layer")
        else:
            trial = HyperParams(**{**asdict(self.hp), key: float(value)})
            trial.validate()
            setattr(self.hp, key, float(value))
        self.hyper_events.append(
            {"samples_seen": self.samples_seen, "key": key, "value": value}
        )

    # -- stepping ----------------------------------------------------------

    def _next_batch(self):
        if self._batches is None:
            self._batches = shuffled_batches(self.train_set, self.cfg.batch_size, self.rng)
        batch = next(self._batches, None)
        if batch is None:
            self.epoch += 1
            self._batches = shuffled_batches(self.train_set, self.cfg.batch_size, self.rng)
            batch = next(self._batches)
        return batch

    def step(self) -> dict:
        """Train on one batch; returns its loss/accuracy."""
        if self.diverged:
            raise DivergedError("session has diverged; no further steps")
        batch = self._next_batch()
        try:
            logits, caches = self.net.forward(batch.x, rng=self.rng)
            loss, dlogits = softmax_xent(logits, batch.y_onehot.data)
            if not np.isfinite(loss):
                raise DivergedError(f"non-finite loss at {self.samples_seen} samples")
            self.net.backward(caches, dlogits)
            self.optimizer.step()
        except (DivergedError, NonFiniteError):
            self.diverged = True
            raise
        n = len(batch)
        correct = int((logits.argmax(axis=1) == batch.y_index).sum())
        self.samples_seen += n
        self._window.append((n, loss * n, correct))
        while sum(w[0] for w in self._window) - self._window[0][0] >= self.cfg.train_window:
            self._window.popleft()
        return {"n": n, "loss": loss, "acc": correct / n}

    def window_stats(self) -> tuple[float, float]:
        """(mean loss, accuracy) over the sliding training window."""
        n = sum(w[0] for w in self._window)
        if n == 0:
            return float("nan"), float("nan")
        return (
            sum(w[1] for w in self._window) / n,
            sum(w[2] for w in self._window) / n,
        )

    # -- recording ---------------------------------------------------------

    def eval_test(self, full: bool = False):
        limit = None if full else min(self.cfg.eval_slice, len(self.test_set))
        acc, rep = evaluate(self.net, self.test_set, limit)
        self.last_eval = (acc, rep)
        return acc, rep

    def record_point(self, test_acc: float) -> None:
        if self.series and self.series[-1].samples_seen == self.samples_seen:
            return  # keep samples_seen strictly increasing
        if self.samples_seen == 0:
            loss, acc = _eval_loss(
                self.net, self.train_set, min(self.cfg.eval_slice, len(self.train_set))
            )
        else:
            loss, acc = self.window_stats()
        self.series.append(SeriesPoint(self.samples_seen, loss, acc, test_acc))

    # -- whole-run drivers ---------------------------------------------------

    def batches_per_epoch(self) -> int:
        n = len(self.train_set)
        return (n + self.cfg.batch_size - 1) // self.cfg.batch_size

    def run_epochs(self, progress=None) -> None:
        """Epoch mode: full-test evaluation after every epoch."""
        per_epoch = self.batches_per_epoch()
        for _ in range(self.cfg.epochs):
            for _ in range(per_epoch):
                self.step()
            acc, _rep = self.eval_test(full=True)
            self.epoch_test_error.append(100.0 * (1.0 - acc))
            train_acc_full, _ = evaluate(self.net, self.train_set)
            self.epoch_train_error.append(100.0 * (1.0 - train_acc_full))
            self.record_point(acc)
            if progress:
                progress(self)

    def run_budget(self, progress=None) -> None:
        """Budget mode: cadence evaluation on the fixed test slice."""
        budget = self.cfg.sample_budget
        acc, _ = self.eval_test()
        self.record_point(acc)
        next_eval = self.cfg.eval_every
        while self.samples_seen < budget:
            self.step()
            if self.samples_seen >= next_eval or self.samples_seen >= budget:
                acc, _ = self.eval_test()
                self.record_point(acc)
                while next_eval <= self.samples_seen:
                    next_eval += self.cfg.eval_every
                if progress:
                    progress(self)

    def save_checkpoint(self, path, meta: dict | None = None) -> None:
        info = {"config": asdict(self.cfg), "samples_seen": self.samples_seen}
        if meta:
            info.update(meta)
        checkpoint.save(self.net, path, seed=self.cfg.seed, meta=info)

    def to_record(self) -> RunRecord:
        final = self.last_eval[1].to_dict() if self.last_eval[1] is not None else None
        return RunRecord(
            config=asdict(self.cfg),
            backend=kernels.BACKEND,
            series=self.series,
            epoch_test_error=self.epoch_test_error,
            epoch_train_error=self.epoch_train_error,
            final=final,
            wall_clock=time.perf_counter() - self._started,
            diverged=self.diverged,
            hyper_events=self.hyper_events,
        )


def run_training(cfg: RunConfig, train_set=None, test_set=None, progress=None,
                 checkpoint_path=None) -> RunRecord:
    """Run one configured session to completion; divergence is recorded,
    not raised."""
    session = TrainingSession(cfg, train_set, test_set)
    try:
        if cfg.epochs is not None:
            session.run_epochs(progress)
        else:
            session.run_budget(progress)
        if not session.series:
            acc, _ = session.eval_test()
            session.record_point(acc)
        if checkpoint_path is not None:
            session.save_checkpoint(checkpoint_path)
    except (DivergedError, NonFiniteError):
        pass  # session.diverged already set
    return session.to_record()
