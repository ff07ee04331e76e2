"""Dataset loading: IDX images/labels and CIFAR-10 binary batches.

Both loaders are pure functions of the file bytes and enforce the exact
binary layouts:

IDX (big endian):
    images: u32 magic 0x00000803 | u32 count | u32 rows | u32 cols | u8 pixels
    labels: u32 magic 0x00000801 | u32 count | u8 labels
CIFAR-10 binary: a file is a whole number of 3073-byte records,
    u8 label | 1024 red | 1024 green | 1024 blue (row-major 32x32 planes).

Pixels are divided by 255 into [0, 1]; no mean subtraction.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import (
    DataConsistencyError,
    DataFormatError,
    DataLengthError,
    DataRangeError,
    InvalidRangeError,
)
from .rng import RandomSource
from .tensor import Tensor

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801
CIFAR_RECORD = 3073

MNIST_CLASS_NAMES = [str(d) for d in range(10)]


@dataclass
class LabeledImageSet:
    """Images as an (N, C, H, W) tensor in [0,1] plus integer labels."""

    images: Tensor
    labels: np.ndarray  # int64, values in [0, 9]
    class_names: list[str]
    split: str  # "train" or "test"

    def __post_init__(self):
        if self.images.shape[0] != len(self.labels):
            raise DataConsistencyError(
                f"{self.images.shape[0]} images vs {len(self.labels)} labels"
            )

    def __len__(self):
        return len(self.labels)

    def subset(self, n: int) -> "LabeledImageSet":
        """First ``n`` samples, preserving file order (deterministic)."""
        if not 1 <= n <= len(self):
            raise InvalidRangeError(f"subset size {n} outside 1..{len(self)}")
        return LabeledImageSet(
            Tensor._wrap(np.ascontiguousarray(self.images.data[:n])),
            self.labels[:n].copy(),
            self.class_names,
            self.split,
        )


def _read_be_u32(buf: bytes, offset: int, path, what: str) -> int:
    if offset + 4 > len(buf):
        raise DataLengthError(f"{path}: truncated before {what}")
    return struct.unpack_from(">I", buf, offset)[0]


def _load_idx_images(path) -> np.ndarray:
    buf = Path(path).read_bytes()
    magic = _read_be_u32(buf, 0, path, "magic")
    if magic != IDX_IMAGE_MAGIC:
        raise DataFormatError(
            f"{path}: bad image magic 0x{magic:08x}, want 0x{IDX_IMAGE_MAGIC:08x}"
        )
    n = _read_be_u32(buf, 4, path, "count")
    rows = _read_be_u32(buf, 8, path, "rows")
    cols = _read_be_u32(buf, 12, path, "cols")
    want = 16 + n * rows * cols
    if len(buf) < want:
        raise DataLengthError(f"{path}: {len(buf)} bytes, header promises {want}")
    if len(buf) > want:
        raise DataLengthError(f"{path}: {len(buf) - want} trailing bytes")
    pixels = np.frombuffer(buf, dtype=np.uint8, offset=16)
    return pixels.reshape(n, 1, rows, cols)


def _load_idx_labels(path) -> np.ndarray:
    buf = Path(path).read_bytes()
    magic = _read_be_u32(buf, 0, path, "magic")
    if magic != IDX_LABEL_MAGIC:
        raise DataFormatError(
            f"{path}: bad label magic 0x{magic:08x}, want 0x{IDX_LABEL_MAGIC:08x}"
        )
    n = _read_be_u32(buf, 4, path, "count")
    want = 8 + n
    if len(buf) < want:
        raise DataLengthError(f"{path}: {len(buf)} bytes, header promises {want}")
    if len(buf) > want:
        raise DataLengthError(f"{path}: {len(buf) - want} trailing bytes")
    labels = np.frombuffer(buf, dtype=np.uint8, offset=8).astype(np.int64)
    if labels.size and labels.max() > 9:
        raise DataRangeError(f"{path}: label byte {labels.max()} > 9")
    return labels


def load_idx(images_path, labels_path, split: str = "train") -> LabeledImageSet:
    """Parse an IDX image/label file pair into a LabeledImageSet."""
    raw = _load_idx_images(images_path)
    labels = _load_idx_labels(labels_path)
    if raw.shape[0] != labels.shape[0]:
        raise DataConsistencyError(
            f"{raw.shape[0]} images in {images_path} vs {labels.shape[0]} labels in {labels_path}"
        )
    images = Tensor._wrap(np.ascontiguousarray(raw, dtype=np.float64) / 255.0)
    return LabeledImageSet(images, labels, MNIST_CLASS_NAMES, split)


def load_cifar10(batch_paths, meta_path, split: str = "train") -> LabeledImageSet:
    """Parse CIFAR-10 binary batch files plus the class-name meta file."""
    names = [ln.strip() for ln in Path(meta_path).read_text().splitlines() if ln.strip()]
    if len(names) != 10:
        raise DataFormatError(f"{meta_path}: expected 10 class names, got {len(names)}")

    chunks, label_chunks = [], []
    for path in batch_paths:
        buf = Path(path).read_bytes()
        if len(buf) == 0 or len(buf) % CIFAR_RECORD:
            raise DataFormatError(
                f"{path}: {len(buf)} bytes is not a whole number of {CIFAR_RECORD}-byte records"
            )
        records = np.frombuffer(buf, dtype=np.uint8).reshape(-1, CIFAR_RECORD)
        labels = records[:, 0].astype(np.int64)
        if labels.max() > 9:
            raise DataRangeError(f"{path}: label byte {labels.max()} > 9")
        chunks.append(records[:, 1:].reshape(-1, 3, 32, 32))
        label_chunks.append(labels)

    raw = np.concatenate(chunks, axis=0)
    labels = np.concatenate(label_chunks)
    images = Tensor._wrap(np.ascontiguousarray(raw, dtype=np.float64) / 255.0)
    return LabeledImageSet(images, labels, names, split)


def one_hot(label: int) -> Tensor:
    """Length-10 vector with a single 1 at the label's index."""
    label = int(label)
    if not 0 <= label <= 9:
        raise InvalidRangeError(f"label must be in 0..9, got {label}")
    v = np.zeros(10)
    v[label] = 1.0
    return Tensor._wrap(v)


def one_hot_batch(labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() > 9):
        raise InvalidRangeError("labels must be in 0..9")
    out = np.zeros((labels.size, 10))
    out[np.arange(labels.size), labels] = 1.0
    return out


def decode_one_hot(v) -> int:
    arr = v.data if isinstance(v, Tensor) else np.asarray(v)
    return int(arr.argmax())


@dataclass
class Batch:
    x: Tensor
    y_onehot: Tensor
    y_index: np.ndarray

    def __len__(self):
        return len(self.y_index)


def shuffled_batches(dataset: LabeledImageSet, batch_size: int, rng: RandomSource) -> Iterator[Batch]:
    """Seeded permutation of the set, chunked; the last short chunk is kept."""
    if batch_size < 1:
        raise InvalidRangeError(f"batch_size must be >= 1, got {batch_size}")
    order = rng.permutation(len(dataset))
    images = dataset.images.data
    for start in range(0, len(order), batch_size):
        idx = order[start : start + batch_size]
        yield Batch(
            Tensor._wrap(np.ascontiguousarray(images[idx])),
            Tensor._wrap(one_hot_batch(dataset.labels[idx])),
            dataset.labels[idx].copy(),
        )


# Canonical on-disk layout under a data directory (what fetch-data produces).
MNIST_FILES = {
    "train": ("mnist/train-images-idx3-ubyte", "mnist/train-labels-idx1-ubyte"),
    "test": ("mnist/t10k-images-idx3-ubyte", "mnist/t10k-labels-idx1-ubyte"),
}
CIFAR_DIR = "cifar-10-batches-bin"
CIFAR_FILES = {
    "train": [f"{CIFAR_DIR}/data_batch_{i}.bin" for i in range(1, 6)],
    "test": [f"{CIFAR_DIR}/test_batch.bin"],
}
CIFAR_META = f"{CIFAR_DIR}/batches.meta.txt"


def have_mnist(data_dir) -> bool:
    d = Path(data_dir)
    return all((d / p).is_file() for pair in MNIST_FILES.values() for p in pair)


def have_cifar10(data_dir) -> bool:
    d = Path(data_dir)
    files = CIFAR_FILES["train"] + CIFAR_FILES["test"] + [CIFAR_META]
    return all((d / p).is_file() for p in files)


def load_mnist(data_dir, split: str) -> LabeledImageSet:
    d = Path(data_dir)
    images, labels = MNIST_FILES[split]
    return load_idx(d / images, d / labels, split)


def load_cifar10_dir(data_dir, split: str) -> LabeledImageSet:
    d = Path(data_dir)
    return load_cifar10([d / p for p in CIFAR_FILES[split]], d / CIFAR_META, split)


def load_dataset(name: str, data_dir, split: str) -> LabeledImageSet:
    if name == "mnist":
        if not have_mnist(data_dir):
            raise DataFormatError(
                f"MNIST files not found under {data_dir}; run `desknet fetch-data`"
            )
        return load_mnist(data_dir, split)
    if name == "cifar10":
        if not have_cifar10(data_dir):
            raise DataFormatError(
                f"CIFAR-10 files not found under {data_dir}; run `desknet fetch-data`"
            )
        return load_cifar10_dir(data_dir, split)
    raise InvalidRangeError(f"unknown dataset {name!r}; choose mnist or cifar10")
