"""Synthetic dataset fixtures: learnable toy images in the real binary
formats, so every loader and training path can run without the real data.

Each class stamps a bright block at a class-specific grid position over
uniform noise, which makes the task easy enough for a few hundred steps
of training to beat chance by a wide margin.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from desknet.data import CIFAR_DIR, CIFAR_META, MNIST_FILES


def class_block(label: int, size: int, block: int = 8):
    row, col = divmod(label, 4)
    r0 = min(row * block + 2, size - block)
    c0 = min(col * block + 2, size - block)
    return r0, c0, block


def synth_images(n: int, size: int, channels: int, seed: int, balanced: bool = False):
    """(uint8 images (n, channels, size, size), int labels (n,))."""
    rng = np.random.default_rng(seed)
    if balanced:
        labels = np.tile(np.arange(10), (n + 9) // 10)[:n]
    else:
        labels = rng.integers(0, 10, n)
    images = rng.integers(0, 64, (n, channels, size, size), dtype=np.uint8)
    for i, lab in enumerate(labels):
        r0, c0, b = class_block(int(lab), size)
        images[i, :, r0 : r0 + b, c0 : c0 + b] = 220
    return images, labels.astype(np.int64)


def idx_image_bytes(images: np.ndarray) -> bytes:
    n, _, rows, cols = images.shape
    return struct.pack(">IIII", 0x00000803, n, rows, cols) + images.tobytes()


def idx_label_bytes(labels: np.ndarray) -> bytes:
    return struct.pack(">II", 0x00000801, len(labels)) + bytes(int(x) for x in labels)


def cifar_batch_bytes(images: np.ndarray, labels: np.ndarray) -> bytes:
    """3073-byte records: label byte then R, G, B planes."""
    out = bytearray()
    for img, lab in zip(images, labels):
        out.append(int(lab))
        out += img.tobytes()  # (3, 32, 32) row-major = R plane, G plane, B plane
    return bytes(out)


def write_mnist_fixture(data_dir: Path, n_train: int = 256, n_test: int = 128, seed: int = 5):
    data_dir = Path(data_dir)
    train_img, train_lab = MNIST_FILES["train"]
    test_img, test_lab = MNIST_FILES["test"]
    imgs, labs = synth_images(n_train, 28, 1, seed)
    timgs, tlabs = synth_images(n_test, 28, 1, seed + 1, balanced=True)
    for rel, payload in [
        (train_img, idx_image_bytes(imgs)),
        (train_lab, idx_label_bytes(labs)),
        (test_img, idx_image_bytes(timgs)),
        (test_lab, idx_label_bytes(tlabs)),
    ]:
        path = data_dir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)


def write_cifar_fixture(data_dir: Path, per_batch: int = 60, n_test: int = 100, seed: int = 9):
    data_dir = Path(data_dir)
    d = data_dir / CIFAR_DIR
    d.mkdir(parents=True, exist_ok=True)
    for b in range(1, 6):
        imgs, labs = synth_images(per_batch, 32, 3, seed + b)
        (d / f"data_batch_{b}.bin").write_bytes(cifar_batch_bytes(imgs, labs))
    timgs, tlabs = synth_images(n_test, 32, 3, seed + 99, balanced=True)
    (d / "test_batch.bin").write_bytes(cifar_batch_bytes(timgs, tlabs))
    names = ["airplane", "automobile", "bird", "cat", "deer",
             "dog", "frog", "horse", "ship", "truck"]
    (data_dir / CIFAR_META).write_text("\n".join(names) + "\n")
