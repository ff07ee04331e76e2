"""Dataset fetcher: downloads the canonical archives, verifies checksums,
and unpacks them into the layout ``data.py`` expects.

Datasets are never vendored with the package. Every downloaded archive is
checked against the MD5 manifest below before it is unpacked; a mismatch
aborts with ChecksumError. ``--base-url`` points at an alternative mirror
that serves the same filenames.
"""

from __future__ import annotations

import gzip
import hashlib
import tarfile
import urllib.error
import urllib.request
from pathlib import Path

from .data import CIFAR_DIR
from .errors import ChecksumError, DataFormatError

MNIST_MIRRORS = [
    "https://ossci-datasets.s3.amazonaws.com/mnist",
    "https://storage.googleapis.com/cvdf-datasets/mnist",
]
CIFAR_MIRRORS = ["https://www.cs.toronto.edu/~kriz"]

# (archive name, md5 of the archive, unpacked target relative to data_dir)
MNIST_ARCHIVES = [
    ("train-images-idx3-ubyte.gz", "f68b3c2dcbeaaa9fbdd348bbdeb94873", "mnist/train-images-idx3-ubyte"),
    ("train-labels-idx1-ubyte.gz", "d53e105ee54ea40749a09fcbcd1e9432", "mnist/train-labels-idx1-ubyte"),
    ("t10k-images-idx3-ubyte.gz", "9fb629c4189551a2d022fa330f9573f3", "mnist/t10k-images-idx3-ubyte"),
    ("t10k-labels-idx1-ubyte.gz", "ec29112dd5afa0611ce80d1b7f02629c", "mnist/t10k-labels-idx1-ubyte"),
]
CIFAR_ARCHIVE = ("cifar-10-binary.tar.gz", "c32a1d4ab5d03f1284b67883e8d87530")

MANIFEST_NAME = "checksums.txt"


def checksum_manifest() -> str:
    """The manifest text: 'md5  <hash>  <filename>' per archive."""
    lines = [f"md5  {md5}  {name}" for name, md5, _ in MNIST_ARCHIVES]
    lines.append(f"md5  {CIFAR_ARCHIVE[1]}  {CIFAR_ARCHIVE[0]}")
    return "\n".join(lines) + "\n"


def parse_manifest(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        algo, digest, name = line.split()
        if algo != "md5":
            raise DataFormatError(f"unsupported checksum algorithm {algo!r}")
        out[name] = digest
    return out


def md5_of(path) -> str:
    h = hashlib.md5()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def verify_checksum(path, expect_md5: str):
    got = md5_of(path)
    if got != expect_md5:
        raise ChecksumError(f"{path}: md5 {got}, manifest says {expect_md5}")


def _download(name: str, mirrors: list[str], dest: Path, log=print) -> Path:
    dest.parent.mkdir(parents=True, exist_ok=True)
    last_err = None
    for base in mirrors:
        url = f"{base.rstrip('/')}/{name}"
        try:
            log(f"  downloading {url}")
            with urllib.request.urlopen(url, timeout=60) as resp, open(dest, "wb") as out:
                while True:
                    chunk = resp.read(1 << 20)
                    if not chunk:
                        break
                    out.write(chunk)
            return dest
        except (urllib.error.URLError, OSError) as e:
            last_err = e
            log(f"  mirror failed: {e}")
    raise ChecksumError(f"could not download {name} from any mirror: {last_err}")


def fetch_mnist(data_dir, base_url: str | None = None, log=print):
    """Download, verify, and unpack the four MNIST IDX files."""
    data_dir = Path(data_dir)
    mirrors = [base_url] if base_url else MNIST_MIRRORS
    for name, md5, target in MNIST_ARCHIVES:
        out = data_dir / target
        if out.is_file():
            log(f"  {target} already present")
            continue
        archive = _download(name, mirrors, data_dir / "archives" / name, log)
        verify_checksum(archive, md5)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(gzip.decompress(archive.read_bytes()))
        log(f"  unpacked {target}")


def fetch_cifar10(data_dir, base_url: str | None = None, log=print):
    """Download, verify, and unpack the CIFAR-10 binary batches."""
    data_dir = Path(data_dir)
    name, md5 = CIFAR_ARCHIVE
    target_dir = data_dir / CIFAR_DIR
    wanted = [f"data_batch_{i}.bin" for i in range(1, 6)] + ["test_batch.bin", "batches.meta.txt"]
    if all((target_dir / w).is_file() for w in wanted):
        log(f"  {CIFAR_DIR} already present")
        return
    mirrors = [base_url] if base_url else CIFAR_MIRRORS
    archive = _download(name, mirrors, data_dir / "archives" / name, log)
    verify_checksum(archive, md5)
    target_dir.mkdir(parents=True, exist_ok=True)
    with tarfile.open(archive, "r:gz") as tar:
        for member in tar.getmembers():
            base = Path(member.name).name
            if member.isfile() and base in wanted:
                with tar.extractfile(member) as f:
                    (target_dir / base).write_bytes(f.read())
                log(f"  unpacked {CIFAR_DIR}/{base}")


def fetch(data_dir, datasets=("mnist", "cifar10"), base_url: str | None = None, log=print):
    """Fetch the requested datasets and drop the checksum manifest."""
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    (data_dir / MANIFEST_NAME).write_text(checksum_manifest())
    if "mnist" in datasets:
        log("mnist:")
        fetch_mnist(data_dir, base_url, log)
    if "cifar10" in datasets:
        log("cifar10:")
        fetch_cifar10(data_dir, base_url, log)
