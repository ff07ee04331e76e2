import os
from pathlib import Path

import pytest

from desknet.data import have_cifar10, have_mnist

from synth import write_cifar_fixture, write_mnist_fixture


def real_data_dir() -> Path:
    return Path(os.environ.get("DESKNET_DATA_DIR", Path(__file__).resolve().parent.parent / "data"))


def require_mnist():
    d = real_data_dir()
    if not have_mnist(d):
        pytest.skip(f"real MNIST not found under {d}; run `desknet fetch-data` on a networked machine")
    return d


def require_cifar():
    d = real_data_dir()
    if not have_cifar10(d):
        pytest.skip(f"real CIFAR-10 not found under {d}; run `desknet fetch-data` on a networked machine")
    return d


@pytest.fixture(scope="session")
def fixture_data_dir(tmp_path_factory) -> Path:
    """Synthetic MNIST- and CIFAR-format files in the canonical layout."""
    d = tmp_path_factory.mktemp("synth-data")
    write_mnist_fixture(d)
    write_cifar_fixture(d)
    return d
