import numpy as np
import pytest

from desknet import checkpoint
from desknet.errors import CheckpointError
from desknet.models import build_cifar_cnn, build_mnist_cnn, build_mnist_mlp
from desknet.rng import RandomSource


@pytest.mark.parametrize("builder", [
    lambda r: build_mnist_mlp(r, width=32),
    lambda r: build_mnist_cnn(r, width=16),
    lambda r: build_cifar_cnn(r, dropout_rate=0.5),
])
def test_round_trip_bit_exact(tmp_path, builder):
    net = builder(RandomSource(7))
    path = tmp_path / "net.ckpt"
    checkpoint.save(net, path, seed=7, meta={"note": "round-trip"})
    clone, header = checkpoint.load(path)
    assert header["seed"] == 7
    assert header["meta"]["note"] == "round-trip"
    assert clone.spec() == net.spec()
    for a, b in zip(net.params, clone.params):
        assert a.name == b.name
        assert np.array_equal(a.value, b.value)  # bitwise


def test_save_load_save_identical_bytes(tmp_path):
    net = build_mnist_cnn(RandomSource(3), width=8)
    p1, p2 = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    checkpoint.save(net, p1, seed=3)
    clone, _ = checkpoint.load(p1)
    checkpoint.save(clone, p2, seed=3)
    assert p1.read_bytes() == p2.read_bytes()


def test_not_a_checkpoint(tmp_path):
    p = tmp_path / "junk"
    p.write_bytes(b"hello world\n")
    with pytest.raises(CheckpointError):
        checkpoint.load(p)


def test_truncated_payload(tmp_path):
    net = build_mnist_mlp(RandomSource(1), width=4)
    p = tmp_path / "net.ckpt"
    checkpoint.save(net, p)
    blob = p.read_bytes()
    p.write_bytes(blob[:-16])
    with pytest.raises(CheckpointError):
        checkpoint.load(p)


def test_header_payload_mismatch(tmp_path):
    net = build_mnist_mlp(RandomSource(1), width=4)
    p = tmp_path / "net.ckpt"
    checkpoint.save(net, p)
    blob = p.read_bytes() + b"\x00" * 8
    p.write_bytes(blob)
    with pytest.raises(CheckpointError):
        checkpoint.load(p)


def test_little_endian_layout(tmp_path):
    """The payload is raw little-endian float64 in declaration order."""
    net = build_mnist_mlp(RandomSource(1), width=4)
    p = tmp_path / "net.ckpt"
    checkpoint.save(net, p)
    blob = p.read_bytes()
    marker = blob.index(b"params ")
    payload = blob[blob.index(b"\n", marker) + 1 :]
    first = net.params[0].value.reshape(-1)
    got = np.frombuffer(payload[: first.size * 8], dtype="<f8")
    assert np.array_equal(got, first)
