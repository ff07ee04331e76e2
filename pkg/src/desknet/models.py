"""The three network architectures the experiments use.

All classifiers end in a 10-way dense layer feeding softmax cross-entropy.
Layer parameters are drawn from the given RandomSource in declaration
order, so a (builder, seed) pair pins the initial weights exactly.
"""

from __future__ import annotations

from .layers import Conv2D, Dense, Dropout, Flatten, MaxPool2D, ReLU
from .network import Network
from .rng import RandomSource

N_CLASSES = 10

MNIST_INPUT = (1, 28, 28)
CIFAR_INPUT = (3, 32, 32)


def _check_head(net: Network) -> Network:
    assert net.output_shape == (N_CLASSES,), net.output_shape
    return net


def build_mnist_mlp(rng: RandomSource, width: int = 784) -> Network:
    """Flatten -> dense(784->width) -> ReLU -> dense(width->10)."""
    layers = [
        Flatten(),
        Dense(784, width, rng, name="fc1"),
        ReLU(),
        Dense(width, N_CLASSES, rng, name="fc2"),
    ]
    return _check_head(Network(layers, MNIST_INPUT))


def build_mnist_cnn(rng: RandomSource, width: int = 784) -> Network:
    """conv 16@5x5 (pad 2) -> ReLU -> pool 2x2 -> dense(width) -> dense(10)."""
    layers = [
        Conv2D(16, 1, 5, stride=1, pad=2, rng=rng, name="conv1"),
        ReLU(),
        MaxPool2D(2, 2),
        Flatten(),
        Dense(16 * 14 * 14, width, rng, name="fc1"),
        ReLU(),
        Dense(width, N_CLASSES, rng, name="fc2"),
    ]
    return _check_head(Network(layers, MNIST_INPUT))


def build_cifar_cnn(
    rng: RandomSource,
    dropout_rate: float = 0.0,
    dropout_after_pool: bool = False,
) -> Network:
    """Two conv blocks (16@5x5, 20@5x5, each pooled 2x2) into dense(10).

    With dropout_rate > 0, dropout sits after the second conv's ReLU and
    before its pool; flip dropout_after_pool to place it after instead.
    """
    layers = [
        Conv2D(16, 3, 5, stride=1, pad=2, rng=rng, name="conv1"),
        ReLU(),
        MaxPool2D(2, 2),
        Conv2D(20, 16, 5, stride=1, pad=2, rng=rng, name="conv2"),
        ReLU(),
    ]
    if dropout_rate > 0 and not dropout_after_pool:
        layers.append(Dropout(dropout_rate))
    layers.append(MaxPool2D(2, 2))
    if dropout_rate > 0 and dropout_after_pool:
        layers.append(Dropout(dropout_rate))
    layers += [
        Flatten(),
        Dense(20 * 8 * 8, N_CLASSES, rng, name="fc1"),
    ]
    return _check_head(Network(layers, CIFAR_INPUT))


ARCHITECTURES = {
    "mlp": build_mnist_mlp,
    "mnist_cnn": build_mnist_cnn,
    "cifar_cnn": build_cifar_cnn,
}


def build_model(arch: str, rng: RandomSource, width: int = 784, dropout_rate: float = 0.0,
                dropout_after_pool: bool = False) -> Network:
    if arch == "mlp":
        return build_mnist_mlp(rng, width)
    if arch == "mnist_cnn":
        return build_mnist_cnn(rng, width)
    if arch == "cifar_cnn":
        return build_cifar_cnn(rng, dropout_rate, dropout_after_pool)
    raise ValueError(f"unknown architecture {arch!r}; choose from {sorted(ARCHITECTURES)}")
