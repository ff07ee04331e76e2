"""Composing layers into a trainable network."""

from __future__ import annotations

import numpy as np

from .errors import NonFiniteError, ShapeMismatchError, StaleCacheError
from .layers import Layer, LayerCache, layer_from_spec
from .rng import RandomSource
from .tensor import Tensor, validate_shape


class ForwardCache:
    """Per-layer caches from one forward pass; single-use as a unit."""

    __slots__ = ("entries", "consumed")

    def __init__(self, entries: list[LayerCache]):
        self.entries = entries
        self.consumed = False


class Network:
    """An ordered layer pipeline with shape-checked composition.

    ``mode`` is 'train' or 'eval'; dropout only fires in train mode. The
    network plus its caches are single-owner during a training step;
    eval-mode forward on a frozen network is safe to share.
    """

    def __init__(self, layers: list[Layer], input_shape):
        self.layers = list(layers)
        self.input_shape = validate_shape(input_shape)
        shape = self.input_shape
        for layer in self.layers:
            shape = layer.out_shape(shape)  # raises on incompatible adjacency
        self.output_shape = shape
        self.mode = "train"
        names = [p.name for layer in self.layers for p in layer.params()]
        if len(names) != len(set(names)):
            raise ShapeMismatchError(f"duplicate parameter names: {names}")

    @property
    def params(self):
        return [p for layer in self.layers for p in layer.params()]

    def train(self):
        self.mode = "train"
        return self

    def eval(self):
        self.mode = "eval"
        return self

    def zero_grads(self):
        for p in self.params:
            p.zero_grad()

    def spec(self) -> dict:
        return {
            "input_shape": list(self.input_shape),
            "layers": [layer.spec() for layer in self.layers],
        }

    def forward(self, x, rng: RandomSource | None = None):
        """Run the batch through every layer; returns (logits, caches)."""
        arr = x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)
        if arr.shape[1:] != self.input_shape:
            raise ShapeMismatchError(
                f"expected batch of {self.input_shape}, got {arr.shape}"
            )
        train = self.mode == "train"
        caches = []
        for layer in self.layers:
            arr, cache = layer.forward(arr, rng=rng, train=train)
            caches.append(cache)
        if not np.isfinite(arr).all():
            raise NonFiniteError("network forward produced non-finite logits")
        return arr, ForwardCache(caches)

    def backward(self, caches: ForwardCache, dlogits: np.ndarray) -> None:
        """Accumulate parameter gradients from one forward's caches."""
        if caches.consumed:
            raise StaleCacheError("forward cache already consumed")
        caches.consumed = True
        d = np.asarray(dlogits, dtype=np.float64)
        for layer, cache in zip(reversed(self.layers), reversed(caches.entries)):
            d = layer.backward(cache, d)


def network_from_spec(spec: dict) -> Network:
    """Rebuild a zero-parameter network from Network.spec() output."""
    layers = [layer_from_spec(s) for s in spec["layers"]]
    net = Network(layers, tuple(spec["input_shape"]))
    return net
