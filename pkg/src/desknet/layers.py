"""Network layers with explicit forward/backward passes.

Each ``forward`` returns ``(y, cache)`` where the cache holds exactly what
the matching ``backward`` needs (inputs, masks, argmax indices). A cache
may be consumed by at most one backward pass; reuse raises StaleCacheError.

Parameters are the one mutable surface: ``backward`` accumulates into
``Parameter.grad`` and optimizers update ``Parameter.value`` in place.
Weight init is Glorot-uniform, u(-sqrt(6/(fan_in+fan_out)), +sqrt(...)),
biases zero; every draw comes from the caller's RandomSource so builds are
reproducible by seed.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import (
    InvalidGeometryError,
    InvalidRangeError,
    ShapeMismatchError,
    StaleCacheError,
)
from .rng import RandomSource


class Parameter:
    """A trainable buffer and its gradient accumulator."""

    __slots__ = ("name", "value", "grad")

    def __init__(self, name: str, value: np.ndarray):
        self.name = name
        self.value = np.ascontiguousarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)

    def zero_grad(self):
        self.grad[...] = 0.0

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.value.shape})"


class LayerCache:
    """One forward pass's saved state; single-use."""

    __slots__ = ("data", "consumed")

    def __init__(self, **data):
        self.data = data
        self.consumed = False

    def take(self) -> dict:
        if self.consumed:
            raise StaleCacheError("forward cache already consumed by a backward pass")
        self.consumed = True
        return self.data


def glorot_uniform(rng: RandomSource, shape, fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(int(np.prod(shape)), -limit, limit).reshape(shape)


class Layer:
    kind = "?"

    def params(self) -> list[Parameter]:
        return []

    def out_shape(self, in_shape: tuple[int, ...]) -> tuple[int, ...]:
        """Per-sample output shape given per-sample input shape."""
        return in_shape

    def spec(self) -> dict:
        return {"kind": self.kind}

    def forward(self, x: np.ndarray, rng: RandomSource | None = None, train: bool = False):
        raise NotImplementedError

    def backward(self, cache: LayerCache, dout: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class Dense(Layer):
    """y = x @ W + b over a batch of row vectors."""

    kind = "dense"

    def __init__(self, n_in: int, n_out: int, rng: RandomSource | None = None, name: str = "dense"):
        if n_in < 1 or n_out < 1:
            raise InvalidRangeError(f"dense dims must be >= 1, got {n_in}x{n_out}")
        self.name = name
        self.n_in, self.n_out = int(n_in), int(n_out)
        w = (
            glorot_uniform(rng, (n_in, n_out), n_in, n_out)
            if rng is not None
            else np.zeros((n_in, n_out))
        )
        self.w = Parameter(f"{name}.w", w)
        self.b = Parameter(f"{name}.b", np.zeros(n_out))

    def params(self):
        return [self.w, self.b]

    def out_shape(self, in_shape):
        if len(in_shape) != 1 or in_shape[0] != self.n_in:
            raise ShapeMismatchError(f"dense({self.n_in}->{self.n_out}) got input {in_shape}")
        return (self.n_out,)

    def spec(self):
        return {"kind": self.kind, "in": self.n_in, "out": self.n_out, "name": self.name}

    def forward(self, x, rng=None, train=False):
        if x.ndim != 2 or x.shape[1] != self.n_in:
            raise ShapeMismatchError(
                f"dense({self.n_in}->{self.n_out}) got batch shape {x.shape}"
            )
        y = x @ self.w.value + self.b.value
        return y, LayerCache(x=x)

    def backward(self, cache, dout):
        x = cache.take()["x"]
        self.w.grad += x.T @ dout
        self.b.grad += dout.sum(axis=0)
        return dout @ self.w.value.T


class ReLU(Layer):
    kind = "relu"

    def forward(self, x, rng=None, train=False):
        mask = x > 0
        return np.where(mask, x, 0.0), LayerCache(mask=mask)

    def backward(self, cache, dout):
        return dout * cache.take()["mask"]


class Flatten(Layer):
    """Collapse per-sample dims to one row vector (row-major order)."""

    kind = "flatten"

    def out_shape(self, in_shape):
        return (int(np.prod(in_shape)),)

    def forward(self, x, rng=None, train=False):
        return x.reshape(x.shape[0], -1), LayerCache(shape=x.shape)

    def backward(self, cache, dout):
        return dout.reshape(cache.take()["shape"])


class Conv2D(Layer):
    """Valid cross-correlation with zero padding and per-filter bias."""

    kind = "conv2d"

    def __init__(
        self,
        n_filters: int,
        n_channels: int,
        kernel: int,
        stride: int = 1,
        pad: int = 0,
        rng: RandomSource | None = None,
        name: str = "conv",
    ):
        if kernel < 1:
            raise InvalidRangeError(f"kernel must be >= 1, got {kernel}")
        if n_filters < 1 or n_channels < 1 or stride < 1 or pad < 0:
            raise InvalidRangeError("conv2d hyperparameters out of range")
        self.name = name
        self.n_filters, self.n_channels = int(n_filters), int(n_channels)
        self.kernel, self.stride, self.pad = int(kernel), int(stride), int(pad)
        fan_in = n_channels * kernel * kernel
        fan_out = n_filters * kernel * kernel
        w = (
            glorot_uniform(rng, (n_filters, n_channels, kernel, kernel), fan_in, fan_out)
            if rng is not None
            else np.zeros((n_filters, n_channels, kernel, kernel))
        )
        self.w = Parameter(f"{name}.w", w)
        self.b = Parameter(f"{name}.b", np.zeros(n_filters))

    def params(self):
        return [self.w, self.b]

    def _geometry(self, h, w):
        num_h = h + 2 * self.pad - self.kernel
        num_w = w + 2 * self.pad - self.kernel
        if num_h < 0 or num_w < 0 or num_h % self.stride or num_w % self.stride:
            raise InvalidGeometryError(
                f"conv2d kernel={self.kernel} stride={self.stride} pad={self.pad} "
                f"does not tile a {h}x{w} input"
            )
        return num_h // self.stride + 1, num_w // self.stride + 1

    def out_shape(self, in_shape):
        if len(in_shape) != 3 or in_shape[0] != self.n_channels:
            raise ShapeMismatchError(
                f"conv2d expects ({self.n_channels},H,W) input, got {in_shape}"
            )
        oh, ow = self._geometry(in_shape[1], in_shape[2])
        return (self.n_filters, oh, ow)

    def spec(self):
        return {
            "kind": self.kind,
            "filters": self.n_filters,
            "channels": self.n_channels,
            "kernel": self.kernel,
            "stride": self.stride,
            "pad": self.pad,
            "name": self.name,
        }

    def forward(self, x, rng=None, train=False):
        if x.ndim != 4 or x.shape[1] != self.n_channels:
            raise ShapeMismatchError(f"conv2d got batch shape {x.shape}")
        self._geometry(x.shape[2], x.shape[3])
        x = np.ascontiguousarray(x)
        y = kernels.conv2d_forward(x, self.w.value, self.b.value, self.stride, self.pad)
        return y, LayerCache(x=x)

    def backward(self, cache, dout):
        x = cache.take()["x"]
        dx, dw, db = kernels.conv2d_backward(
            x, self.w.value, self.stride, self.pad, np.ascontiguousarray(dout)
        )
        self.w.grad += dw
        self.b.grad += db
        return dx


class MaxPool2D(Layer):
    """Window maximum; geometry must tile the plane exactly."""

    kind = "maxpool"

    def __init__(self, window: int = 2, stride: int = 2):
        if window < 1 or stride < 1:
            raise InvalidRangeError("maxpool window/stride must be >= 1")
        self.window, self.stride = int(window), int(stride)

    def _geometry(self, h, w):
        num_h = h - self.window
        num_w = w - self.window
        if num_h < 0 or num_w < 0 or num_h % self.stride or num_w % self.stride:
            raise InvalidGeometryError(
                f"maxpool window={self.window} stride={self.stride} "
                f"does not tile a {h}x{w} input"
            )
        return num_h // self.stride + 1, num_w // self.stride + 1

    def out_shape(self, in_shape):
        if len(in_shape) != 3:
            raise ShapeMismatchError(f"maxpool expects (C,H,W) input, got {in_shape}")
        oh, ow = self._geometry(in_shape[1], in_shape[2])
        return (in_shape[0], oh, ow)

    def spec(self):
        return {"kind": self.kind, "window": self.window, "stride": self.stride}

    def forward(self, x, rng=None, train=False):
        self._geometry(x.shape[2], x.shape[3])
        x = np.ascontiguousarray(x)
        y, argmax = kernels.maxpool_forward(x, self.window, self.stride)
        return y, LayerCache(argmax=argmax, h=x.shape[2], w=x.shape[3])

    def backward(self, cache, dout):
        d = cache.take()
        return kernels.maxpool_backward(d["argmax"], d["h"], d["w"], np.ascontiguousarray(dout))


class Dropout(Layer):
    """Inverted dropout: train-time zeroing with 1/(1-rate) survivor scale.

    Eval mode is the identity, so no correction is needed at test time.
    The mask consumes one uniform draw per element, always in the same
    order, which keeps training runs reproducible by seed.
    """

    kind = "dropout"

    def __init__(self, rate: float):
        rate = float(rate)
        if not 0.0 <= rate < 1.0:
            raise InvalidRangeError(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate

    def spec(self):
        return {"kind": self.kind, "rate": self.rate}

    def forward(self, x, rng=None, train=False):
        if not train or self.rate == 0.0:
            return x, LayerCache(mask=None)
        if rng is None:
            raise InvalidRangeError("train-mode dropout needs a RandomSource")
        u = rng.uniform(x.size).reshape(x.shape)
        mask = (u >= self.rate) / (1.0 - self.rate)
        return x * mask, LayerCache(mask=mask)

    def backward(self, cache, dout):
        mask = cache.take()["mask"]
        return dout if mask is None else dout * mask


LAYER_KINDS = {
    "dense": Dense,
    "relu": ReLU,
    "flatten": Flatten,
    "conv2d": Conv2D,
    "maxpool": MaxPool2D,
    "dropout": Dropout,
}


def layer_from_spec(spec: dict) -> Layer:
    """Rebuild a layer (zeroed parameters) from its spec() dict."""
    kind = spec.get("kind")
    if kind == "dense":
        return Dense(spec["in"], spec["out"], name=spec.get("name", "dense"))
    if kind == "relu":
        return ReLU()
    if kind == "flatten":
        return Flatten()
    if kind == "conv2d":
        return Conv2D(
            spec["filters"],
            spec["channels"],
            spec["kernel"],
            spec["stride"],
            spec["pad"],
            name=spec.get("name", "conv"),
        )
    if kind == "maxpool":
        return MaxPool2D(spec["window"], spec["stride"])
    if kind == "dropout":
        return Dropout(spec["rate"])
    raise InvalidRangeError(f"unknown layer kind {kind!r}")
