"""Dense tensor values and the handful of array operations the layers need.

A Tensor is a rank-1..4 array of finite float64 values in row-major order
(last dimension fastest). Tensors returned by the functions here are
treated as immutable; mutable training state lives in ``layers.Parameter``
buffers instead.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    InvalidRangeError,
    InvalidShapeError,
    NonFiniteError,
    ShapeMismatchError,
)
from .rng import RandomSource

MAX_RANK = 4


def validate_shape(dims) -> tuple[int, ...]:
    """Normalize ``dims`` to a tuple, enforcing rank 1..4 and extents >= 1."""
    try:
        shape = tuple(int(d) for d in dims)
    except TypeError:
        raise InvalidShapeError(f"shape must be a sequence of ints, got {dims!r}") from None
    if not 1 <= len(shape) <= MAX_RANK:
        raise InvalidShapeError(f"rank must be 1..{MAX_RANK}, got {len(shape)}")
    if any(d < 1 for d in shape):
        raise InvalidShapeError(f"every extent must be >= 1, got {shape}")
    return shape


def element_count(shape) -> int:
    return int(np.prod(validate_shape(shape)))


class Tensor:
    """Immutable dense float64 array with validated shape and finite values."""

    __slots__ = ("data",)

    def __init__(self, values, shape=None):
        arr = np.array(values, dtype=np.float64, order="C", copy=True)
        if shape is not None:
            want = validate_shape(shape)
            if arr.size != element_count(want):
                raise ShapeMismatchError(
                    f"{arr.size} values cannot fill shape {want}"
                )
            arr = arr.reshape(want)
        validate_shape(arr.shape)
        if not np.isfinite(arr).all():
            raise NonFiniteError("tensor values must be finite")
        self.data = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Tensor":
        """Adopt an array the caller promises is float64/C-order/finite-checked."""
        t = object.__new__(cls)
        t.data = arr
        return t

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def tolist(self):
        return self.data.tolist()

    def __repr__(self):
        return f"Tensor(shape={self.shape})"

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return None  # unhashable, like list


def as_array(t) -> np.ndarray:
    """Accept a Tensor or array-like; return float64 ndarray."""
    if isinstance(t, Tensor):
        return t.data
    return np.asarray(t, dtype=np.float64)


def _finish(arr: np.ndarray) -> Tensor:
    if not np.isfinite(arr).all():
        raise NonFiniteError("operation produced non-finite values")
    return Tensor._wrap(np.ascontiguousarray(arr, dtype=np.float64))


def filled(shape, value: float) -> Tensor:
    """Tensor of ``shape`` with every element equal to ``value``."""
    shape = validate_shape(shape)
    return _finish(np.full(shape, float(value), dtype=np.float64))


def zeros(shape) -> Tensor:
    return filled(shape, 0.0)


def reshape(t: Tensor, new_shape) -> Tensor:
    """Same values, same row-major order, new shape."""
    new_shape = validate_shape(new_shape)
    arr = as_array(t)
    if arr.size != element_count(new_shape):
        raise ShapeMismatchError(
            f"cannot reshape {arr.size} elements into {new_shape}"
        )
    return Tensor._wrap(arr.reshape(new_shape).copy())


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """2-D matrix product: (m,k) @ (k,n) -> (m,n)."""
    am, bm = as_array(a), as_array(b)
    if am.ndim != 2 or bm.ndim != 2:
        raise ShapeMismatchError(
            f"matmul needs 2-D operands, got {am.shape} and {bm.shape}"
        )
    if am.shape[1] != bm.shape[0]:
        raise ShapeMismatchError(
            f"inner dimensions differ: {am.shape} @ {bm.shape}"
        )
    return _finish(am @ bm)


def _ew(op, a, b):
    am = as_array(a)
    if isinstance(b, Tensor) or isinstance(b, np.ndarray):
        bm = as_array(b)
        if am.shape != bm.shape:
            raise ShapeMismatchError(
                f"elementwise shapes differ: {am.shape} vs {bm.shape}"
            )
    else:
        bm = float(b)
    with np.errstate(over="ignore"):
        return _finish(op(am, bm))


def add(a, b) -> Tensor:
    """Elementwise a + b; b may be a scalar."""
    return _ew(np.add, a, b)


def sub(a, b) -> Tensor:
    """Elementwise a - b; b may be a scalar."""
    return _ew(np.subtract, a, b)


def mul(a, b) -> Tensor:
    """Elementwise a * b; b may be a scalar."""
    return _ew(np.multiply, a, b)


def scale(a, c: float) -> Tensor:
    """a * c for scalar c."""
    return _ew(np.multiply, a, float(c))


def rand_uniform(rng: RandomSource, shape, lo: float, hi: float) -> Tensor:
    """Tensor of ``shape`` with i.i.d. uniform values in [lo, hi)."""
    shape = validate_shape(shape)
    if not lo < hi:
        raise InvalidRangeError(f"rand_uniform requires lo < hi, got [{lo}, {hi})")
    vals = rng.uniform(element_count(shape), lo, hi)
    return Tensor._wrap(vals.reshape(shape))
