"""Numpy implementation of the hot kernels.

Convolution is im2col + one BLAS matmul per direction; pooling gathers the
window lanes and reduces. This is the fallback backend when the compiled
extension is unavailable, and the reference point for the benchmark.

All functions assume float64 C-contiguous inputs with pre-validated
geometry (the layer classes own validation).
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def _im2col(xp: np.ndarray, k: int, stride: int, out_h: int, out_w: int) -> np.ndarray:
    """(N, C, Hp, Wp) padded input -> (N, C*k*k, out_h*out_w) patch matrix."""
    n, c = xp.shape[:2]
    cols = np.empty((n, c, k, k, out_h, out_w), dtype=np.float64)
    for i in range(k):
        for j in range(k):
            cols[:, :, i, j] = xp[:, :, i : i + stride * out_h : stride, j : j + stride * out_w : stride]
    return cols.reshape(n, c * k * k, out_h * out_w)


def _col2im(cols: np.ndarray, n, c, hp, wp, k, stride, out_h, out_w) -> np.ndarray:
    """Scatter-add the patch matrix back onto a zeroed padded image."""
    xp = np.zeros((n, c, hp, wp), dtype=np.float64)
    cols = cols.reshape(n, c, k, k, out_h, out_w)
    for i in range(k):
        for j in range(k):
            xp[:, :, i : i + stride * out_h : stride, j : j + stride * out_w : stride] += cols[:, :, i, j]
    return xp


def _out_size(h, w, k, stride, pad):
    return (h + 2 * pad - k) // stride + 1, (w + 2 * pad - k) // stride + 1


def conv2d_forward(x, w, b, stride, pad):
    """Cross-correlation of (N,C,H,W) with (F,C,k,k) plus per-filter bias."""
    n, c, h, wd = x.shape
    f, _, k, _ = w.shape
    out_h, out_w = _out_size(h, wd, k, stride, pad)
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x
    cols = _im2col(xp, k, stride, out_h, out_w)
    out = np.matmul(w.reshape(f, -1)[None, :, :], cols)
    out += b[None, :, None]
    return np.ascontiguousarray(out.reshape(n, f, out_h, out_w))


def conv2d_backward(x, w, stride, pad, dout):
    """Gradients of conv2d_forward w.r.t. input, weights, and bias."""
    n, c, h, wd = x.shape
    f, _, k, _ = w.shape
    out_h, out_w = dout.shape[2], dout.shape[3]
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x
    cols = _im2col(xp, k, stride, out_h, out_w)
    dmat = dout.reshape(n, f, out_h * out_w)

    db = dout.sum(axis=(0, 2, 3))
    dw = np.matmul(dmat, cols.transpose(0, 2, 1)).sum(axis=0).reshape(f, c, k, k)
    dcols = np.matmul(w.reshape(f, -1).T[None, :, :], dmat)
    dxp = _col2im(dcols, n, c, h + 2 * pad, wd + 2 * pad, k, stride, out_h, out_w)
    dx = dxp[:, :, pad : pad + h, pad : pad + wd] if pad else dxp
    return np.ascontiguousarray(dx), dw, db


def maxpool_forward(x, window, stride):
    """Per-window maximum of (N,C,H,W); returns output and flat argmax.

    argmax[n,c,oh,ow] is the row-major index into the H*W plane of the
    winning element; ties go to the first element in window scan order.
    """
    n, c, h, w = x.shape
    out_h = (h - window) // stride + 1
    out_w = (w - window) // stride + 1
    lanes = np.empty((n, c, out_h, out_w, window * window), dtype=np.float64)
    for i in range(window):
        for j in range(window):
            lanes[:, :, :, :, i * window + j] = x[
                :, :, i : i + stride * out_h : stride, j : j + stride * out_w : stride
            ]
    local = lanes.argmax(axis=-1)
    out = np.take_along_axis(lanes, local[..., None], axis=-1)[..., 0]

    oh_idx = np.arange(out_h)[None, None, :, None]
    ow_idx = np.arange(out_w)[None, None, None, :]
    rows = oh_idx * stride + local // window
    cols = ow_idx * stride + local % window
    argmax = (rows * w + cols).astype(np.int64)
    return np.ascontiguousarray(out), np.ascontiguousarray(argmax)


def maxpool_backward(argmax, h, w, dout):
    """Route each upstream element to its argmax position (accumulating,
    so overlapping windows stay correct)."""
    n, c = dout.shape[:2]
    dx = np.zeros((n * c, h * w), dtype=np.float64)
    flat = argmax.reshape(n * c, -1)
    rows = np.arange(n * c)[:, None]
    np.add.at(dx, (rows, flat), dout.reshape(n * c, -1))
    return dx.reshape(n, c, h, w)
