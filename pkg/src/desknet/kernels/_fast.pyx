# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: direct convolution and pooling.

Same contracts as desknet.kernels.pure. Loops keep the innermost index on
a contiguous output/input row so the C compiler can vectorize; stride 1
(the only stride the built-in nets use) takes the fast path, other strides
a generic one. Single-threaded, so results are deterministic.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "compiled"


cdef inline Py_ssize_t _imax(Py_ssize_t a, Py_ssize_t b) nogil:
    return a if a > b else b


cdef inline Py_ssize_t _imin(Py_ssize_t a, Py_ssize_t b) nogil:
    return a if a < b else b


def conv2d_forward(double[:, :, :, ::1] x, double[:, :, :, ::1] w,
                   double[::1] b, int stride, int pad):
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], h = x.shape[2], wd = x.shape[3]
    cdef Py_ssize_t f = w.shape[0], k = w.shape[2]
    cdef Py_ssize_t out_h = (h + 2 * pad - k) // stride + 1
    cdef Py_ssize_t out_w = (wd + 2 * pad - k) // stride + 1
    out_arr = np.empty((n, f, out_h, out_w), dtype=np.float64)
    cdef double[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t i, j, ci, ki, kj, oh, ow, ih, iw, ow_lo, ow_hi
    cdef double wv, bias

    with nogil:
        for i in range(n):
            for j in range(f):
                bias = b[j]
                for oh in range(out_h):
                    for ow in range(out_w):
                        out[i, j, oh, ow] = bias
                for ci in range(c):
                    for ki in range(k):
                        for kj in range(k):
                            wv = w[j, ci, ki, kj]
                            for oh in range(out_h):
                                ih = oh * stride + ki - pad
                                if ih < 0 or ih >= h:
                                    continue
                                if stride == 1:
                                    ow_lo = _imax(0, pad - kj)
                                    ow_hi = _imin(out_w, wd + pad - kj)
                                    for ow in range(ow_lo, ow_hi):
                                        out[i, j, oh, ow] += wv * x[i, ci, ih, ow + kj - pad]
                                else:
                                    for ow in range(out_w):
                                        iw = ow * stride + kj - pad
                                        if 0 <= iw < wd:
                                            out[i, j, oh, ow] += wv * x[i, ci, ih, iw]
    return out_arr


def conv2d_backward(double[:, :, :, ::1] x, double[:, :, :, ::1] w,
                    int stride, int pad, double[:, :, :, ::1] dout):
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], h = x.shape[2], wd = x.shape[3]
    cdef Py_ssize_t f = w.shape[0], k = w.shape[2]
    cdef Py_ssize_t out_h = dout.shape[2], out_w = dout.shape[3]
    dx_arr = np.zeros((n, c, h, wd), dtype=np.float64)
    dw_arr = np.zeros((f, c, k, k), dtype=np.float64)
    db_arr = np.zeros(f, dtype=np.float64)
    cdef double[:, :, :, ::1] dx = dx_arr
    cdef double[:, :, :, ::1] dw = dw_arr
    cdef double[::1] db = db_arr
    cdef Py_ssize_t i, j, ci, ki, kj, oh, ow, ih, iw, ow_lo, ow_hi
    cdef double wv, acc, g

    with nogil:
        for i in range(n):
            for j in range(f):
                acc = 0.0
                for oh in range(out_h):
                    for ow in range(out_w):
                        acc += dout[i, j, oh, ow]
                db[j] += acc
                for ci in range(c):
                    for ki in range(k):
                        for kj in range(k):
                            wv = w[j, ci, ki, kj]
                            acc = 0.0
                            for oh in range(out_h):
                                ih = oh * stride + ki - pad
                                if ih < 0 or ih >= h:
                                    continue
                                if stride == 1:
                                    ow_lo = _imax(0, pad - kj)
                                    ow_hi = _imin(out_w, wd + pad - kj)
                                    for ow in range(ow_lo, ow_hi):
                                        g = dout[i, j, oh, ow]
                                        acc += x[i, ci, ih, ow + kj - pad] * g
                                        dx[i, ci, ih, ow + kj - pad] += wv * g
                                else:
                                    for ow in range(out_w):
                                        iw = ow * stride + kj - pad
                                        if 0 <= iw < wd:
                                            g = dout[i, j, oh, ow]
                                            acc += x[i, ci, ih, iw] * g
                                            dx[i, ci, ih, iw] += wv * g
                            dw[j, ci, ki, kj] += acc
    return dx_arr, dw_arr, db_arr


def maxpool_forward(double[:, :, :, ::1] x, int window, int stride):
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], h = x.shape[2], w = x.shape[3]
    cdef Py_ssize_t out_h = (h - window) // stride + 1
    cdef Py_ssize_t out_w = (w - window) // stride + 1
    out_arr = np.empty((n, c, out_h, out_w), dtype=np.float64)
    am_arr = np.empty((n, c, out_h, out_w), dtype=np.int64)
    cdef double[:, :, :, ::1] out = out_arr
    cdef cnp.int64_t[:, :, :, ::1] am = am_arr
    cdef Py_ssize_t i, ci, oh, ow, di, dj, ih, iw, best_idx
    cdef double v, best

    with nogil:
        for i in range(n):
            for ci in range(c):
                for oh in range(out_h):
                    for ow in range(out_w):
                        best = x[i, ci, oh * stride, ow * stride]
                        best_idx = (oh * stride) * w + ow * stride
                        for di in range(window):
                            ih = oh * stride + di
                            for dj in range(window):
                                iw = ow * stride + dj
                                v = x[i, ci, ih, iw]
                                if v > best:
                                    best = v
                                    best_idx = ih * w + iw
                        out[i, ci, oh, ow] = best
                        am[i, ci, oh, ow] = best_idx
    return out_arr, am_arr


def maxpool_backward(cnp.int64_t[:, :, :, ::1] argmax, int h, int w,
                     double[:, :, :, ::1] dout):
    cdef Py_ssize_t n = dout.shape[0], c = dout.shape[1]
    cdef Py_ssize_t out_h = dout.shape[2], out_w = dout.shape[3]
    dx_arr = np.zeros((n, c, h * w), dtype=np.float64)
    cdef double[:, :, ::1] dx = dx_arr
    cdef Py_ssize_t i, ci, oh, ow

    with nogil:
        for i in range(n):
            for ci in range(c):
                for oh in range(out_h):
                    for ow in range(out_w):
                        dx[i, ci, argmax[i, ci, oh, ow]] += dout[i, ci, oh, ow]
    return dx_arr.reshape(n, c, h, w)
