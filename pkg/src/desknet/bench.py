"""Benchmark the compiled kernels against the numpy fallback.

Times conv2d forward/backward and maxpool on the two convolution shapes
the experiments actually run (16@5x5 on 28x28 grayscale, 20@5x5 on
16-channel 16x16 maps), plus a full forward+backward step of the MNIST
CNN. Prints one row per (kernel, backend) with the speed ratio.
"""

from __future__ import annotations

import time

import numpy as np

from . import kernels
from .loss import softmax_xent
from .models import build_mnist_cnn
from .rng import RandomSource

CASES = [
    # (label, batch, channels, h, w, filters, kernel, pad)
    ("conv 16@5x5 on 1x28x28", 32, 1, 28, 28, 16, 5, 2),
    ("conv 20@5x5 on 16x16x16", 32, 16, 16, 16, 20, 5, 2),
]


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(repeat: int = 3, batch: int | None = None) -> list[dict]:
    """Returns one row per case per backend: {case, backend, forward_s, backward_s}."""
    rows = []
    rng = np.random.default_rng(0)
    for label, n, c, h, w, f, k, pad in CASES:
        n = batch or n
        x = np.ascontiguousarray(rng.uniform(-1, 1, (n, c, h, w)))
        wt = np.ascontiguousarray(rng.uniform(-1, 1, (f, c, k, k)))
        b = np.ascontiguousarray(rng.uniform(-1, 1, f))
        for name, impl in kernels.backends().items():
            out = impl.conv2d_forward(x, wt, b, 1, pad)
            dout = np.ascontiguousarray(rng.uniform(-1, 1, out.shape))
            rows.append(
                {
                    "case": label,
                    "backend": name,
                    "forward_s": _time(lambda: impl.conv2d_forward(x, wt, b, 1, pad), repeat),
                    "backward_s": _time(lambda: impl.conv2d_backward(x, wt, 1, pad, dout), repeat),
                }
            )
        pool_x = np.ascontiguousarray(rng.uniform(-1, 1, (n, f, h - h % 2, w - w % 2)))
        for name, impl in kernels.backends().items():
            pooled, argmax = impl.maxpool_forward(pool_x, 2, 2)
            dpool = np.ascontiguousarray(rng.uniform(-1, 1, pooled.shape))
            rows.append(
                {
                    "case": f"maxpool 2x2 after {label}",
                    "backend": name,
                    "forward_s": _time(lambda: impl.maxpool_forward(pool_x, 2, 2), repeat),
                    "backward_s": _time(
                        lambda: impl.maxpool_backward(argmax, pool_x.shape[2], pool_x.shape[3], dpool),
                        repeat,
                    ),
                }
            )
    return rows


def bench_train_step(repeat: int = 3, batch: int = 32) -> list[dict]:
    """One forward+backward step of the MNIST CNN per available backend."""
    from . import kernels as kmod

    rows = []
    data = np.random.default_rng(1).uniform(0, 1, (batch, 1, 28, 28))
    onehot = np.zeros((batch, 10))
    onehot[np.arange(batch), np.arange(batch) % 10] = 1.0
    for name, impl in kmod.backends().items():
        # route the layers through this backend for the measurement
        saved = (kmod.conv2d_forward, kmod.conv2d_backward, kmod.maxpool_forward, kmod.maxpool_backward)
        kmod.conv2d_forward = impl.conv2d_forward
        kmod.conv2d_backward = impl.conv2d_backward
        kmod.maxpool_forward = impl.maxpool_forward
        kmod.maxpool_backward = impl.maxpool_backward
        try:
            net = build_mnist_cnn(RandomSource(7), width=784)

            def step():
                logits, caches = net.forward(data)
                _, dlogits = softmax_xent(logits, onehot)
                net.backward(caches, dlogits)
                net.zero_grads()

            rows.append({"case": "mnist_cnn step (batch 32)", "backend": name,
                         "step_s": _time(step, repeat)})
        finally:
            (kmod.conv2d_forward, kmod.conv2d_backward,
             kmod.maxpool_forward, kmod.maxpool_backward) = saved
    return rows


def format_table(rows: list[dict]) -> str:
    """Rows -> aligned text table with a compiled/python speedup column."""
    by_case: dict[str, dict] = {}
    for r in rows:
        by_case.setdefault(r["case"], {})[r["backend"]] = r
    lines = []
    header = f"{'case':<34} {'backend':<9} {'forward':>10} {'backward':>10} {'step':>10}"
    lines.append(header)
    lines.append("-" * len(header))
    for case, backends_ in by_case.items():
        for backend, r in backends_.items():
            fwd = f"{r['forward_s'] * 1e3:9.2f}ms" if "forward_s" in r else f"{'-':>10}"
            bwd = f"{r['backward_s'] * 1e3:9.2f}ms" if "backward_s" in r else f"{'-':>10}"
            stp = f"{r['step_s'] * 1e3:9.2f}ms" if "step_s" in r else f"{'-':>10}"
            lines.append(f"{case:<34} {backend:<9} {fwd} {bwd} {stp}")
        if "compiled" in backends_ and "python" in backends_:
            key = "step_s" if "step_s" in backends_["python"] else "forward_s"
            ratio = backends_["python"][key] / backends_["compiled"][key]
            lines.append(f"{'':<34} python/compiled on {key[:-2]}: {ratio:.2f}x")
    return "\n".join(lines)


def run_benchmark(repeat: int = 3, log=print) -> list[dict]:
    rows = bench_kernels(repeat) + bench_train_step(repeat)
    log(format_table(rows))
    if not kernels.compiled_available:
        log("note: compiled backend unavailable; showing numpy fallback only")
    return rows
