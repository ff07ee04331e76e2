from desknet import kernels
from desknet.bench import bench_kernels, bench_train_step, format_table


def test_bench_rows_cover_available_backends():
    rows = bench_kernels(repeat=1, batch=2)
    backends = {r["backend"] for r in rows}
    assert "python" in backends
    if kernels.compiled_available:
        assert "compiled" in backends
    assert all(r["forward_s"] > 0 and r["backward_s"] > 0 for r in rows)


def test_bench_train_step_runs():
    rows = bench_train_step(repeat=1, batch=4)
    assert all(r["step_s"] > 0 for r in rows)


def test_format_table_mentions_speedup():
    rows = bench_kernels(repeat=1, batch=2)
    text = format_table(rows)
    assert "backend" in text
    if kernels.compiled_available:
        assert "python/compiled" in text
