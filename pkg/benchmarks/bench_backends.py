"""Compare the numba-jitted kernels against the pure-Python fallback.

Run from the repo root:

    python benchmarks/bench_backends.py

The same functions back both paths (PERF_CHARTER_JIT=0 selects the fallback
at import time); this script times them side by side within one process and
checks the outputs agree bit for bit.
"""

import itertools
import time

import numpy as np

from perf_charter import _kernels


def _time(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_jacobi(n=12, matrices=200):
    rng = np.random.RandomState(0)
    mats = []
    for _ in range(matrices):
        b = rng.randn(n, n)
        mats.append((b + b.T) / 2)

    def run(kernel):
        out = []
        for m in mats:
            a, v = m.copy(), np.eye(n)
            threshold = 1e-12 * float(np.sqrt((a * a).sum()))
            kernel(a, v, threshold, 100)
            out.append(np.diag(a).copy())
        return np.array(out)

    if _kernels.JIT_ENABLED:
        run(_kernels.jacobi_sweeps)  # compile outside the timing
    t_jit, r_jit = _time(run, _kernels.jacobi_sweeps)
    t_py, r_py = _time(run, _kernels.jacobi_sweeps_py, repeat=1)
    assert np.array_equal(r_jit, r_py), "backends disagree"
    return t_jit, t_py


def bench_search(n_jobs=6, gpus=4):
    rng = np.random.RandomState(1)
    widths = [1, 2, 4]
    combos = np.array(list(itertools.product(widths, repeat=n_jobs)), dtype=np.int64)
    runtimes = rng.uniform(1.0, 1000.0, size=combos.shape)
    perms = np.array(list(itertools.permutations(range(n_jobs))), dtype=np.int64)

    args = (runtimes, combos, perms, gpus, 0, combos.shape[0])
    if _kernels.JIT_ENABLED:
        _kernels.eval_chunk(*args)  # compile outside the timing
    t_jit, r_jit = _time(_kernels.eval_chunk, *args)
    t_py, r_py = _time(_kernels.eval_chunk_py, *args, repeat=1)
    assert r_jit == r_py, "backends disagree"
    candidates = combos.shape[0] * perms.shape[0]
    return t_jit, t_py, candidates


def main():
    print(f"active backend: {_kernels.BACKEND}")
    if not _kernels.JIT_ENABLED:
        print("numba unavailable or disabled; timing the pure path against itself")

    t_jit, t_py = bench_jacobi()
    print(f"jacobi sweeps (200 x 12x12):    jit {t_jit:8.4f} s   "
          f"pure {t_py:8.4f} s   speedup {t_py / t_jit:6.1f}x")

    t_jit, t_py, candidates = bench_search()
    print(f"schedule search ({candidates} cands): jit {t_jit:8.4f} s   "
          f"pure {t_py:8.4f} s   speedup {t_py / t_jit:6.1f}x")


if __name__ == "__main__":
    main()
