"""Hot numeric kernels with two interchangeable backends.

The two inner loops that dominate runtime — the list-scheduling makespan
simulation driven by the permutation search, and the cyclic Jacobi rotation
sweeps behind every PCA fit — are compiled with numba when available.
Set ``PERF_CHARTER_JIT=0`` to force the pure-Python path (same functions,
uncompiled); both backends execute identical arithmetic in identical order,
so results are bit-for-bit equal.  ``benchmarks/bench_backends.py`` compares
the two.
"""

import math
import os

import numpy as np


def _jit_requested() -> bool:
    flag = os.environ.get("PERF_CHARTER_JIT", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


def _jacobi_sweeps_impl(a, v, threshold, max_sweeps):
    """Cyclic Jacobi sweeps on symmetric ``a`` (overwritten toward diagonal).

    ``v`` accumulates the rotations (pass identity in).  Returns
    ``(converged, off_norm, sweeps)`` where off_norm is the Frobenius norm of
    the off-diagonal part at exit.
    """
    n = a.shape[0]
    sweeps = 0
    while True:
        off2 = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off2 += 2.0 * a[i, j] * a[i, j]
        off = math.sqrt(off2)
        if off <= threshold:
            return 1, off, sweeps
        if sweeps >= max_sweeps:
            return 0, off, sweeps
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    # asymptotic branch: theta**2 would overflow
                    t = 1.0 / (2.0 * theta)
                elif theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    if k != p and k != q:
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = akp - s * (akq + tau * akp)
                        a[p, k] = a[k, p]
                        a[k, q] = akq + s * (akp - tau * akq)
                        a[q, k] = a[k, q]
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp - s * (vkq + tau * vkp)
                    v[k, q] = vkq + s * (vkp - tau * vkq)


def _eval_chunk_impl(runtimes, widths, perms, gpu_count, c_lo, c_hi):
    """Best greedy-list makespan over width-vector rows ``c_lo..c_hi``.

    ``runtimes``/``widths`` are (n_combos, n) candidate tables, ``perms`` is
    (n_perms, n) priority orders.  Returns ``(makespan, combo, perm)`` of the
    first strict minimum over the (combo, perm) enumeration order, i.e. the
    lexicographically smallest (width vector, permutation) tie-break.
    """
    n_perms = perms.shape[0]
    n = perms.shape[1]
    best_m = np.inf
    best_c = -1
    best_p = -1
    ends = np.empty(n, np.float64)
    run_w = np.empty(n, np.int64)
    started = np.empty(n, np.uint8)
    for c in range(c_lo, c_hi):
        for p in range(n_perms):
            for i in range(n):
                started[i] = 0
            n_run = 0
            n_started = 0
            free = gpu_count
            t = 0.0
            makespan = 0.0
            while n_started < n:
                # one greedy pass in priority order; free only shrinks here
                for k in range(n):
                    j = perms[p, k]
                    if started[j] == 0 and widths[c, j] <= free:
                        started[j] = 1
                        free -= widths[c, j]
                        e = t + runtimes[c, j]
                        ends[n_run] = e
                        run_w[n_run] = widths[c, j]
                        n_run += 1
                        n_started += 1
                        if e > makespan:
                            makespan = e
                if n_started >= n:
                    break
                if n_run == 0:
                    # unschedulable width (guarded upstream)
                    makespan = np.inf
                    break
                t_next = np.inf
                for r in range(n_run):
                    if ends[r] < t_next:
                        t_next = ends[r]
                t = t_next
                r = 0
                while r < n_run:
                    if ends[r] == t:
                        free += run_w[r]
                        n_run -= 1
                        ends[r] = ends[n_run]
                        run_w[r] = run_w[n_run]
                    else:
                        r += 1
            if makespan < best_m:
                best_m = makespan
                best_c = c
                best_p = p
    return best_m, best_c, best_p


JIT_ENABLED = False
if _jit_requested():
    try:
        from numba import njit
    except ImportError:
        njit = None
    if njit is not None:
        jacobi_sweeps = njit(cache=True)(_jacobi_sweeps_impl)
        eval_chunk = njit(cache=True, nogil=True)(_eval_chunk_impl)
        JIT_ENABLED = True

if not JIT_ENABLED:
    jacobi_sweeps = _jacobi_sweeps_impl
    eval_chunk = _eval_chunk_impl

BACKEND = "numba" if JIT_ENABLED else "python"

# uncompiled references, kept for backend-equivalence tests and benchmarks
jacobi_sweeps_py = _jacobi_sweeps_impl
eval_chunk_py = _eval_chunk_impl
