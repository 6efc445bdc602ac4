"""Independent test oracles.

Deliberately dumb re-implementations kept separate from the library code:
a characteristic-polynomial eigenvalue solver for 3x3 symmetric matrices, an
exhaustive enumerator over start-time-ordered (semi-active) schedules, and an
interval-overlap schedule checker.
"""

from __future__ import annotations

import math


def symmetric_3x3_eigenvalues(a) -> list[float]:
    """Roots of the characteristic cubic, trigonometric form (all real)."""
    a00, a01, a02 = float(a[0][0]), float(a[0][1]), float(a[0][2])
    a11, a12, a22 = float(a[1][1]), float(a[1][2]), float(a[2][2])
    p1 = a01 * a01 + a02 * a02 + a12 * a12
    q = (a00 + a11 + a22) / 3.0
    p2 = (a00 - q) ** 2 + (a11 - q) ** 2 + (a22 - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    if p == 0.0:
        return [q, q, q]
    b00, b11, b22 = (a00 - q) / p, (a11 - q) / p, (a22 - q) / p
    b01, b02, b12 = a01 / p, a02 / p, a12 / p
    detb = (
        b00 * (b11 * b22 - b12 * b12)
        - b01 * (b01 * b22 - b12 * b02)
        + b02 * (b01 * b12 - b11 * b02)
    )
    r = max(-1.0, min(1.0, detb / 2.0))
    phi = math.acos(r) / 3.0
    e1 = q + 2.0 * p * math.cos(phi)
    e3 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    return sorted([e1, e2, e3], reverse=True)


def brute_force_makespan(jobs, gpu_count: int, allowed_widths) -> float:
    """Minimum makespan by exhaustive enumeration, no pruning.

    Enumerates every placement sequence in non-decreasing start order where
    each start is 0 or the end of an already-placed job (the same semi-active
    space exact_schedule searches, spelled out naively).
    """
    n = len(jobs)
    options = []
    for job in jobs:
        opts = sorted(w for w in allowed_widths if w in job.speedup)
        assert opts, f"{job.name} cannot run at any allowed width"
        options.append(opts)
    placed: list[tuple[int, float, float]] = []  # (width, start, end)
    best = [math.inf]

    def capacity_ok(s: float, e: float, w: int) -> bool:
        points = [s] + [ps for (_, ps, _) in placed if s < ps < e]
        for t in points:
            used = w
            for (pw, ps, pe) in placed:
                if ps <= t < pe:
                    used += pw
            if used > gpu_count:
                return False
        return True

    def rec(remaining: frozenset, last_start: float):
        if not remaining:
            best[0] = min(best[0], max((e for (_, _, e) in placed), default=0.0))
            return
        starts = sorted({0.0} | {e for (_, _, e) in placed})
        for j in remaining:
            for w in options[j]:
                rt = jobs[j].t1_minutes / jobs[j].speedup[w]
                for s in starts:
                    if s < last_start:
                        continue
                    if not capacity_ok(s, s + rt, w):
                        continue
                    placed.append((w, s, s + rt))
                    rec(remaining - {j}, s)
                    placed.pop()

    rec(frozenset(range(n)), 0.0)
    return best[0]


def check_schedule(schedule, gpu_count: int, jobs) -> None:
    """Assert schedule validity from first principles."""
    names = [p.job for p in schedule.placements]
    assert sorted(names) == sorted(j.name for j in jobs), "job set mismatch"
    assert len(set(names)) == len(names), "job placed twice"
    for p in schedule.placements:
        assert len(p.gpu_ids) == p.width == len(set(p.gpu_ids))
        assert all(0 <= g < gpu_count for g in p.gpu_ids)
        assert p.end > p.start
    for a_i, a in enumerate(schedule.placements):
        for b in schedule.placements[a_i + 1:]:
            if set(a.gpu_ids) & set(b.gpu_ids):
                assert a.end <= b.start or b.end <= a.start, (
                    f"{a.job} and {b.job} overlap on a GPU"
                )
    expected = max((p.end for p in schedule.placements), default=0.0)
    assert schedule.makespan == expected
