"""Moldable-job scheduling on P identical GPUs.

Four schedulers over the same Job/ClusterSpec inputs:

  naive_schedule       every job one after another at the widest allowed width
  list_schedule        event-driven greedy placement for a given priority
                       order and width assignment
  permutation_search   minimum-makespan list schedule over all width vectors
                       x priority permutations (the measured-scalability search)
  exact_schedule       branch-and-bound over semi-active schedules; may insert
                       deliberate idle gaps, returns the provably minimal
                       makespan

Jobs are moldable (width fixed at launch) and non-preemptive; no interpolation
between measured widths.  GPU identity never affects makespans; concrete ids
are assigned lowest-index-first for rendering.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    AnalysisError,
    JobSetMismatch,
    SearchSpaceTooLarge,
    UnsupportedWidth,
)
from .model import Job


def worker_count() -> int:
    """Worker cap from PERF_CHARTER_THREADS (default: hardware parallelism)."""
    raw = os.environ.get("PERF_CHARTER_THREADS")
    default = os.cpu_count() or 1
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return max(1, value)


# hard ceiling on width-vector x permutation candidates, independent of the
# job-count guard; a wide width menu can explode the space on its own
_CANDIDATE_CAP = 100_000_000


def _powers_of_two_upto(p: int) -> tuple[int, ...]:
    widths = []
    w = 1
    while w <= p:
        widths.append(w)
        w *= 2
    return tuple(widths)


@dataclass(frozen=True)
class ClusterSpec:
    """P identical GPUs and the width menu jobs may be launched at."""

    gpu_count: int
    allowed_widths: tuple[int, ...] = ()

    def __post_init__(self):
        if not (isinstance(self.gpu_count, int) and self.gpu_count >= 1):
            raise ValueError(f"gpu_count must be a positive int, got {self.gpu_count!r}")
        widths = self.allowed_widths or _powers_of_two_upto(self.gpu_count)
        widths = sorted(set(int(w) for w in widths) | {1})
        if widths[0] < 1:
            raise ValueError("widths must be >= 1")
        if widths[-1] > self.gpu_count:
            raise ValueError(
                f"width {widths[-1]} exceeds gpu_count {self.gpu_count}"
            )
        object.__setattr__(self, "allowed_widths", tuple(widths))

    @property
    def max_width(self) -> int:
        return self.allowed_widths[-1]


@dataclass(frozen=True)
class Placement:
    job: str
    width: int
    gpu_ids: tuple[int, ...]
    start: float
    end: float


@dataclass(frozen=True)
class Schedule:
    placements: tuple[Placement, ...]
    makespan: float


def runtime(job: Job, width: int) -> float:
    """Minutes at the given width; only measured widths are schedulable."""
    if width not in job.speedup:
        raise UnsupportedWidth(f"{job.name} has no speedup for width {width}")
    return job.t1_minutes / job.speedup[width]


def scaling_efficiency(job: Job, width: int) -> float:
    if width not in job.speedup:
        raise UnsupportedWidth(f"{job.name} has no speedup for width {width}")
    return job.speedup[width] / width


def _width_options(job: Job, cluster: ClusterSpec) -> list[int]:
    options = sorted(w for w in cluster.allowed_widths if w in job.speedup)
    if not options:
        raise UnsupportedWidth(
            f"{job.name} supports none of the allowed widths {cluster.allowed_widths}"
        )
    return options


def naive_schedule(jobs: list[Job], cluster: ClusterSpec) -> Schedule:
    """Baseline: each job takes the whole width menu's maximum, sequentially."""
    wmax = cluster.max_width
    placements = []
    t = 0.0
    for job in jobs:
        rt = runtime(job, wmax)
        placements.append(Placement(job.name, wmax, tuple(range(wmax)), t, t + rt))
        t += rt
    return Schedule(tuple(placements), max((p.end for p in placements), default=0.0))


def list_schedule(
    jobs: list[Job], widths: dict[str, int], cluster: ClusterSpec
) -> Schedule:
    """Greedy event-driven placement.

    Whenever GPUs free up (and at t=0) the earliest-priority unstarted job
    whose width fits the free count is started, repeatedly within the same
    instant; ids are assigned lowest-index-first.
    """
    p_total = cluster.gpu_count
    pending = []
    for job in jobs:
        if job.name not in widths:
            raise UnsupportedWidth(f"no width assigned for {job.name}")
        w = widths[job.name]
        if w not in cluster.allowed_widths:
            raise UnsupportedWidth(f"width {w} not in allowed widths for {job.name}")
        pending.append((job, w, runtime(job, w)))

    free = list(range(p_total))
    placements: list[Placement] = []
    started = [False] * len(pending)
    n_started = 0
    t = 0.0
    while n_started < len(pending):
        for i, (job, w, rt) in enumerate(pending):
            if not started[i] and w <= len(free):
                ids = tuple(free[:w])
                del free[:w]
                placements.append(Placement(job.name, w, ids, t, t + rt))
                started[i] = True
                n_started += 1
        if n_started >= len(pending):
            break
        running = [p for p in placements if p.end > t]
        if not running:
            raise AnalysisError("no progress possible; width exceeds cluster")
        t = min(p.end for p in running)
        for p in placements:
            if p.end == t:
                free.extend(p.gpu_ids)
        free.sort()
    return Schedule(tuple(placements), max((p.end for p in placements), default=0.0))


def heuristic_schedule(jobs: list[Job], cluster: ClusterSpec) -> Schedule:
    """Longest-processing-time list schedule at each job's fastest width."""
    widths = {}
    chosen_rt = {}
    for job in jobs:
        w = min(_width_options(job, cluster), key=lambda w: (runtime(job, w), w))
        widths[job.name] = w
        chosen_rt[job.name] = runtime(job, w)
    ordered = sorted(jobs, key=lambda j: (-chosen_rt[j.name], j.name))
    return list_schedule(ordered, widths, cluster)


def _incumbent_schedules(jobs: list[Job], cluster: ClusterSpec) -> list[Schedule]:
    """Cheap list-schedule starting points for the branch-and-bound."""
    candidates = [heuristic_schedule(jobs, cluster)]
    try:
        candidates.append(naive_schedule(jobs, cluster))
    except UnsupportedWidth:
        pass
    # narrowest efficient width: best speedup-per-GPU, then LPT order
    widths = {}
    chosen_rt = {}
    for job in jobs:
        w = max(
            _width_options(job, cluster),
            key=lambda w: (job.speedup[w] / w, -w),
        )
        widths[job.name] = w
        chosen_rt[job.name] = runtime(job, w)
    ordered = sorted(jobs, key=lambda j: (-chosen_rt[j.name], j.name))
    candidates.append(list_schedule(ordered, widths, cluster))
    return candidates


def permutation_search(
    jobs: list[Job], cluster: ClusterSpec, limit: int = 8
) -> tuple[Schedule, int]:
    """Exhaustive search over (width vector) x (priority permutation).

    Cost is prod|options| * n!, so n is guarded by ``limit``.  Ties resolve to
    the lexicographically smallest (width vector, permutation).  The candidate
    space is chunked across worker threads (PERF_CHARTER_THREADS) with a
    deterministic merge, so the result is independent of the worker count.
    """
    n = len(jobs)
    if n == 0:
        return Schedule((), 0.0), 1
    options = [_width_options(job, cluster) for job in jobs]
    bound = math.factorial(n) * math.prod(len(o) for o in options)
    if n > limit:
        raise SearchSpaceTooLarge(
            bound, limit, f"{n} jobs > limit {limit} (candidate bound {bound})"
        )
    if bound > _CANDIDATE_CAP:
        raise SearchSpaceTooLarge(
            bound, limit, f"candidate bound {bound} exceeds {_CANDIDATE_CAP}"
        )
    combos = np.array(list(itertools.product(*options)), dtype=np.int64)
    runtimes = np.empty(combos.shape, dtype=np.float64)
    for j, job in enumerate(jobs):
        per_width = {w: runtime(job, w) for w in options[j]}
        runtimes[:, j] = [per_width[w] for w in combos[:, j]]
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)

    n_combos = combos.shape[0]
    workers = min(worker_count(), n_combos)
    if workers <= 1:
        best = _kernels.eval_chunk(
            runtimes, combos, perms, cluster.gpu_count, 0, n_combos
        )
    else:
        step = (n_combos + workers - 1) // workers
        ranges = [(lo, min(lo + step, n_combos)) for lo in range(0, n_combos, step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _kernels.eval_chunk,
                    runtimes, combos, perms, cluster.gpu_count, lo, hi,
                )
                for lo, hi in ranges
            ]
            results = [f.result() for f in futures]
        best = min(results, key=lambda r: (r[0], r[1], r[2]))

    best_m, best_c, best_p = best
    width_map = {jobs[j].name: int(combos[best_c, j]) for j in range(n)}
    ordered = [jobs[j] for j in perms[best_p]]
    schedule = list_schedule(ordered, width_map, cluster)
    if schedule.makespan != best_m:
        raise AnalysisError("search kernel and placement engine disagree")
    return schedule, int(n_combos * perms.shape[0])


def exact_schedule(jobs: list[Job], cluster: ClusterSpec, limit: int = 10) -> Schedule:
    """Provably minimal makespan via branch-and-bound.

    Branches over (job, width, start) with starts restricted to 0 and the end
    times of already-placed jobs, placed in chronological order — the
    semi-active schedules, which contain an optimum.  Lower bound per node:
    max(area bound, longest remaining single-job runtime, current makespan).
    """
    n = len(jobs)
    if n > limit:
        raise SearchSpaceTooLarge(n, limit, f"{n} jobs > limit {limit}")
    if n == 0:
        return Schedule((), 0.0)
    p_total = cluster.gpu_count
    options = [_width_options(job, cluster) for job in jobs]
    rt_tab = [{w: runtime(job, w) for w in opts} for job, opts in zip(jobs, options)]
    # a wider-but-not-faster width is dominated for makespan: the narrower,
    # faster placement fits wherever the wide one did
    branch_widths = []
    for j, opts in enumerate(options):
        keep = [
            w
            for w in opts
            if not any(
                w2 < w and rt_tab[j][w2] <= rt_tab[j][w] for w2 in opts
            )
        ]
        branch_widths.append(sorted(keep, key=lambda w: (rt_tab[j][w], w)))
    min_rt = [min(tab.values()) for tab in rt_tab]
    min_area = [min(w * rt for w, rt in tab.items()) for tab in rt_tab]

    seed = min(_incumbent_schedules(jobs, cluster), key=lambda s: s.makespan)
    idx_of = {job.name: j for j, job in enumerate(jobs)}
    signature = [
        (jobs[j].t1_minutes, tuple(sorted(rt_tab[j].items()))) for j in range(n)
    ]
    twins = [
        [j2 for j2 in range(j) if signature[j2] == signature[j]] for j in range(n)
    ]

    best_m = seed.makespan
    best_pl = [(idx_of[p.job], p.width, p.start, p.end) for p in seed.placements]
    placed: list[tuple[int, int, float, float]] = []
    remaining = set(range(n))
    # branch longest jobs first: good schedules appear early, tight pruning
    branch_order = sorted(range(n), key=lambda j: (-min_rt[j], j))

    def fits(s: float, e: float, w: int) -> bool:
        points = [s] + [ps for (_, _, ps, _) in placed if s < ps < e]
        for tp in points:
            used = w
            for (_, pw, ps, pe) in placed:
                if ps <= tp < pe:
                    used += pw
            if used > p_total:
                return False
        return True

    def dfs(cur_m: float, area: float, last_s: float, last_j: int, rem_area: float):
        nonlocal best_m, best_pl
        if not remaining:
            if cur_m < best_m:
                best_m = cur_m
                best_pl = placed.copy()
            return
        # remaining jobs all start at >= last_s (chronological enumeration), so
        # their work plus the committed overhang must fit after last_s
        overhang = 0.0
        for (_, pw, _, pe) in placed:
            if pe > last_s:
                overhang += pw * (pe - last_s)
        tail_rt = max(min_rt[j] for j in remaining)
        bound = max(
            cur_m,
            (area + rem_area) / p_total,
            last_s + (rem_area + overhang) / p_total,
            last_s + tail_rt,
        )
        if bound >= best_m:
            return
        starts = sorted(
            {s for s in ({0.0} | {e for (_, _, _, e) in placed}) if s >= last_s}
        )
        overhang_at = {
            s: sum(pw * (pe - s) for (_, pw, _, pe) in placed if pe > s)
            for s in starts
        }
        for j in branch_order:
            if j not in remaining:
                continue
            # identical jobs are interchangeable: place them in index order
            if any(j2 in remaining for j2 in twins[j]):
                continue
            rem_after = rem_area - min_area[j]
            for w in branch_widths[j]:
                rt = rt_tab[j][w]
                for s in starts:
                    if s == last_s and j < last_j:
                        continue
                    e = s + rt
                    if max(cur_m, e) >= best_m:
                        break  # starts ascend, no later start can improve
                    # child's own tail-area bound, before paying for recursion
                    child_bound = s + (rem_after + overhang_at[s] + w * rt) / p_total
                    if child_bound >= best_m:
                        continue
                    if not fits(s, e, w):
                        continue
                    placed.append((j, w, s, e))
                    remaining.remove(j)
                    dfs(max(cur_m, e), area + w * rt, s, j, rem_after)
                    remaining.add(j)
                    placed.pop()

    dfs(0.0, 0.0, 0.0, -1, sum(min_area))

    placements = []
    assigned: list[tuple[tuple[int, ...], float, float]] = []
    for (j, w, s, e) in sorted(best_pl, key=lambda r: (r[2], r[0])):
        used: set[int] = set()
        for ids, s2, e2 in assigned:
            if s2 < e and s < e2:
                used.update(ids)
        ids = tuple(g for g in range(p_total) if g not in used)[:w]
        if len(ids) < w:
            raise AnalysisError("id assignment exceeded capacity")
        assigned.append((ids, s, e))
        placements.append(Placement(jobs[j].name, w, ids, s, e))
    return Schedule(tuple(placements), max((p.end for p in placements), default=0.0))


def savings(naive: Schedule, best: Schedule) -> float:
    """Makespan saved by the better schedule, in minutes."""
    naive_jobs = sorted(p.job for p in naive.placements)
    best_jobs = sorted(p.job for p in best.placements)
    if naive_jobs != best_jobs:
        raise JobSetMismatch("schedules cover different job sets")
    return naive.makespan - best.makespan


def validate_schedule(
    schedule: Schedule, cluster: ClusterSpec, jobs: list[Job] | None = None
) -> bool:
    """Independent checks: each job once, no GPU double-booked, makespan = max end."""
    names = [p.job for p in schedule.placements]
    if len(set(names)) != len(names):
        raise AnalysisError("a job appears more than once")
    if jobs is not None and set(names) != {j.name for j in jobs}:
        raise AnalysisError("schedule does not cover the job set")
    per_gpu: dict[int, list[tuple[float, float, str]]] = {}
    for p in schedule.placements:
        if len(p.gpu_ids) != p.width or len(set(p.gpu_ids)) != p.width:
            raise AnalysisError(f"{p.job}: gpu_ids do not match width")
        if not all(0 <= g < cluster.gpu_count for g in p.gpu_ids):
            raise AnalysisError(f"{p.job}: gpu id out of range")
        if not p.end > p.start:
            raise AnalysisError(f"{p.job}: empty execution interval")
        for g in p.gpu_ids:
            per_gpu.setdefault(g, []).append((p.start, p.end, p.job))
    for g, intervals in per_gpu.items():
        intervals.sort()
        for (s1, e1, j1), (s2, e2, j2) in zip(intervals, intervals[1:]):
            if s2 < e1:
                raise AnalysisError(f"GPU {g}: {j1} and {j2} overlap")
    expected = max((p.end for p in schedule.placements), default=0.0)
    if schedule.makespan != expected:
        raise AnalysisError("makespan is not the latest end time")
    return True


_GANTT_CHARS = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789"


def ascii_gantt(schedule: Schedule, gpu_count: int, columns: int = 64) -> str:
    """Fixed-width timeline per GPU, one letter per job."""
    if not schedule.placements:
        return "(empty schedule)\n"
    span = schedule.makespan
    letters: dict[str, str] = {}
    for p in schedule.placements:
        if p.job not in letters:
            letters[p.job] = _GANTT_CHARS[len(letters) % len(_GANTT_CHARS)]
    rows = {g: ["."] * columns for g in range(gpu_count)}
    for p in schedule.placements:
        lo = int(p.start / span * columns)
        hi = max(lo + 1, int(math.ceil(p.end / span * columns)))
        for g in p.gpu_ids:
            for c in range(lo, min(hi, columns)):
                rows[g][c] = letters[p.job]
    lines = [f"gpu {g:>2} |{''.join(rows[g])}|" for g in range(gpu_count)]
    lines.append(f"        0{'':{columns - 10}}{span:.6g} min")
    for job, letter in letters.items():
        placement = next(p for p in schedule.placements if p.job == job)
        lines.append(
            f"  {letter} = {job} (width {placement.width}, "
            f"{placement.start:.6g}..{placement.end:.6g})"
        )
    return "\n".join(lines) + "\n"
