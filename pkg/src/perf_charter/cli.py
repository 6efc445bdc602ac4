"""perf-charter command line: characterize / roofline / schedule.

stdout carries the human-readable report (6 significant digits); machine
outputs go to files in --out (JSON/CSV at full precision, SVG plots).  All
files are written atomically after the computation succeeds, so a failing run
leaves no partial outputs.  Exit codes: 2 ingestion errors, 3 analysis
errors, 4 search-space guard.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import cluster as clus
from . import model, stats, svg
from . import roofline as roof
from . import sched
from .datafiles import sample_path
from .errors import AnalysisError, EmptyInput, ParseError, PerfCharterError, SearchSpaceTooLarge


def _detect_format(path: Path) -> str:
    return "json" if path.suffix.lower() == ".json" else "csv"


def _read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _g(x: float) -> str:
    return f"{x:.6g}"


def _parse_space(value: str) -> tuple[str, int]:
    if value == "metric":
        return "metric", 0
    if value.startswith("pca:"):
        k = value[4:]
        if k.isdigit() and int(k) >= 1:
            return "pca", int(k)
    raise argparse.ArgumentTypeError(
        f"--space must be 'metric' or 'pca:<k>', got {value!r}"
    )


def _parse_widths(value: str) -> tuple[int, ...]:
    try:
        widths = tuple(int(part) for part in value.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"--widths must be comma-separated ints, got {value!r}")
    if not widths:
        raise argparse.ArgumentTypeError("--widths must name at least one width")
    return widths


def cmd_characterize(args) -> int:
    fmt = _detect_format(Path(args.profiles))
    profiles = model.parse_workload_profiles(_read_text(args.profiles), fmt)
    matrix = model.matrix_from_profiles(profiles)
    pca = stats.fit_pca(matrix)

    space, top_k = args.space
    if space == "pca":
        points = pca.projections[:, : min(top_k, pca.projections.shape[1])]
    else:
        cols = [matrix.metric_names.index(m) for m in pca.metric_names]
        points = (
            matrix.values[:, cols] - pca.standardization.means
        ) / pca.standardization.stds
    dist = clus.pairwise_distances(points)
    dendrogram = clus.agglomerate(dist, args.linkage, names=matrix.workload_names)
    if args.cut is not None:
        clusters = clus.cut(dendrogram, args.cut)
        threshold = args.cut
    else:
        clusters, threshold = clus.cut_k(dendrogram, args.k)
    reps = clus.select_representatives(clusters, dist, matrix.workload_names)
    report = clus.coverage(matrix, reps)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_atomic(out / "pca.json", _dump_json(stats.pca_to_dict(pca)))
    _write_atomic(
        out / "dendrogram.json",
        _dump_json(
            {
                "leaves": dendrogram.leaves,
                "merges": [[m.left, m.right, m.height, m.size] for m in dendrogram.merges],
            }
        ),
    )
    _write_atomic(
        out / "dendrogram.svg",
        svg.dendrogram_svg(dendrogram, threshold if math.isfinite(threshold) else None),
    )
    _write_atomic(
        out / "subset_report.json",
        _dump_json(
            {
                "selected": report.selected,
                "coverage": {m: list(v) for m, v in report.coverage.items()},
                "degenerate": report.degenerate,
            }
        ),
    )
    if pca.projections.shape[1] >= 2:
        suites = {p.name: p.suite.value for p in profiles}
        dom1 = stats.dominant_metric(pca, 0)[0]
        dom2 = stats.dominant_metric(pca, 1)[0]
        _write_atomic(
            out / "pca_scatter.svg",
            svg.scatter_svg(
                matrix.workload_names,
                [float(v) for v in pca.projections[:, 0]],
                [float(v) for v in pca.projections[:, 1]],
                f"PC1 ({_g(100 * pca.explained[0])}%, {dom1})",
                f"PC2 ({_g(100 * pca.explained[1])}%, {dom2})",
                suites=suites,
            ),
        )

    print(f"workloads: {len(matrix.workload_names)}  metrics: {len(pca.metric_names)}"
          + (f"  (dropped: {', '.join(pca.dropped_metrics)})" if pca.dropped_metrics else ""))
    cum = 0.0
    shares = []
    for i, frac in enumerate(pca.explained[:4]):
        cum += float(frac)
        shares.append(f"PC{i + 1} {_g(100 * frac)}%")
    print(f"explained variance: {', '.join(shares)} (cumulative {_g(100 * cum)}%)")
    for i in range(len(pca.metric_names)):
        name, loading = stats.dominant_metric(pca, i)
        print(f"  PC{i + 1} dominated by {name} (loading {_g(loading)})")
    print(f"clusters at threshold {_g(threshold)}:")
    for i, cluster in enumerate(clusters):
        print(f"  {i + 1}: {', '.join(sorted(cluster))}")
    print(f"selected subset: {', '.join(report.selected)}")
    print("coverage of full ranges (%):")
    for metric, (lo, hi) in report.coverage.items():
        flag = "  [constant metric]" if metric in report.degenerate else ""
        print(f"  {metric}: {_g(lo)} .. {_g(hi)}{flag}")
    return 0


def cmd_roofline(args) -> int:
    machine_path = Path(args.machine) if args.machine else sample_path("machine.json")
    machine = roof.machine_from_dict(json.loads(_read_text(machine_path)))
    multi = len(args.kernels) > 1
    points: list[roof.RooflinePoint] = []
    for path_str in args.kernels:
        path = Path(path_str)
        records = model.parse_kernels(_read_text(path), _detect_format(path))
        if not records:
            raise EmptyInput(f"{path}: no kernel records")
        if args.aggregate:
            points.append(
                roof.workload_point(records, args.transaction_bytes, name=path.stem)
            )
        else:
            for r in records:
                name = f"{path.stem}/{r.class_name}" if multi else r.class_name
                points.append(
                    roof.RooflinePoint(
                        name,
                        roof.intensity(r.flops, r.transactions, args.transaction_bytes),
                        roof.throughput(r.flops, r.time_ms / 1e3) if r.time_ms > 0 else 0.0,
                    )
                )

    rows = []
    for p in points:
        label = roof.classify(machine, p.precision, p)
        rows.append((p.name, p.intensity, p.throughput, label))
        if math.isfinite(p.intensity):
            ceiling = roof.attainable(machine, p.precision, p.intensity)
            if p.throughput > ceiling:
                print(
                    f"note: {p.name} throughput {_g(p.throughput)} exceeds the configured "
                    f"ceiling {_g(ceiling)} GFLOP/s",
                    file=sys.stderr,
                )

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["name,intensity,throughput,classification"]
    lines += [f"{n},{repr(i)},{repr(t)},{c}" for n, i, t, c in rows]
    _write_atomic(out / "roofline.csv", "\n".join(lines) + "\n")
    _write_atomic(out / "roofline.svg", svg.roofline_svg(machine, points))

    print(f"machine {machine.name}: single-precision ridge at "
          f"{_g(machine.ridge('single'))} FLOPs/byte")
    for n, i, t, c in rows:
        print(f"  {n}: intensity {_g(i)} FLOPs/B, throughput {_g(t)} GFLOP/s -> {c}")
    return 0


def cmd_schedule(args) -> int:
    path = Path(args.jobs)
    jobs = model.parse_jobs(_read_text(path), _detect_format(path))
    cluster_spec = sched.ClusterSpec(args.gpus, args.widths or ())
    naive = sched.naive_schedule(jobs, cluster_spec)
    explored = None
    if args.method == "permutation":
        best, explored = sched.permutation_search(jobs, cluster_spec, limit=args.limit)
    elif args.method == "exact":
        best = sched.exact_schedule(jobs, cluster_spec)
    else:
        best = sched.heuristic_schedule(jobs, cluster_spec)
    saved = sched.savings(naive, best)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_atomic(
        out / "schedule.json",
        _dump_json(
            {
                "gpu_count": cluster_spec.gpu_count,
                "placements": [
                    {
                        "job": p.job,
                        "width": p.width,
                        "gpu_ids": list(p.gpu_ids),
                        "start": p.start,
                        "end": p.end,
                    }
                    for p in best.placements
                ],
                "makespan_min": best.makespan,
                "method": args.method,
            }
        ),
    )
    _write_atomic(out / "gantt.svg", svg.gantt_svg(best, cluster_spec.gpu_count))

    print(f"jobs: {len(jobs)}  gpus: {cluster_spec.gpu_count}  "
          f"widths: {','.join(map(str, cluster_spec.allowed_widths))}")
    print(f"naive makespan:    {_g(naive.makespan)} min")
    suffix = f" (explored {explored} candidates)" if explored is not None else ""
    print(f"{args.method} makespan: {_g(best.makespan)} min{suffix}")
    print(f"savings: {_g(saved)} min ({_g(saved / 60)} h)")
    print(sched.ascii_gantt(best, cluster_spec.gpu_count), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perf-charter",
        description="Characterize ML training workloads and schedule moldable jobs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("characterize", help="PCA + dendrogram + subset selection")
    p.add_argument("--profiles", required=True, help="profiles CSV/JSON file")
    p.add_argument(
        "--linkage",
        choices=("avg", "average", "single", "complete"),
        default="average",
        type=lambda s: "average" if s == "avg" else s,
    )
    group = p.add_mutually_exclusive_group()
    group.add_argument("--cut", type=float, default=None, help="cut height")
    group.add_argument("--k", type=int, default=4, help="number of clusters (default 4)")
    p.add_argument("--space", type=_parse_space, default=("metric", 0),
                   help="clustering space: metric (default) or pca:<k>")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("roofline", help="arithmetic intensity vs machine ceilings")
    p.add_argument("--kernels", required=True, nargs="+", help="kernel-class CSV/JSON file(s)")
    p.add_argument("--machine", default=None, help="machine config JSON (default: bundled V100-class)")
    p.add_argument("--transaction-bytes", type=int, default=roof.DEFAULT_TRANSACTION_BYTES)
    p.add_argument("--aggregate", action="store_true",
                   help="one aggregate point per input file instead of per-class points")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_roofline)

    p = sub.add_parser("schedule", help="naive baseline vs searched schedule")
    p.add_argument("--jobs", required=True, help="jobs CSV/JSON file")
    p.add_argument("--gpus", required=True, type=int)
    p.add_argument("--widths", type=_parse_widths, default=None,
                   help="allowed widths, e.g. 1,2,4,8 (default: powers of two up to --gpus)")
    p.add_argument("--method", choices=("exact", "permutation", "heuristic"),
                   default="permutation")
    p.add_argument("--limit", type=int, default=8,
                   help="permutation-search job-count guard (default 8)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_schedule)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing input: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SearchSpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (AnalysisError, PerfCharterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
