import warnings

import perf_charter as pc
from perf_charter import svg


def test_dendrogram_svg_structure(sample_matrix):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        z, _, _ = pc.standardize(sample_matrix)
    dd = pc.agglomerate(pc.pairwise_distances(z), names=sample_matrix.workload_names)
    out = svg.dendrogram_svg(dd, cut_height=2.0)
    assert out.startswith("<svg ")
    assert out.rstrip().endswith("</svg>")
    for name in sample_matrix.workload_names:
        assert name in out
    assert "cut 2" in out
    assert out == svg.dendrogram_svg(dd, cut_height=2.0)  # deterministic


def test_roofline_svg_ceilings_and_points(default_machine):
    points = [
        pc.RooflinePoint("relu", 1.27, 436.29),
        pc.RooflinePoint("MM_4x1", 208.98, 6457.51),
        pc.RooflinePoint("zero", 0.0, 0.0),  # skipped in the plot
    ]
    out = svg.roofline_svg(default_machine, points)
    assert "relu" in out and "MM_4x1" in out
    assert "zero" not in out
    for precision in ("double", "single", "half"):
        assert precision in out
    assert "polyline" in out
    assert "arithmetic intensity" in out


def test_gantt_svg_rows(sample_jobs):
    cluster = pc.ClusterSpec(4)
    schedule = pc.exact_schedule(sample_jobs, cluster)
    out = svg.gantt_svg(schedule, 4)
    for job in sample_jobs:
        assert job.name in out
    assert out.count("gpu ") == 4
    assert "<rect" in out


def test_scatter_svg_labels(sample_pca, sample_matrix):
    out = svg.scatter_svg(
        sample_matrix.workload_names,
        [float(v) for v in sample_pca.projections[:, 0]],
        [float(v) for v in sample_pca.projections[:, 1]],
        "PC1",
        "PC2",
        suites={"MLPf_Res50_TF": "MLPerf"},
    )
    assert "PC1" in out and "PC2" in out
    assert "MLPf_Res50_TF" in out


def test_svg_escapes_names():
    schedule = pc.Schedule(
        (pc.Placement("a<b>&c", 1, (0,), 0.0, 1.0),), 1.0
    )
    out = svg.gantt_svg(schedule, 1)
    assert "a&lt;b&gt;&amp;c" in out
    assert "a<b>" not in out
