"""Standardization and principal component analysis.

The eigensolver is an in-house cyclic Jacobi (see _kernels); covariance uses
the sample (n-1) divisor; eigenvector signs are fixed so that each column's
largest-magnitude entry is positive, which makes dominant-metric labelling
and plots deterministic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _kernels
from .errors import (
    AnalysisError,
    IndexOutOfRange,
    MaxSweepsExceeded,
    MissingMetric,
    NotSymmetric,
    TooFewColumns,
    TooFewRows,
)
from .model import MetricMatrix, WorkloadProfile, metric_order_key


@dataclass(frozen=True)
class Standardization:
    """Per-column z-score parameters (sample std, divisor n-1)."""

    means: np.ndarray
    stds: np.ndarray


@dataclass(frozen=True)
class PcaModel:
    standardization: Standardization
    metric_names: list[str]
    workload_names: list[str]
    eigenvalues: np.ndarray       # descending, clamped at 0
    eigenvectors: np.ndarray      # column k = PC-k loading vector, unit length
    projections: np.ndarray       # standardized data @ eigenvectors
    explained: np.ndarray         # variance fractions, sum 1
    dropped_metrics: list[str]    # zero-variance columns removed before the fit


def standardize(
    matrix: MetricMatrix,
) -> tuple[np.ndarray, Standardization, list[str]]:
    """Z-score each column; zero-variance columns are removed and reported."""
    n = len(matrix.workload_names)
    if n < 2:
        raise TooFewRows(f"standardize needs n >= 2 rows, got {n}")
    values = matrix.values
    means = values.mean(axis=0)
    stds = values.std(axis=0, ddof=1)
    keep = stds != 0.0
    dropped = [m for m, k in zip(matrix.metric_names, keep) if not k]
    if dropped:
        warnings.warn(
            f"dropped zero-variance metric column(s): {', '.join(dropped)}",
            stacklevel=2,
        )
    z = (values[:, keep] - means[keep]) / stds[keep]
    return z, Standardization(means[keep], stds[keep]), dropped


def jacobi_eigen(
    sym: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Converges when the off-diagonal Frobenius norm falls below
    ``tol * ||A||_F``.  Returns eigenvalues sorted descending and the matching
    orthonormal eigenvector columns.
    """
    a = np.asarray(sym, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    m = a.shape[0]
    if m == 0:
        return np.empty(0), np.empty((0, 0))
    asym = np.max(np.abs(a - a.T)) if m > 1 else 0.0
    if asym > 1e-10:
        raise NotSymmetric(f"max |A - A^T| = {asym:.3e} exceeds 1e-10")
    a = (a + a.T) * 0.5
    v = np.eye(m)
    threshold = tol * float(np.sqrt((a * a).sum()))
    converged, off_norm, _ = _kernels.jacobi_sweeps(a, v, threshold, max_sweeps)
    if not converged:
        raise MaxSweepsExceeded(off_norm, max_sweeps)
    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]


def fit_pca(matrix: MetricMatrix) -> PcaModel:
    """PCA of the standardized metric matrix (covariance divisor n-1)."""
    z, params, dropped = standardize(matrix)
    retained = [m for m in matrix.metric_names if m not in dropped]
    if not retained:
        raise TooFewColumns("no metric column with nonzero variance")
    n = z.shape[0]
    cov = z.T @ z / (n - 1)
    cov = (cov + cov.T) * 0.5
    eigenvalues, eigenvectors = jacobi_eigen(cov)
    if eigenvalues.min() < -1e-9:
        raise AnalysisError(
            f"covariance eigenvalue {eigenvalues.min():.3e} below -1e-9"
        )
    eigenvalues = np.maximum(eigenvalues, 0.0)
    for k in range(eigenvectors.shape[1]):
        lead = int(np.argmax(np.abs(eigenvectors[:, k])))
        if eigenvectors[lead, k] < 0:
            eigenvectors[:, k] = -eigenvectors[:, k]
    projections = z @ eigenvectors
    explained = eigenvalues / eigenvalues.sum()
    return PcaModel(
        standardization=params,
        metric_names=retained,
        workload_names=list(matrix.workload_names),
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        projections=projections,
        explained=explained,
        dropped_metrics=dropped,
    )


def dominant_metric(model: PcaModel, pc: int) -> tuple[str, float]:
    """Metric with the largest |loading| on the given PC; canonical-order ties."""
    m = len(model.metric_names)
    if not 0 <= pc < m:
        raise IndexOutOfRange(f"pc {pc} out of range for {m} components")
    loadings = model.eigenvectors[:, pc]
    top = np.max(np.abs(loadings))
    best = min(
        (i for i in range(m) if abs(loadings[i]) == top),
        key=lambda i: metric_order_key(model.metric_names[i], i),
    )
    return model.metric_names[best], float(loadings[best])


def project(model: PcaModel, profile: WorkloadProfile | Mapping[str, float]) -> np.ndarray:
    """Coordinates of one workload in the fitted PC space."""
    metrics = profile.metrics if isinstance(profile, WorkloadProfile) else profile
    x = np.empty(len(model.metric_names))
    for i, name in enumerate(model.metric_names):
        if name not in metrics:
            raise MissingMetric(name)
        x[i] = metrics[name]
    z = (x - model.standardization.means) / model.standardization.stds
    return z @ model.eigenvectors


def pca_to_dict(model: PcaModel) -> dict:
    """JSON-ready export (eigenvectors serialized row-major)."""
    return {
        "workload_names": model.workload_names,
        "metric_names": model.metric_names,
        "dropped_metrics": model.dropped_metrics,
        "means": model.standardization.means.tolist(),
        "stds": model.standardization.stds.tolist(),
        "eigenvalues": model.eigenvalues.tolist(),
        "eigenvectors": model.eigenvectors.tolist(),
        "explained": model.explained.tolist(),
        "projections": model.projections.tolist(),
        "dominant_metric_per_pc": [
            {"metric": name, "loading": loading}
            for name, loading in (
                dominant_metric(model, k) for k in range(len(model.metric_names))
            )
        ],
    }
