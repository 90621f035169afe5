"""Correlation and principal component analysis."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betainc


class UndefinedCorrelationError(ValueError):
    pass


class DegenerateVarianceError(ValueError):
    pass


def pearson(x, y) -> tuple[float, int, float]:
    """Product-moment correlation with df = n-2 and a two-sided p value
    computed from the t statistic via the regularized incomplete beta."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 3:
        raise ValueError("pearson needs two equal-length series, n >= 3")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = np.sqrt(xc @ xc)
    sy = np.sqrt(yc @ yc)
    if sx == 0 or sy == 0:
        raise UndefinedCorrelationError("zero variance in an input")
    r = float(np.clip((xc @ yc) / (sx * sy), -1.0, 1.0))
    df = len(x) - 2
    if abs(r) == 1.0:
        return r, df, 0.0
    t2 = r * r * df / (1.0 - r * r)
    p = float(betainc(df / 2.0, 0.5, df / (df + t2)))
    return r, df, p


@dataclass(frozen=True)
class PCAResult:
    mean: np.ndarray
    components: np.ndarray          # orthonormal rows, descending variance
    explained_variance_ratio: np.ndarray
    scores: np.ndarray              # projected inputs

    def reconstruct(self) -> np.ndarray:
        return self.scores @ self.components + self.mean


def pca(embeddings) -> PCAResult:
    """Eigendecomposition of the covariance of mean-centered inputs.

    Sign convention: the largest-magnitude coordinate of every component
    is made positive, so results are reproducible across libraries.
    """
    X = np.asarray(embeddings, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("pca needs at least 2 vectors")
    mean = X.mean(axis=0)
    C = X - mean
    total = np.sum(C * C)
    if total == 0:
        raise DegenerateVarianceError("all input vectors are identical")
    cov = C.T @ C / (X.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    comps = eigvecs[:, order].T
    for i in range(comps.shape[0]):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    ratios = eigvals / eigvals.sum()
    return PCAResult(mean, comps, ratios, C @ comps.T)
