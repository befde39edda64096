"""Estimators and tests shared by the experiments."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy import stats as sps


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class SampleSummary:
    count: int
    mean: float
    variance: float
    mean_stderr: float
    var_stderr: float


def summarize(samples) -> SampleSummary:
    """Unbiased mean/variance; the variance stderr uses the fourth central moment."""
    x = np.asarray(samples, dtype=np.float64)
    n = x.size
    if n < 2:
        raise InsufficientData("need at least two samples")
    mean = float(np.mean(x))
    d = x - mean
    m2 = float(np.mean(d * d))
    m4 = float(np.mean(d ** 4))
    var = m2 * n / (n - 1)
    var_se = math.sqrt(max(m4 - m2 * m2 * (n - 3) / (n - 1), 0.0) / n)
    return SampleSummary(n, mean, var, math.sqrt(var / n), var_se)


def covariance(x, y) -> tuple[float, float]:
    """Unbiased covariance and its delta-method standard error."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.size
    if n < 2:
        raise InsufficientData("need at least two samples")
    dx = x - x.mean()
    dy = y - y.mean()
    prod = dx * dy
    cov = float(prod.sum() / (n - 1))
    return cov, float(np.std(prod, ddof=1) / math.sqrt(n))


def chi_square_independence(table) -> tuple[float, float]:
    """Pearson test of independence (2-way) or mutual independence (3-way)."""
    t = np.asarray(table, dtype=np.float64)
    if t.ndim not in (2, 3):
        raise ValueError("table must be 2- or 3-way")
    total = t.sum()
    margins = []
    for ax in range(t.ndim):
        other = tuple(a for a in range(t.ndim) if a != ax)
        margins.append(t.sum(axis=other) / total)
    expected = total * margins[0]
    for mg in margins[1:]:
        expected = np.multiply.outer(expected, mg)
    if np.any(expected < 5):
        raise InsufficientData("expected counts below 5; table too sparse")
    stat = float(((t - expected) ** 2 / expected).sum())
    dims = t.shape
    df = int(np.prod(dims)) - sum(dims) + t.ndim - 1
    return stat, float(sps.chi2.sf(stat, df))


def contingency(*columns) -> np.ndarray:
    """Count table of jointly observed integer labels (each column 0..k-1)."""
    cols = [np.asarray(c, dtype=np.int64) for c in columns]
    shape = tuple(int(c.max()) + 1 if c.size else 1 for c in cols)
    flat = np.ravel_multi_index(cols, shape)
    return np.bincount(flat, minlength=int(np.prod(shape))).reshape(shape)


def two_sample_homogeneity(a, b, min_expected: float = 5.0) -> tuple[float, float]:
    """Chi-square homogeneity test for two integer samples, pooling sparse upper values."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    hi = int(max(a.max(), b.max()))
    ca = np.bincount(a, minlength=hi + 1).astype(float)
    cb = np.bincount(b, minlength=hi + 1).astype(float)
    both = ca + cb
    frac_a = a.size / (a.size + b.size)
    # merge adjacent values until each bin has enough expected mass in both rows
    bins_a, bins_b = [], []
    acc_a = acc_b = 0.0
    for k in range(hi + 1):
        acc_a += ca[k]
        acc_b += cb[k]
        tot = acc_a + acc_b
        if tot * min(frac_a, 1 - frac_a) >= min_expected:
            bins_a.append(acc_a)
            bins_b.append(acc_b)
            acc_a = acc_b = 0.0
    if acc_a + acc_b > 0:
        if bins_a:
            bins_a[-1] += acc_a
            bins_b[-1] += acc_b
        else:
            bins_a.append(acc_a)
            bins_b.append(acc_b)
    if len(bins_a) < 2:
        return 0.0, 1.0
    res = sps.chi2_contingency(np.array([bins_a, bins_b]), correction=False)
    return float(res.statistic), float(res.pvalue)


def ks_statistic(samples, cdf: Union[str, Callable]) -> float:
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 100:
        raise InsufficientData("KS statistic needs at least 100 samples")
    return float(sps.kstest(x, cdf).statistic)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    slope_stderr: float
    r_squared: float


def loglog_slope(points: Sequence[tuple[float, float]]) -> FitResult:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise InsufficientData("need at least three points")
    if np.any(pts <= 0):
        raise ValueError("log-log fit needs positive coordinates")
    r = sps.linregress(np.log(pts[:, 0]), np.log(pts[:, 1]))
    return FitResult(float(r.slope), float(r.intercept), float(r.stderr), float(r.rvalue ** 2))


def weighted_loglog_slope(x, y, y_stderr) -> FitResult:
    """Weighted least squares on (log x, log y) with weights from the stderr of log y."""
    x = np.log(np.asarray(x, dtype=np.float64))
    yv = np.asarray(y, dtype=np.float64)
    sig = np.asarray(y_stderr, dtype=np.float64) / yv
    ly = np.log(yv)
    if x.size < 3:
        raise InsufficientData("need at least three points")
    wts = 1.0 / sig ** 2
    X = np.column_stack([np.ones_like(x), x])
    cov = np.linalg.inv(X.T @ (X * wts[:, None]))
    beta = cov @ (X.T @ (wts * ly))
    resid = ly - X @ beta
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return FitResult(float(beta[1]), float(beta[0]), float(math.sqrt(cov[1, 1])), r2)
