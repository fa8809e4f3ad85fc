"""Statistical helpers: correlation, least squares, distance covariance.

Distance covariance detects arbitrary (not just linear) dependence between
paired samples; its significance is assessed by a permutation test. The
estimator here is the biased double-centered form, whose square can be
written as a mean over all index pairs of products of centered distance
matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as _sstats

from .errors import DataError, DegenerateSeriesError


def _paired(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise DataError("expected 1-D samples")
    if x.shape != y.shape:
        raise DataError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.size < 2:
        raise DataError("need at least 2 paired observations")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise DataError("samples contain non-finite values")
    return x, y


def pearson(x, y) -> float:
    """Pearson correlation, clamped to [-1, 1].

    The denominator is computed as sqrt(ss_x * ss_y) so that a series paired
    with itself yields exactly 1.0.
    """
    x, y = _paired(x, y)
    dx = x - x.mean()
    dy = y - y.mean()
    ssx = float(dx @ dx)
    ssy = float(dy @ dy)
    if ssx == 0.0 or ssy == 0.0:
        raise DegenerateSeriesError("constant sample has no correlation")
    r = float(dx @ dy) / float(np.sqrt(ssx * ssy))
    return min(1.0, max(-1.0, r))


@dataclass(frozen=True)
class OLSResult:
    """Least-squares fit y ~ intercept + X @ coef."""

    coef: np.ndarray            # per-regressor slopes
    intercept: float
    r_squared: float
    f_stat: float
    f_pvalue: float
    t_stats: np.ndarray
    t_pvalues: np.ndarray       # two-sided, per regressor
    n: int

    def bonferroni(self, m: int) -> np.ndarray:
        """p-values adjusted for m comparisons (annotation only)."""
        return np.minimum(np.asarray(self.t_pvalues) * m, 1.0)


def ols(X, y) -> OLSResult:
    """Ordinary least squares with intercept, R^2, F-test, and t-tests."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DataError("X must be (n, k) and y (n,) with matching n")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise DataError("regression inputs contain non-finite values")
    n, k = X.shape
    if n < k + 2:
        raise DataError(f"need at least {k + 2} observations for {k} regressors")
    A = np.column_stack([np.ones(n), X])
    beta, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    if rank < k + 1:
        raise DegenerateSeriesError("design matrix is rank-deficient")
    resid = y - A @ beta
    ss_res = float(resid @ resid)
    dy = y - y.mean()
    ss_tot = float(dy @ dy)
    if ss_tot == 0.0:
        raise DegenerateSeriesError("response is constant")
    r2 = 1.0 - ss_res / ss_tot
    df_res = n - k - 1
    if ss_res == 0.0:
        f_stat, f_p = float("inf"), 0.0
        t_stats = np.full(k, np.inf)
        t_p = np.zeros(k)
    else:
        f_stat = (ss_tot - ss_res) / k / (ss_res / df_res)
        f_p = float(_sstats.f.sf(f_stat, k, df_res))
        sigma2 = ss_res / df_res
        cov = sigma2 * np.linalg.inv(A.T @ A)
        se = np.sqrt(np.diag(cov))[1:]
        t_stats = beta[1:] / se
        t_p = 2.0 * _sstats.t.sf(np.abs(t_stats), df_res)
    return OLSResult(
        coef=beta[1:].copy(),
        intercept=float(beta[0]),
        r_squared=r2,
        f_stat=float(f_stat),
        f_pvalue=float(f_p),
        t_stats=np.asarray(t_stats, dtype=float),
        t_pvalues=np.asarray(t_p, dtype=float),
        n=n,
    )


def _centered_distances(x: np.ndarray) -> np.ndarray:
    d = np.abs(x[:, None] - x[None, :])
    return d - d.mean(axis=0, keepdims=True) - d.mean(axis=1, keepdims=True) + d.mean()


def distance_covariance(x, y) -> float:
    """Sample distance covariance (biased estimator, scalar samples).

    dCov^2 = mean_jk(A_jk * B_jk) with A, B the double-centered absolute
    distance matrices. Zero iff (in the population) x and y are independent.
    """
    x, y = _paired(x, y)
    A = _centered_distances(x)
    B = _centered_distances(y)
    v2 = float((A * B).mean())
    return float(np.sqrt(max(v2, 0.0)))


def distance_correlation(x, y) -> float:
    """Distance covariance normalized by the geometric mean of the variances."""
    x, y = _paired(x, y)
    A = _centered_distances(x)
    B = _centered_distances(y)
    vx = float((A * A).mean())
    vy = float((B * B).mean())
    if vx == 0.0 or vy == 0.0:
        raise DegenerateSeriesError("constant sample has no distance correlation")
    v2 = float((A * B).mean())
    r2 = max(v2, 0.0) / np.sqrt(vx * vy)
    return float(np.sqrt(min(max(r2, 0.0), 1.0)))


def permutation_test(
    x,
    y,
    statistic=distance_covariance,
    n_permutations: int = 999,
    seed: int | None = None,
) -> tuple[float, float]:
    """(observed statistic, p-value) under permutations of y.

    p = (1 + #{permuted >= observed}) / (n_permutations + 1), so the smallest
    attainable p is 1/(n_permutations + 1).
    """
    x, y = _paired(x, y)
    if n_permutations < 1:
        raise DataError("need at least one permutation")
    observed = float(statistic(x, y))
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(n_permutations):
        if float(statistic(x, rng.permutation(y))) >= observed:
            hits += 1
    return observed, (1 + hits) / (n_permutations + 1)
