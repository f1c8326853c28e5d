"""Order-based causal discovery: estimating a causal order from the number
of relatives implied by thresholded correlations, and recovering adjacencies
along an order with adaptively weighted L1 regression and BIC selection."""

from __future__ import annotations

import math
import warnings

import numpy as np

from .graphs import Dag
from .sortability import NumericalFallbackWarning

MAX_SWEEPS = 10_000
CD_TOL = 1e-8


def correlation_matrix(data: np.ndarray) -> np.ndarray:
    """Pearson correlations of the columns; rejects constant columns."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError("correlation needs a 2-D matrix with m >= 2 rows")
    sd = data.std(axis=0, ddof=1)
    if (sd == 0).any():
        j = int(np.flatnonzero(sd == 0)[0])
        raise ValueError(f"column {j} is constant")
    corr = np.atleast_2d(np.corrcoef(data, rowvar=False))
    np.fill_diagonal(corr, 1.0)
    return corr


def correlation_threshold(m: int, alpha: float) -> float:
    """Minimum absolute sample correlation that is significant at level alpha.

    Under independence, C*sqrt((m-2)/(1-C^2)) is Student-t with m-2 degrees
    of freedom; inverting the two-sided test gives eps = t/sqrt(m-2+t^2).
    """
    if m < 4:
        raise ValueError("threshold needs at least m = 4 samples")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    df = m - 2
    t = _student_t_quantile(1.0 - alpha / 2.0, df)
    return t / math.sqrt(df + t * t)


def estimate_relative_counts(data: np.ndarray, alpha: float) -> np.ndarray:
    """Per-column count of significant absolute correlations.

    The diagonal always counts, uniformly for every column, so it cancels
    in comparisons between nodes.
    """
    corr = correlation_matrix(data)
    eps = correlation_threshold(data.shape[0], alpha)
    return (np.abs(corr) > eps).sum(axis=0)


def estimate_relative_order(data: np.ndarray, alpha: float) -> np.ndarray:
    """Order nodes by their estimated number of relatives, ascending,
    ties broken by node index."""
    return np.argsort(estimate_relative_counts(data, alpha), kind="stable")


def criterion_order(values) -> np.ndarray:
    """Ascending stable argsort of a per-node criterion, ties by index."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1:
        raise ValueError("criterion must be a 1-D vector")
    if not np.isfinite(values).all():
        raise ValueError("criterion values must be finite")
    return np.argsort(values, kind="stable")


def ols(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares coefficients via pivoted normal equations.

    Rank-deficient predictors fall back to a 1e-10 ridge with a warning.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-D")
    p = X.shape[1]
    if p == 0:
        return np.zeros(0)
    gram = X.T @ X
    rhs = X.T @ y
    if np.linalg.matrix_rank(gram, hermitian=True) < p:
        warnings.warn("rank-deficient predictors, adding 1e-10 ridge",
                      NumericalFallbackWarning, stacklevel=2)
        gram = gram + 1e-10 * np.eye(p)
    return np.linalg.solve(gram, rhs)


def adaptive_lasso_bic(X: np.ndarray, y: np.ndarray, beta_ols: np.ndarray) -> np.ndarray:
    """Weighted L1 regression with the penalty weight 1/|beta_ols| per
    coefficient, the penalty strength chosen by BIC over a 50-point log
    grid below the smallest all-zero lambda.

    Coefficients whose least-squares estimate is exactly zero carry an
    infinite penalty and stay zero.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    beta_ols = np.asarray(beta_ols, dtype=np.float64)
    if not (np.isfinite(X).all() and np.isfinite(y).all() and np.isfinite(beta_ols).all()):
        raise ValueError("inputs must be finite")
    m, p = X.shape
    out = np.zeros(p)
    active = np.flatnonzero(beta_ols != 0)
    if active.size == 0:
        return out
    Xa = X[:, active]
    pen = 1.0 / np.abs(beta_ols[active])
    gram = Xa.T @ Xa
    rhs = Xa.T @ y
    yty = float(y @ y)

    lam_max = float(np.max(2.0 * np.abs(rhs) / pen))
    if lam_max <= 0 or not math.isfinite(lam_max):
        return out
    grid = np.geomspace(lam_max, 1e-4 * lam_max, 50)
    snap = 1e-12 * np.abs(beta_ols[active])  # below this a coefficient is noise

    beta = np.zeros(active.size)
    prod = np.zeros(active.size)  # gram @ beta, maintained incrementally
    log_m = math.log(m)
    # the all-zero model (the lam_max point) always competes
    best_bic = m * math.log(yty / m) if yty > 0 else -math.inf
    best_beta = beta.copy()
    for lam in grid:
        _coordinate_descent(gram, rhs, beta, prod, lam, pen)
        ghosts = (np.abs(beta) < snap) & (beta != 0)
        if ghosts.any():
            beta[ghosts] = 0.0
            prod[:] = gram @ beta
        rss = max(yty - 2.0 * float(rhs @ beta) + float(beta @ prod), 1e-300)
        k = int(np.count_nonzero(beta))
        bic = m * math.log(rss / m) + k * log_m
        if bic < best_bic:
            best_bic = bic
            best_beta = beta.copy()
    out[active] = best_beta
    return out


def _coordinate_descent(gram, rhs, beta, prod, lam, pen) -> None:
    """Cyclic soft-thresholding sweeps on ||y - X b||^2 + lam * sum pen_i |b_i|.

    Updates beta and prod = gram @ beta in place; stops when the largest
    coefficient change in a sweep drops below CD_TOL.
    """
    p = beta.size
    diag = np.diagonal(gram)
    for _ in range(MAX_SWEEPS):
        delta = 0.0
        for i in range(p):
            old = beta[i]
            rho = rhs[i] - prod[i] + diag[i] * old
            thr = 0.5 * lam * pen[i]
            if abs(rho) <= thr:
                new = 0.0
            else:
                new = (rho - math.copysign(thr, rho)) / diag[i]
            if new != old:
                step = new - old
                prod += gram[:, i] * step
                beta[i] = new
                delta = max(delta, abs(step))
        if delta < CD_TOL:
            break


def sort_n_regress(data: np.ndarray, order) -> Dag:
    """Recover adjacencies along an order by sparse regression.

    Standardizes the data, then regresses each variable on all of its
    predecessors; surviving coefficients become edges.  The result is
    acyclic and consistent with the order by construction.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("data must be a 2-D matrix")
    n = data.shape[1]
    order = np.asarray(order, dtype=np.int64)
    if sorted(order.tolist()) != list(range(n)):
        raise ValueError("order must be a permutation of 0..n-1")
    if n == 1:
        return Dag(np.zeros((1, 1), dtype=bool), order=order)

    sd = data.std(axis=0, ddof=1)
    if (sd == 0).any():
        j = int(np.flatnonzero(sd == 0)[0])
        raise ValueError(f"column {j} is constant")
    z = (data - data.mean(axis=0)) / sd

    adj = np.zeros((n, n), dtype=bool)
    for j in range(1, n):
        target = order[j]
        pred = order[:j]
        Xp = z[:, pred]
        y = z[:, target]
        beta = adaptive_lasso_bic(Xp, y, ols(Xp, y))
        adj[pred[beta != 0], target] = True
    return Dag(adj, order=order)


def rel_sort_n_regress(data: np.ndarray, alpha: float = 0.05) -> Dag:
    """Full pipeline: order by estimated relatives, then regress in order."""
    return sort_n_regress(data, estimate_relative_order(data, alpha))


# -- Student-t quantile via the regularized incomplete beta function ----------

def _student_t_quantile(q: float, df: int) -> float:
    """Upper quantile (q >= 1/2) of the t distribution, by bisection to 1e-12."""
    if not 0.5 <= q < 1:
        raise ValueError("quantile level must lie in [0.5, 1)")
    if q == 0.5:
        return 0.0
    hi = 1.0
    while _student_t_cdf(hi, df) < q:
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("t quantile bracket failed")
    lo = 0.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if _student_t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _student_t_cdf(t: float, df: int) -> float:
    x = df / (df + t * t)
    tail = 0.5 * _betainc_reg(0.5 * df, 0.5, x)
    return 1.0 - tail if t >= 0 else tail


def _betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), continued-fraction evaluation."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction of the incomplete beta, modified Lentz iteration."""
    tiny = 1e-30
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 200):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        ratio = d * c
        h *= ratio
        if abs(ratio - 1.0) < 1e-15:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")
