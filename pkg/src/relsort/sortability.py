"""Sortability of a DAG under a per-node criterion, the concrete criteria
(relatives count, variance, R^2), and the ER edge-level lower bound."""

from __future__ import annotations

import math
import warnings

import numpy as np

from .graphs import Dag


class SortabilityUndefinedError(ValueError):
    """Sortability is undefined for graphs without edges."""


class NumericalFallbackWarning(UserWarning):
    """A degenerate input triggered a documented numerical fallback."""


def sortability(g: Dag, rho) -> float:
    """Fraction of edges ascending under rho, ties weighted one half.

    1 means sorting by rho recovers a causal order, 0 an inverse order,
    and 1/2 a random guess.  Criterion values are compared exactly; the
    criteria produced here are integer counts or generic reals where ties
    have measure zero.
    """
    rho = _check_criterion(g.n, rho)
    edges = g.edges()
    if edges.shape[0] == 0:
        raise SortabilityUndefinedError("sortability is undefined for an empty edge set")
    tail = rho[edges[:, 0]]
    head = rho[edges[:, 1]]
    wins = np.count_nonzero(tail < head)
    ties = np.count_nonzero(tail == head)
    return (wins + 0.5 * ties) / edges.shape[0]


def _check_criterion(n: int, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.float64)
    if rho.shape != (n,):
        raise ValueError(f"criterion must have one value per node, got shape {rho.shape}")
    if not np.isfinite(rho).all():
        raise ValueError("criterion values must be finite")
    return rho


def rel_criterion(g: Dag) -> np.ndarray:
    """Number of relatives of every node (the oracle criterion)."""
    return g.relatives_counts()


def var_criterion(data: np.ndarray) -> np.ndarray:
    """Sample variance of every column (denominator m - 1)."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError("variance criterion needs a 2-D matrix with m >= 2 rows")
    return data.var(axis=0, ddof=1)


def r2_criterion(data: np.ndarray) -> np.ndarray:
    """R^2 of the least-squares regression of each column on all others.

    Uses the correlation-matrix identity R^2_j = 1 - 1/(C^-1)_jj; a
    degenerate correlation matrix falls back to a small ridge on the
    diagonal (with a warning).
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("R^2 criterion needs a 2-D matrix")
    m, n = data.shape
    if m <= n:
        raise ValueError(f"R^2 criterion needs more rows than columns (m={m}, n={n})")
    if n == 1:
        return np.zeros(1)
    sd = data.std(axis=0, ddof=1)
    if (sd == 0).any():
        j = int(np.flatnonzero(sd == 0)[0])
        raise ValueError(f"column {j} is constant")
    corr = np.corrcoef(data, rowvar=False)
    degenerate = not np.isfinite(corr).all() or np.linalg.cond(corr) > 1e12
    if degenerate:
        warnings.warn("degenerate correlation matrix, adding 1e-8 ridge",
                      NumericalFallbackWarning, stacklevel=2)
        corr = corr + 1e-8 * np.eye(n)
    inv_diag = np.diagonal(np.linalg.inv(corr))
    return 1.0 - 1.0 / inv_diag


def lower_bound_edge(c: float, q_x: float, q_y: float) -> float:
    """Limiting lower bound on the probability that an ER edge between
    quantile positions q_x < q_y strictly ascends in relatives count."""
    if c <= 0:
        raise ValueError("density parameter c must be positive")
    if not 0 <= q_x < q_y <= 1:
        raise ValueError(f"need 0 <= q_x < q_y <= 1, got q_x={q_x}, q_y={q_y}")
    raw = 1.0 - math.exp(math.exp(-2.0 * c * q_y) - math.exp(-2.0 * c * q_x))
    return max(raw, 0.5)
