"""Linear additive-Gaussian structural causal models and observation sampling.

Data matrices are plain (m, n) float arrays, column j holding the
observations of node j.  Three generation regimes are supported: raw
simulation, post-hoc column standardization ("sscm"), and per-variable
standardization during generation ("iscm").
"""

from __future__ import annotations

import numpy as np

from .graphs import Dag
from .samplers import Rng

REGIMES = ("raw", "sscm", "iscm")


class LinearScm:
    """DAG plus edge weights and per-node noise standard deviations.

    The weight matrix support must match the DAG's edge set exactly, and
    noise scales must be strictly positive.
    """

    __slots__ = ("dag", "weights", "noise_scale")

    def __init__(self, dag: Dag, weights, noise_scale):
        weights = np.array(weights, dtype=np.float64)
        noise_scale = np.array(noise_scale, dtype=np.float64)
        if weights.shape != (dag.n, dag.n):
            raise ValueError(f"weights must be {dag.n}x{dag.n}, got {weights.shape}")
        if noise_scale.shape != (dag.n,):
            raise ValueError(f"noise_scale must have length {dag.n}")
        if ((weights != 0) != dag.adj).any():
            raise ValueError("weight support must equal the DAG edge set")
        if not (noise_scale > 0).all():
            raise ValueError("noise scales must be strictly positive")
        weights.setflags(write=False)
        noise_scale.setflags(write=False)
        self.dag = dag
        self.weights = weights
        self.noise_scale = noise_scale

    def __repr__(self) -> str:
        return f"LinearScm(n={self.dag.n}, edges={self.dag.num_edges})"


def sample_params(dag: Dag, rng: Rng, signed: bool = False) -> LinearScm:
    """Draw edge weights and noise scales independently from Unif(0.5, 1).

    Weights are positive by default; ``signed`` flips each sign with
    probability one half.
    """
    gen = rng.generator
    n = dag.n
    weights = np.zeros((n, n))
    tails, heads = np.nonzero(dag.adj)
    vals = gen.uniform(0.5, 1.0, size=tails.size)
    if signed:
        vals *= gen.choice([-1.0, 1.0], size=tails.size)
    weights[tails, heads] = vals
    noise_scale = gen.uniform(0.5, 1.0, size=n)
    return LinearScm(dag, weights, noise_scale)


def sample_observations(scm: LinearScm, m: int, regime: str, rng: Rng) -> np.ndarray:
    """Simulate m observations in topological order.

    regime="raw" returns the simulation as-is, "sscm" standardizes every
    column after full generation, "iscm" standardizes each variable right
    after it is generated, before any child consumes it.
    """
    if m < 1:
        raise ValueError("need at least one observation")
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}, expected one of {REGIMES}")
    gen = rng.generator
    n = scm.dag.n
    eps = gen.standard_normal((m, n))
    data = np.empty((m, n))
    for v in scm.dag.order:
        pa = np.flatnonzero(scm.dag.adj[:, v])
        col = scm.noise_scale[v] * eps[:, v]
        if pa.size:
            col = col + data[:, pa] @ scm.weights[pa, v]
        if regime == "iscm":
            col = _standardize_column(col, v)
        data[:, v] = col
    if regime == "sscm":
        for j in range(n):
            data[:, j] = _standardize_column(data[:, j], j)
    if not np.isfinite(data).all():
        raise ValueError("generated data contains non-finite values")
    return data


def _standardize_column(col: np.ndarray, j: int) -> np.ndarray:
    sd = col.std(ddof=1) if col.size > 1 else 0.0
    if not sd > 0:
        raise ValueError(f"column {j} has zero sample variance, cannot standardize")
    return (col - col.mean()) / sd


def population_covariance(scm: LinearScm) -> np.ndarray:
    """Exact covariance of the raw regime: (I-W)^-T diag(sigma^2) (I-W)^-1."""
    n = scm.dag.n
    inv = np.linalg.inv(np.eye(n) - scm.weights)
    return inv.T @ np.diag(scm.noise_scale**2) @ inv


def write_data_csv(data: np.ndarray, path) -> None:
    """Headered CSV (x0,...,x{n-1}) with 17-significant-digit floats."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("data must be a 2-D matrix")
    header = ",".join(f"x{j}" for j in range(data.shape[1]))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(header + "\n")
        for row in data:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_data_csv(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        if not all(name == f"x{j}" for j, name in enumerate(header)):
            raise ValueError("unexpected data CSV header")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[1] != len(header):
        raise ValueError("data CSV width does not match its header")
    return data
