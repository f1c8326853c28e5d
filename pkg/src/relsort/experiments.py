"""Deterministic Monte Carlo experiment runner with CSV output.

Every replicate owns a substream derived from the root seed and its grid
key, so results do not depend on scheduling and the output CSV is
byte-identical for a given configuration regardless of worker count.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, replace

import numpy as np

from . import discovery, metrics, scm
from .graphs import Dag
from .samplers import (Rng, chain_summary, has_mutual_reachability,
                       sample_er_dag, sample_sf_dag, sample_symmetric_summary,
                       total_order_summary, unroll)
from .sortability import (lower_bound_edge, r2_criterion, rel_criterion,
                          sortability, var_criterion)

EXPERIMENTS = ("heatmap", "schemes", "discovery", "timeseries", "bound")
CSV_COLUMNS = "experiment,graph,n,c,scheme,T,rep,seed,metric,value,reason"
BOUND_DECILES = 10

DISCOVERY_METHODS = ("rel", "var", "r2", "random", "oracle")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    graph: str = "er"
    n: tuple = (30,)
    c: tuple = (2.0,)
    reps: int = 10
    samples: int = 10000
    alpha: float = 0.05
    scheme: str = "all"
    T: tuple = ()
    seed: int = 0
    out: str = "results.csv"
    workers: int = 1
    signed_weights: bool = False

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.experiment == "timeseries":
            if self.graph not in ("er", "chain", "order"):
                raise ValueError("timeseries supports graph 'er', 'chain' or 'order'")
        elif self.graph not in ("er", "sf"):
            raise ValueError(f"unknown graph model {self.graph!r}")
        if not self.n or any(v < 1 for v in self.n):
            raise ValueError("n values must be positive")
        if not self.c or any(v <= 0 for v in self.c):
            raise ValueError("c values must be positive")
        if self.reps < 1 or self.samples < 1 or self.workers < 1:
            raise ValueError("counts must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.scheme not in scm.REGIMES + ("all",):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.experiment == "timeseries" and (not self.T or any(t < 2 for t in self.T)):
            raise ValueError("timeseries needs horizons T >= 2")


@dataclass(frozen=True)
class Record:
    experiment: str
    graph: str
    n: int
    c: float
    scheme: str = ""
    T: int | None = None
    rep: int | None = None  # None marks an aggregate row
    seed: int = 0
    metric: str = ""
    value: float | None = None
    reason: str = ""

    def sort_key(self):
        return (self.experiment, self.graph, self.n, self.c, self.scheme,
                -1 if self.T is None else self.T,
                (1, 0) if self.rep is None else (0, self.rep), self.metric)

    def csv_row(self) -> str:
        return ",".join([
            self.experiment, self.graph, str(self.n), repr(float(self.c)),
            self.scheme, "" if self.T is None else str(self.T),
            "all" if self.rep is None else str(self.rep), str(self.seed),
            self.metric, "NA" if self.value is None else repr(float(self.value)),
            self.reason,
        ])


# -- replicate tasks (module level so they pickle for worker pools) -----------

def _sample_graph(kind: str, n: int, c: float, rng: Rng):
    if n == 1:  # degenerate grid point, no edges to draw
        return Dag(np.zeros((1, 1), dtype=bool))
    return sample_er_dag(n, c, rng) if kind == "er" else sample_sf_dag(n, c, rng)


def _clamped(kind: str, n: int, c: float) -> bool:
    return kind == "er" and 2.0 * c / (n - 1) > 1.0


def _heatmap_rep(graph, n, c, rep, seed):
    base = Record("heatmap", graph, n, c, rep=rep, seed=seed, metric="rel_sortability")
    rng = Rng(seed).substream("heatmap", graph, n, float(c), rep)
    try:
        dag = _sample_graph(graph, n, c, rng)
    except ValueError:
        return [replace(base, reason="sampler_error")]
    if dag.num_edges == 0:
        return [replace(base, reason="empty_graph")]
    value = sortability(dag, rel_criterion(dag))
    return [replace(base, value=value, reason="p_clamped" if _clamped(graph, n, c) else "")]


def _schemes_rep(graph, n, c, m, alpha, schemes, signed, rep, seed):
    base = Record("schemes", graph, n, c, rep=rep, seed=seed)
    rng = Rng(seed).substream("schemes", graph, n, float(c), rep)
    try:
        dag = _sample_graph(graph, n, c, rng.substream("structure"))
    except ValueError:
        return [replace(base, scheme=s, metric="rel_sortability_oracle",
                        reason="sampler_error") for s in schemes]
    if dag.num_edges == 0:
        return [replace(base, scheme=s, metric="rel_sortability_oracle",
                        reason="empty_graph") for s in schemes]
    model = scm.sample_params(dag, rng.substream("params"), signed=signed)
    oracle = sortability(dag, rel_criterion(dag))
    out = []
    for scheme in schemes:
        data = scm.sample_observations(model, m, scheme, rng.substream("data", scheme))
        est = discovery.estimate_relative_counts(data, alpha)
        rows = {
            "rel_sortability_oracle": oracle,
            "rel_sortability_empirical": sortability(dag, est),
            "var_sortability": sortability(dag, var_criterion(data)),
            "r2_sortability": sortability(dag, r2_criterion(data)),
        }
        out.extend(replace(base, scheme=scheme, metric=k, value=v) for k, v in rows.items())
    return out


def _discovery_rep(graph, n, c, m, alpha, scheme, signed, rep, seed):
    base = Record("discovery", graph, n, c, scheme=scheme, rep=rep, seed=seed)
    rng = Rng(seed).substream("discovery", graph, n, float(c), rep)
    try:
        dag = _sample_graph(graph, n, c, rng.substream("structure"))
    except ValueError:
        return [replace(base, metric="sid_rel", reason="sampler_error")]
    model = scm.sample_params(dag, rng.substream("params"), signed=signed)
    data = scm.sample_observations(model, m, scheme, rng.substream("data"))
    orders = {
        "rel": discovery.estimate_relative_order(data, alpha),
        "var": discovery.criterion_order(var_criterion(data)),
        "r2": discovery.criterion_order(r2_criterion(data)),
        "random": rng.substream("order").generator.permutation(n),
        "oracle": np.asarray(dag.order),
    }
    out = []
    for name in DISCOVERY_METHODS:
        est = discovery.sort_n_regress(data, orders[name])
        out.append(replace(base, metric=f"sid_{name}", value=float(metrics.sid(dag, est))))
        out.append(replace(base, metric=f"shd_{name}", value=float(metrics.shd(dag, est))))
    return out


def _timeseries_rep(graph, p, c, horizons, rep, seed):
    base = Record("timeseries", graph, p, c, rep=rep, seed=seed)
    rng = Rng(seed).substream("timeseries", graph, p, float(c), rep)
    if graph == "chain":
        summary = chain_summary(p)
    elif graph == "order":
        summary = total_order_summary(p)
    else:
        summary = sample_symmetric_summary(p, c, rng)
    out = [replace(base, metric="mutual_reachability",
                   value=float(has_mutual_reachability(summary)))]
    for T in horizons:
        dag = unroll(summary, T)
        value = sortability(dag, rel_criterion(dag))
        out.append(replace(base, T=T, metric="rel_sortability", value=value))
    return out


def _bound_rep(n, c, rep, seed):
    """Per-graph decile-bucket tallies: (strict wins, ties, totals) over edges."""
    rng = Rng(seed).substream("bound", n, float(c), rep)
    dag = sample_er_dag(n, c, rng)
    counts = rel_criterion(dag)
    pos = np.empty(n, dtype=np.int64)
    pos[list(dag.order)] = np.arange(n)
    edges = dag.edges()
    wins = np.zeros((BOUND_DECILES, BOUND_DECILES), dtype=np.int64)
    ties = np.zeros_like(wins)
    totals = np.zeros_like(wins)
    if edges.shape[0] == 0:
        return wins, ties, totals
    dx = pos[edges[:, 0]] * BOUND_DECILES // n
    dy = pos[edges[:, 1]] * BOUND_DECILES // n
    head = counts[edges[:, 1]]
    tail = counts[edges[:, 0]]
    np.add.at(totals, (dx, dy), 1)
    np.add.at(wins, (dx, dy), (tail < head).astype(np.int64))
    np.add.at(ties, (dx, dy), (tail == head).astype(np.int64))
    return wins, ties, totals


_TASK_DISPATCH = {
    "heatmap": _heatmap_rep,
    "schemes": _schemes_rep,
    "discovery": _discovery_rep,
    "timeseries": _timeseries_rep,
    "bound": _bound_rep,
}


def _run_task(task):
    name, args = task
    return _TASK_DISPATCH[name](*args)


def _execute(tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with multiprocessing.Pool(workers) as pool:
        return pool.map(_run_task, tasks, chunksize=1)


# -- experiment drivers --------------------------------------------------------

def run_heatmap(cfg: ExperimentConfig) -> list:
    tasks = [("heatmap", (cfg.graph, n, c, rep, cfg.seed))
             for n in cfg.n for c in cfg.c for rep in range(cfg.reps)]
    records = [r for chunk in _execute(tasks, cfg.workers) for r in chunk]
    records.extend(_mean_rows(records, "rel_sortability"))
    return records


def _mean_rows(records, metric):
    cells: dict = {}
    for r in records:
        if r.metric == metric:
            cells.setdefault((r.graph, r.n, r.c, r.scheme), []).append(r)
    out = []
    for (graph, n, c, scheme), rows in sorted(cells.items()):
        values = [r.value for r in rows if r.value is not None]
        agg = Record(rows[0].experiment, graph, n, c, scheme=scheme, rep=None,
                     seed=rows[0].seed, metric=f"{metric}_mean")
        if values:
            out.append(replace(agg, value=float(np.mean(values))))
        else:
            out.append(replace(agg, reason="no_valid_replicates"))
    return out


def run_schemes(cfg: ExperimentConfig) -> list:
    schemes = scm.REGIMES if cfg.scheme == "all" else (cfg.scheme,)
    tasks = [("schemes", (cfg.graph, n, c, cfg.samples, cfg.alpha, schemes,
                          cfg.signed_weights, rep, cfg.seed))
             for n in cfg.n for c in cfg.c for rep in range(cfg.reps)]
    return [r for chunk in _execute(tasks, cfg.workers) for r in chunk]


def run_discovery(cfg: ExperimentConfig) -> list:
    scheme = "sscm" if cfg.scheme == "all" else cfg.scheme
    tasks = [("discovery", (cfg.graph, n, c, cfg.samples, cfg.alpha, scheme,
                            cfg.signed_weights, rep, cfg.seed))
             for n in cfg.n for c in cfg.c for rep in range(cfg.reps)]
    return [r for chunk in _execute(tasks, cfg.workers) for r in chunk]


def run_timeseries(cfg: ExperimentConfig) -> list:
    tasks = [("timeseries", (cfg.graph, p, c, cfg.T, rep, cfg.seed))
             for p in cfg.n for c in cfg.c for rep in range(cfg.reps)]
    return [r for chunk in _execute(tasks, cfg.workers) for r in chunk]


def run_bound(cfg: ExperimentConfig) -> list:
    records = []
    for n in cfg.n:
        for c in cfg.c:
            tasks = [("bound", (n, c, rep, cfg.seed)) for rep in range(cfg.reps)]
            tallies = _execute(tasks, cfg.workers)
            wins = sum(w for w, _, _ in tallies)
            totals = sum(t for _, _, t in tallies)
            records.extend(_bound_records(cfg, n, c, wins, totals))
    return records


def _bound_records(cfg, n, c, wins, totals):
    out = []
    base = Record("bound", cfg.graph, n, c, rep=None, seed=cfg.seed)
    for ix in range(BOUND_DECILES):
        for iy in range(ix, BOUND_DECILES):
            if totals[ix, iy] == 0:
                continue
            tag = f"qx{ix}_qy{iy}"
            emp = wins[ix, iy] / totals[ix, iy]
            bound = lower_bound_edge(
                c, ix / BOUND_DECILES, max(iy / BOUND_DECILES, ix / BOUND_DECILES + 1e-9))
            out.append(replace(base, metric=f"edges_{tag}", value=float(totals[ix, iy])))
            out.append(replace(base, metric=f"empirical_{tag}", value=float(emp)))
            out.append(replace(base, metric=f"bound_{tag}", value=float(bound)))
    return out


_RUNNERS = {
    "heatmap": run_heatmap,
    "schemes": run_schemes,
    "discovery": run_discovery,
    "timeseries": run_timeseries,
    "bound": run_bound,
}


def run_experiment(cfg: ExperimentConfig) -> list:
    cfg.validate()
    records = _RUNNERS[cfg.experiment](cfg)
    records.sort(key=Record.sort_key)
    return records


def write_records_csv(cfg: ExperimentConfig, records, path) -> None:
    """Write records with a provenance comment header.

    Worker count and output path are excluded from the header so reruns of
    the same configuration stay byte-identical.
    """
    lines = ["# relsort experiment output"]
    lines.append(f"# experiment={cfg.experiment}")
    lines.append(f"# graph={cfg.graph}")
    lines.append("# n=" + ",".join(str(v) for v in cfg.n))
    lines.append("# c=" + ",".join(repr(float(v)) for v in cfg.c))
    lines.append(f"# reps={cfg.reps}")
    lines.append(f"# samples={cfg.samples}")
    lines.append(f"# alpha={cfg.alpha!r}")
    lines.append(f"# scheme={cfg.scheme}")
    lines.append("# T=" + ",".join(str(v) for v in cfg.T))
    lines.append(f"# seed={cfg.seed}")
    lines.append(f"# signed_weights={cfg.signed_weights}")
    lines.append(CSV_COLUMNS)
    lines.extend(r.csv_row() for r in records)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
