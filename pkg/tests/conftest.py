import sys
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from relsort import Rng, sample_er_dag, sample_sf_dag
from relsort.samplers import ProbabilityClampWarning

import oracles


def random_dag_corpus(count: int, seed: int, max_n: int = 50, max_c: float = 10.0):
    """Mixed ER/SF corpus with the sizes and densities used everywhere."""
    rng = Rng(seed)
    dags = []
    i = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ProbabilityClampWarning)
        while len(dags) < count:
            sub = rng.substream("corpus", i)
            n = int(sub.generator.integers(3, max_n + 1))
            c = float(sub.generator.uniform(0.5, max_c))
            if i % 2 == 0:
                dag = sample_er_dag(n, c, sub.substream("er"))
            else:
                c_sf = max(1, min(n - 1, int(round(c))))
                dag = sample_sf_dag(n, c_sf, sub.substream("sf"))
            dags.append(dag)
            i += 1
    return dags


@pytest.fixture(scope="session")
def corpus_200():
    return random_dag_corpus(200, seed=11)


@pytest.fixture(scope="session")
def corpus_1000():
    return random_dag_corpus(1000, seed=101)


@pytest.fixture(scope="session")
def all_dags_by_n():
    return {n: oracles.all_dags(n) for n in range(1, 6)}


@pytest.fixture(scope="session")
def small_er_corpus():
    """Small random DAGs handy for oracle comparisons."""
    rng = Rng(23)
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ProbabilityClampWarning)
        for i in range(150):
            n = int(rng.substream("n", i).generator.integers(3, 7))
            out.append(sample_er_dag(n, 1.5, rng.substream("g", i)))
    return out
