import os
from pathlib import Path

import numpy as np

from bloch.core.system import ladder_system, three_level_system
from bloch.harness.benchmark import MethodBenchmarker
from bloch.errors import BlochError
from bloch.harness.config import random_gapped_polarizability
from bloch.propagators.strategies import EXP_SERIES, METHODS, METHOD_EXPONENTIAL, METHOD_NEWTON


def run_three_level(periods=2000):
    path = os.path.join(Path(__file__).parent.parent, "results/benchmarks/three_level")
    os.makedirs(path, exist_ok=True)
    n_p_list = [5, 10, 20, 100]
    system = three_level_system()

    for n_p in n_p_list:
        for method in METHODS:
            benchmarker = MethodBenchmarker(method, system, n_p, periods, stride=n_p)
            try:
                benchmarker.benchmark()
            except BlochError as error:
                print(f"{method} at n_p={n_p} failed: {error}")
                continue
            benchmarker.save(path)


def run_scaling(periods=2000, seed=0):
    path = os.path.join(Path(__file__).parent.parent, "results/benchmarks/scaling")
    os.makedirs(path, exist_ok=True)
    levels = [2, 3, 4, 5, 10]
    n_p = 20

    for n_levels in levels:
        system = ladder_system(random_gapped_polarizability(n_levels, np.random.default_rng([seed, n_levels])))
        for method in [METHOD_EXPONENTIAL, METHOD_NEWTON]:
            benchmarker = MethodBenchmarker(method, system, n_p, periods, stride=n_p, evaluator=EXP_SERIES)
            benchmarker.benchmark()
            benchmarker.save(path)


if __name__ == "__main__":
    run_three_level()
    run_scaling()
