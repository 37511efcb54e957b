import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from bloch.core.spectral import spectral_precompute
from bloch.core.system import DensityMatrix, degenerate_polarizability, ladder_system, three_level_system
from bloch.errors import BlochError
from bloch.harness.benchmark import BenchmarkRow, MethodBenchmarker, rows_to_df
from bloch.harness.config import build_polarizability, build_relaxation, build_system, random_gapped_polarizability
from bloch.harness.io import emit_csv
from bloch.propagators.nsfd import nsfd_report
from bloch.propagators.strategies import EXP_SERIES, METHOD_CANONICAL, METHOD_EXPONENTIAL, METHOD_NEWTON
from bloch.splitting.convergence import convergence_errors, fit_order
from bloch.splitting.fields import FieldSignal
from bloch.splitting.integrator import build_context


logger = logging.getLogger(__name__)

DEGENERATE_METHODS = (METHOD_EXPONENTIAL, METHOD_NEWTON, METHOD_CANONICAL)
SCALING_METHODS = (METHOD_EXPONENTIAL, METHOD_NEWTON)


@dataclass
class ComparisonReport:
    rows: list
    trajectories: dict = field(default_factory=dict, repr=False)

    def row(self, method):
        return next(row for row in self.rows if row.method == method)

    def to_df(self):
        return rows_to_df(self.rows)


@dataclass
class ConvergenceReport:
    method: str
    dt_list: tuple
    errors: list
    order: float

    def to_df(self):
        return pd.DataFrame({"method": self.method, "dt": self.dt_list, "error": self.errors})


def _benchmark(method, system, cfg, n_p=None, periods=None):
    benchmarker = MethodBenchmarker(method, system, n_p or cfg.n_p, periods or cfg.resolved_periods,
                                    stride=cfg.record_stride, **cfg.strategy_kwargs)
    benchmarker.benchmark()
    return benchmarker


def _benchmark_or_fail(method, system, cfg, n_p=None, periods=None):
    try:
        benchmarker = _benchmark(method, system, cfg, n_p, periods)
        return benchmarker.row, benchmarker.trajectory
    except BlochError as error:
        logger.info(f"{method} at n_p={n_p or cfg.n_p} failed: {error}")
        return BenchmarkRow.failed(method, n_p or cfg.n_p, system.n_levels, error), None


def _map(function, items, parallel):
    if parallel:
        with ThreadPoolExecutor() as executor:
            return list(executor.map(function, items))
    return [function(item) for item in items]


def _with_deviations(results, reference):
    rows = []
    for row, trajectory in results:
        if trajectory is not None and reference is not None:
            row = row.with_deviation(trajectory.max_deviation(reference))
        rows.append(row)
    return rows


def run_three_level(cfg):
    system = three_level_system(relaxation=build_relaxation(cfg, 3))
    benchmarker = _benchmark(cfg.method, system, cfg)

    if cfg.output_path is not None:
        emit_csv(benchmarker.trajectory, cfg.output_path)

    return benchmarker.trajectory, benchmarker.row


def run_custom(cfg):
    system = build_system(cfg)
    benchmarker = _benchmark(cfg.method, system, cfg)

    if cfg.output_path is not None:
        emit_csv(benchmarker.trajectory, cfg.output_path)

    return benchmarker.trajectory, benchmarker.row


def run_degenerate(cfg):
    """Compares the exact strategies on a polarizability with a double eigenvalue.

    Failures are recorded per method and never abort the comparison.
    """
    system = three_level_system(degenerate_polarizability(), build_relaxation(cfg, 3))
    results = _map(lambda method: _benchmark_or_fail(method, system, cfg), DEGENERATE_METHODS, cfg.parallel)
    trajectories = {method: trajectory for method, (_, trajectory) in zip(DEGENERATE_METHODS, results) if trajectory is not None}

    return ComparisonReport(_with_deviations(results, trajectories.get(METHOD_EXPONENTIAL)), trajectories)


def run_scaling(cfg):
    rows = []
    for n_levels in cfg.levels:
        rng = np.random.default_rng([cfg.seed, n_levels])
        system = ladder_system(random_gapped_polarizability(n_levels, rng))
        for method in SCALING_METHODS:
            benchmarker = MethodBenchmarker(method, system, cfg.n_p, cfg.resolved_periods, stride=cfg.record_stride,
                                            evaluator=EXP_SERIES)
            rows.append(benchmarker.benchmark())

    return rows


def run_crank_nicolson_table(cfg):
    system = three_level_system(relaxation=build_relaxation(cfg, 3))

    rows = []
    for n_p in cfg.n_p_list:
        reference = _benchmark_or_fail(METHOD_EXPONENTIAL, system, cfg, n_p)
        others = [method for method in cfg.methods if method != METHOD_EXPONENTIAL]
        results = [reference] + [_benchmark_or_fail(method, system, cfg, n_p) for method in others]
        rows.extend(_with_deviations(results, reference[1]))

    return rows


def run_convergence(cfg):
    system = three_level_system(relaxation=build_relaxation(cfg, 3))
    spec = spectral_precompute(system)
    signal = FieldSignal.sinusoid()
    rho0 = DensityMatrix.pure(3)

    def ctx_factory(dt):
        return build_context(system, signal, dt, cfg.method, spec, **cfg.strategy_kwargs)

    def reference_factory(dt):
        return build_context(system, signal, dt, METHOD_EXPONENTIAL, spec)

    t_end = float(cfg.resolved_periods)
    errors = convergence_errors(ctx_factory, rho0, t_end, cfg.dt_list, reference_factory, cfg.reference_refinement, cfg.parallel)

    return ConvergenceReport(cfg.method, cfg.dt_list, errors, fit_order(cfg.dt_list, errors))


def run_nsfd_sweep(cfg, e_field=1.0):
    spec = spectral_precompute(build_polarizability(cfg))
    rows = []
    for dt in cfg.dt_list:
        report = nsfd_report(dt * e_field, dt, e_field, spec)
        row = report.to_dict()
        row["phi_defect"] = abs(report.phi_over_dt - 1)
        if report.canonical is not None:
            row["xi_defect"] = abs(report.canonical.xi - 0.5)
        rows.append(row)

    return pd.DataFrame(rows)
