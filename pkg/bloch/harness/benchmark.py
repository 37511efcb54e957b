import logging
import os
import time
from dataclasses import asdict, dataclass
from typing import Optional

import pandas as pd

from bloch.core.spectral import spectral_precompute
from bloch.core.system import DensityMatrix
from bloch.propagators.relaxation import build_relax_nut
from bloch.propagators.strategies import METHOD_NAMES, build_strategy
from bloch.splitting.fields import FieldSignal
from bloch.splitting.integrator import SplittingContext, StepPlan, simulate


logger = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_POSITIVITY_VIOLATED = "positivity_violated"
STATUS_ERROR = "error"

POSITIVITY_THRESHOLD = -1e-6


@dataclass(frozen=True)
class BenchmarkRow:
    method: str
    n_p: int
    n_levels: int
    wall_time: float
    per_step_time: float
    liouville_step_time: float
    offline_time: float
    final_trace_error: float
    min_eigenvalue_overall: float
    status: str
    max_deviation: Optional[float] = None
    error: Optional[str] = None

    @classmethod
    def failed(cls, method, n_p, n_levels, error):
        # Report the strategy error rather than its step wrapper
        cause = getattr(error, "cause", error)
        nan = float("nan")
        return cls(method, n_p, n_levels, nan, nan, nan, nan, nan, nan, STATUS_ERROR, error=f"{type(cause).__name__}: {error}")

    def with_deviation(self, deviation):
        return BenchmarkRow(**{**asdict(self), "max_deviation": deviation})

    def to_dict(self):
        return asdict(self)


def positivity_status(min_eigenvalue):
    return STATUS_POSITIVITY_VIOLATED if min_eigenvalue < POSITIVITY_THRESHOLD else STATUS_OK


class MethodBenchmarker:
    """Runs one Liouville strategy over a periodic grid and times it.

    The offline phase (eigendecomposition, Newton basis, relaxation
    propagator) is timed apart from the stepping, and only the Strang steps
    count towards the wall time; diagnostics are recorded outside the timed
    region.
    """

    def __init__(self, method, system, n_p, periods, signal=None, rho0=None, stride=1, **strategy_kwargs):
        self._method = method
        self._system = system
        self._n_p = n_p
        self._periods = periods
        self._signal = FieldSignal.sinusoid() if signal is None else signal
        self._rho0 = DensityMatrix.pure(system.n_levels) if rho0 is None else rho0
        self._stride = stride
        self._strategy_kwargs = strategy_kwargs

        self._trajectory = None
        self._benchmark_results = None

    @property
    def trajectory(self):
        return self._trajectory

    @property
    def row(self):
        return self._benchmark_results

    def benchmark(self):
        plan = StepPlan.periodic(self._n_p, self._periods, stride=self._stride)
        logger.info(f"Running {METHOD_NAMES[self._method]} at n_p={self._n_p}, N={self._system.n_levels}...")

        start_time = time.perf_counter()
        spec = spectral_precompute(self._system)
        strategy = build_strategy(self._method, spec, **self._strategy_kwargs)
        ctx = SplittingContext(build_relax_nut(self._system, plan.dt), strategy, self._signal)
        offline_time = time.perf_counter() - start_time

        self._trajectory = simulate(ctx, self._rho0, plan)
        wall_time = self._trajectory.step_time
        min_eigenvalue = self._trajectory.min_eigenvalue

        self._benchmark_results = BenchmarkRow(
            method=self._method,
            n_p=self._n_p,
            n_levels=self._system.n_levels,
            wall_time=wall_time,
            per_step_time=wall_time / max(1, plan.n_steps),
            liouville_step_time=self._trajectory.liouville_time / max(1, plan.n_steps),
            offline_time=offline_time,
            final_trace_error=float(self._trajectory.diagnostics[-1, 1]),
            min_eigenvalue_overall=min_eigenvalue,
            status=positivity_status(min_eigenvalue),
        )

        return self._benchmark_results

    def save(self, path):
        results_df = self._to_df()
        results_df.to_csv(os.path.join(path, f"{self._get_df_name()}.csv"), index=False)

    def _get_description(self):
        return {"periods": self._periods, "stride": self._stride, **self._strategy_kwargs}

    def _get_df_name(self):
        return f"{self._method}_{self._system.n_levels}_{self._n_p}_{self._periods}"

    def _to_df(self):
        assert self._benchmark_results is not None
        return pd.DataFrame([{**self._benchmark_results.to_dict(), **self._get_description()}])


def rows_to_df(rows):
    return pd.DataFrame([row.to_dict() for row in rows])
