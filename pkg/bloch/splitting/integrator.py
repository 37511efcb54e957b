import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
import torch

from bloch.core.linalg import diagnostics, max_norm
from bloch.core.spectral import spectral_precompute
from bloch.errors import NumericalError, StepFailure
from bloch.propagators.relaxation import build_relax_nut, relax_nut_half_step
from bloch.propagators.strategies import build_strategy, liouville_step
from bloch.splitting.fields import field_average


logger = logging.getLogger(__name__)

DIAGNOSTIC_COLUMNS = ["hermiticity_defect", "trace_error", "min_eigenvalue"]


@dataclass(frozen=True)
class StepPlan:
    """Uniform time grid t_k = t0 + k * dt, k = 0, ..., n_steps.

    With stride s only the steps 0, s, 2s, ... and the last one are recorded.
    """

    dt: float
    n_steps: int
    t0: float = 0.0
    n_p: Optional[int] = None
    stride: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"time step must be positive, got {self.dt}")
        if self.n_steps < 0:
            raise ValueError(f"number of steps must be nonnegative, got {self.n_steps}")
        if self.stride < 1:
            raise ValueError(f"record stride must be at least 1, got {self.stride}")

    @classmethod
    def periodic(cls, n_p, periods, period=1.0, t0=0.0, stride=1):
        if n_p < 1 or periods < 0:
            raise ValueError(f"invalid grid n_p={n_p}, periods={periods}")
        return cls(period / n_p, n_p * periods, t0, n_p, stride)

    @property
    def t_end(self):
        return self.t0 + self.n_steps * self.dt

    def recorded_steps(self):
        steps = list(range(0, self.n_steps + 1, self.stride))
        if steps[-1] != self.n_steps:
            steps.append(self.n_steps)
        return steps


@dataclass
class Trajectory:
    times: np.ndarray
    populations: np.ndarray
    coherences: np.ndarray
    diagnostics: np.ndarray
    final_state: object = field(default=None, repr=False)
    step_time: float = 0.0
    liouville_time: float = 0.0

    @property
    def n_levels(self):
        return self.populations.shape[1]

    def __len__(self):
        return len(self.times)

    @property
    def max_trace_error(self):
        return float(self.diagnostics[:, 1].max())

    @property
    def max_hermiticity_defect(self):
        return float(self.diagnostics[:, 0].max())

    @property
    def min_eigenvalue(self):
        return float(self.diagnostics[:, 2].min())

    def max_deviation(self, other):
        if self.populations.shape != other.populations.shape:
            raise ValueError("trajectories are recorded on different grids")
        return float(max(np.abs(self.populations - other.populations).max(), np.abs(self.coherences - other.coherences).max()))

    def to_frame(self):
        n = self.n_levels
        columns = {"t": self.times}
        for j in range(n):
            columns[f"rho_{j + 1}{j + 1}"] = self.populations[:, j]
        for i, (j, k) in enumerate(zip(*np.triu_indices(n, k=1))):
            columns[f"re_rho_{j + 1}{k + 1}"] = self.coherences[:, i].real
            columns[f"im_rho_{j + 1}{k + 1}"] = self.coherences[:, i].imag
        for i, name in enumerate(DIAGNOSTIC_COLUMNS):
            columns[name] = self.diagnostics[:, i]

        return pd.DataFrame(columns)

    @classmethod
    def from_frame(cls, frame):
        times = frame["t"].to_numpy()
        n = sum(1 for name in frame.columns if name.startswith("rho_"))
        populations = np.stack([frame[f"rho_{j + 1}{j + 1}"].to_numpy() for j in range(n)], axis=1)
        pairs = list(zip(*np.triu_indices(n, k=1)))
        coherences = np.empty((len(times), len(pairs)), dtype=complex)
        for i, (j, k) in enumerate(pairs):
            coherences[:, i].real = frame[f"re_rho_{j + 1}{k + 1}"].to_numpy()
            coherences[:, i].imag = frame[f"im_rho_{j + 1}{k + 1}"].to_numpy()

        return cls(times, populations, coherences, frame[DIAGNOSTIC_COLUMNS].to_numpy())


@dataclass(frozen=True)
class SplittingContext:

    relax_nut: object
    strategy: object
    signal: object

    @property
    def dt(self):
        return self.relax_nut.dt

    @property
    def method(self):
        return self.strategy.variant


def build_context(sys, signal, dt, method, spec=None, **strategy_kwargs):
    spec = spectral_precompute(sys) if spec is None else spec
    return SplittingContext(build_relax_nut(sys, dt), build_strategy(method, spec, **strategy_kwargs), signal)


def strang_step(ctx, rho, t_n, dt, timings=None):
    if not np.isclose(dt, ctx.dt, rtol=1e-12, atol=0):
        raise ValueError(f"step {dt} does not match the propagator step {ctx.dt}")

    gamma = dt * field_average(ctx.signal, t_n, dt)
    rho = relax_nut_half_step(ctx.relax_nut, rho)
    start_time = time.perf_counter()
    rho = liouville_step(ctx.strategy, rho, gamma, dt)
    if timings is not None:
        timings["liouville"] += time.perf_counter() - start_time
    return relax_nut_half_step(ctx.relax_nut, rho)


def simulate(ctx, rho0, plan):
    recorded = set(plan.recorded_steps())
    n_records = len(recorded)
    n = rho0.n_levels
    rows, cols = torch.triu_indices(n, n, offset=1)

    times = np.empty(n_records)
    populations = np.empty((n_records, n))
    coherences = np.empty((n_records, len(rows)), dtype=complex)
    diags = np.empty((n_records, len(DIAGNOSTIC_COLUMNS)))

    def record(i, step, rho):
        times[i] = plan.t0 + step * plan.dt
        populations[i] = rho.populations.tolist()
        coherences[i] = rho.matrix[rows, cols].numpy()
        diags[i] = tuple(diagnostics(rho))

    rho = rho0
    record(0, 0, rho)
    i = 1
    step_time = 0.0
    timings = {"liouville": 0.0}
    for step in range(plan.n_steps):
        start_time = time.perf_counter()
        try:
            rho = strang_step(ctx, rho, plan.t0 + step * plan.dt, plan.dt, timings)
        except NumericalError as error:
            raise StepFailure(ctx.method, step, error) from error
        step_time += time.perf_counter() - start_time

        if step + 1 in recorded:
            record(i, step + 1, rho)
            i += 1

    logger.debug(f"{ctx.method}: {plan.n_steps} steps, {n_records} records, min eigenvalue {diags[:, 2].min():.3e}")

    return Trajectory(times, populations, coherences, diags, final_state=rho, step_time=step_time,
                      liouville_time=timings["liouville"])


def state_distance(a, b):
    return max_norm(a.matrix - b.matrix)
