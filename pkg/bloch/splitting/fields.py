from dataclasses import dataclass
from typing import Optional

import numpy as np

from bloch.errors import OutOfRange


SIGNAL_SINUSOID = "sinusoid"
SIGNAL_TABULATED = "tabulated"

UNIFORM_GRID_TOL = 1e-12


@dataclass(frozen=True)
class FieldSignal:
    """Scalar driving field E(t).

    A sinusoid is E(t) = amplitude * sin(angular_frequency * t + phase); a
    tabulated signal is sampled on a uniform, strictly increasing time grid
    and interpolated linearly between samples.
    """

    kind: str
    amplitude: float = 1.0
    angular_frequency: float = 2 * np.pi
    phase: float = 0.0
    times: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == SIGNAL_SINUSOID:
            return
        if self.kind != SIGNAL_TABULATED:
            raise ValueError(f"unknown signal kind {self.kind!r}")

        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

        if times.ndim != 1 or times.shape != values.shape or len(times) < 2:
            raise ValueError("a tabulated signal needs matching 1d times and values with at least two samples")
        spacing = np.diff(times)
        if (spacing <= 0).any():
            raise ValueError("sample times must be strictly increasing")
        if np.abs(spacing - spacing.mean()).max() > UNIFORM_GRID_TOL * max(1.0, np.abs(times).max()):
            raise ValueError("sample times must be uniformly spaced")

    @classmethod
    def sinusoid(cls, amplitude=1.0, angular_frequency=2 * np.pi, phase=0.0):
        return cls(SIGNAL_SINUSOID, amplitude, angular_frequency, phase)

    @classmethod
    def constant(cls, value):
        return cls.sinusoid(value, 0.0, np.pi / 2)

    @classmethod
    def zero(cls):
        return cls.sinusoid(0.0, 0.0, 0.0)

    @classmethod
    def tabulated(cls, times, values):
        return cls(SIGNAL_TABULATED, times=times, values=values)

    def __call__(self, t):
        if self.kind == SIGNAL_SINUSOID:
            return self.amplitude * np.sin(self.angular_frequency * t + self.phase)
        self._check_range(t, t)
        return np.interp(t, self.times, self.values)

    def time_reversed(self, t_end):
        """The signal t -> -E(t_end - t), which drives the backward run of a reversibility check."""
        if self.kind == SIGNAL_SINUSOID:
            return FieldSignal.sinusoid(self.amplitude, self.angular_frequency, -self.angular_frequency * t_end - self.phase)
        return FieldSignal.tabulated(t_end - self.times[::-1], -self.values[::-1])

    @property
    def hyperparams(self):
        if self.kind == SIGNAL_SINUSOID:
            return {"signal": self.kind, "amplitude": self.amplitude, "angular_frequency": self.angular_frequency, "phase": self.phase}
        return {"signal": self.kind, "samples": len(self.times)}

    def _check_range(self, start, end):
        slack = UNIFORM_GRID_TOL * max(1.0, np.abs(self.times).max())
        if start < self.times[0] - slack or end > self.times[-1] + slack:
            raise OutOfRange(f"[{start}, {end}] is outside the sampled interval [{self.times[0]}, {self.times[-1]}]")


def field_average(signal, t_n, dt):
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")

    if signal.kind == SIGNAL_SINUSOID:
        # sin(w (t + dt/2) + phase) * sinc(w dt/2); np.sinc is the normalised sinc
        half = signal.angular_frequency * dt / 2
        midpoint = signal.angular_frequency * (t_n + dt / 2) + signal.phase
        return float(signal.amplitude * np.sin(midpoint) * np.sinc(half / np.pi))

    t_end = t_n + dt
    signal._check_range(t_n, t_end)
    inner = signal.times[(signal.times > t_n) & (signal.times < t_end)]
    knots = np.concatenate([[t_n], inner, [t_end]])
    samples = np.interp(knots, signal.times, signal.values)
    integral = np.sum(np.diff(knots) * (samples[1:] + samples[:-1]) / 2)

    return float(integral / dt)
