from dataclasses import dataclass

import torch

from bloch.core.linalg import DTYPE, series_exponential
from bloch.core.system import DensityMatrix
from bloch.errors import InvalidRates


@dataclass(frozen=True)
class RelaxNutPropagator:
    """Exact half step exp(L dt/2) of the relaxation-nutation flow.

    Coherences decouple entrywise (coh_phase, unit diagonal); populations
    follow the column-stochastic semigroup pop_half_step.
    """

    coh_phase: torch.Tensor
    pop_half_step: torch.Tensor
    dt: float


def build_relax_nut(sys, dt):
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")

    relaxation = sys.relaxation
    if relaxation.n_levels != sys.n_levels:
        raise InvalidRates("relaxation model does not match the level system")

    half = dt / 2
    exponent = (-1j * sys.transition_frequencies - relaxation.coh_rates) * half
    coh_phase = torch.exp(exponent.to(DTYPE))
    coh_phase.diagonal().fill_(1)

    rates = relaxation.pop_rates - torch.diag(relaxation.decay_rates)
    pop_half_step = series_exponential(rates * half)

    return RelaxNutPropagator(coh_phase, pop_half_step, dt)


def relax_nut_half_step(prop, rho):
    m = rho.matrix * prop.coh_phase
    populations = prop.pop_half_step.to(DTYPE) @ rho.matrix.diagonal()
    m = m - torch.diag(m.diagonal()) + torch.diag(populations)

    return DensityMatrix(m)
