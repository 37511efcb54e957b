import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from bloch.errors import InsufficientResolution
from bloch.splitting.integrator import StepPlan, simulate, state_distance


logger = logging.getLogger(__name__)

REFERENCE_REFINEMENT = 8
NOISE_FLOOR = 1e-13


def final_state(ctx, rho0, t_end, dt):
    n_steps = int(round(t_end / dt))
    if not np.isclose(n_steps * dt, t_end, rtol=1e-9, atol=0):
        raise ValueError(f"dt={dt} does not divide t_end={t_end}")
    # Only the end point matters here
    plan = StepPlan(dt, n_steps, stride=max(1, n_steps))
    return simulate(ctx, rho0, plan).final_state


def convergence_errors(ctx_factory, rho0, t_end, dt_list, reference_factory=None, refinement=REFERENCE_REFINEMENT, parallel=False):
    """Final-state errors of each run against a run at min(dt_list) / refinement.

    ctx_factory(dt) builds the splitting context for a step dt;
    reference_factory, if given, builds the one of the reference run.
    """
    dt_list = [float(dt) for dt in dt_list]
    if len(dt_list) < 3:
        raise ValueError("at least three step sizes are needed to fit an order")
    if any(b >= a for a, b in zip(dt_list, dt_list[1:])):
        raise ValueError("step sizes must be decreasing")

    dt_ref = dt_list[-1] / refinement
    reference_factory = ctx_factory if reference_factory is None else reference_factory
    logger.info(f"Computing reference solution at dt={dt_ref:.3e}...")
    reference = final_state(reference_factory(dt_ref), rho0, t_end, dt_ref)

    def error(dt):
        return state_distance(final_state(ctx_factory(dt), rho0, t_end, dt), reference)

    if parallel:
        with ThreadPoolExecutor() as executor:
            return list(executor.map(error, dt_list))
    return [error(dt) for dt in dt_list]


def fit_order(dt_list, errors, noise_floor=NOISE_FLOOR):
    errors = np.asarray(errors, dtype=float)
    if errors.min() <= noise_floor:
        raise InsufficientResolution(f"errors {errors.tolist()} reach the noise floor {noise_floor:.0e}, the fitted slope would be meaningless")
    slope, _ = np.polyfit(np.log(dt_list), np.log(errors), 1)
    return float(slope)


def convergence_order(ctx_factory, rho0, t_end, dt_list, reference_factory=None, refinement=REFERENCE_REFINEMENT, parallel=False):
    errors = convergence_errors(ctx_factory, rho0, t_end, dt_list, reference_factory, refinement, parallel)
    logger.debug(f"errors {errors} for dt {list(dt_list)}")
    return fit_order(dt_list, errors)
