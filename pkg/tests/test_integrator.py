import numpy as np
import pytest
import torch

from bloch.core.system import DensityMatrix, RelaxationModel, degenerate_polarizability, three_level_system
from bloch.errors import DegenerateSpectrum, StepFailure
from bloch.propagators.strategies import (CN_CAYLEY, METHOD_CANONICAL, METHOD_CRANK_NICOLSON, METHOD_EXPONENTIAL,
                                          METHOD_NEWTON, METHODS)
from bloch.splitting.fields import FieldSignal
from bloch.splitting.integrator import (DIAGNOSTIC_COLUMNS, StepPlan, Trajectory, build_context, simulate,
                                        state_distance, strang_step)


def coherent_state():
    return DensityMatrix.from_array([[0.5, 0.2 + 0.1j, 0.1], [0.2 - 0.1j, 0.3, 0.05j], [0.1, -0.05j, 0.2]])


# Test StepPlan

def test_step_plan():
    plan = StepPlan.periodic(20, 3)
    assert plan.dt == pytest.approx(0.05)
    assert plan.n_steps == 60
    assert plan.t_end == pytest.approx(3.0)
    assert StepPlan(0.1, 20, stride=7).recorded_steps() == [0, 7, 14, 20]
    assert StepPlan(0.1, 0).recorded_steps() == [0]
    with pytest.raises(ValueError):
        StepPlan(0.0, 10)
    with pytest.raises(ValueError):
        StepPlan(0.1, -1)
    with pytest.raises(ValueError):
        StepPlan(0.1, 10, stride=0)


# Test simulate

def test_zero_field_free_rotation():
    system = three_level_system()
    rho0 = coherent_state()
    ctx = build_context(system, FieldSignal.zero(), 0.05, METHOD_EXPONENTIAL)
    trajectory = simulate(ctx, rho0, StepPlan.periodic(20, 20))

    omega = [0.0, np.pi, 2 * np.pi]
    for t, coherences in zip(trajectory.times, trajectory.coherences):
        expected = [rho0.matrix[j, k].item() * np.exp(-1j * (omega[j] - omega[k]) * t) for j, k in [(0, 1), (0, 2), (1, 2)]]
        assert np.abs(coherences - expected).max() <= 1e-12
    assert np.allclose(trajectory.populations, [[0.5, 0.3, 0.2]] * len(trajectory), atol=1e-14)


def test_zero_steps():
    rho0 = DensityMatrix.pure(3)
    ctx = build_context(three_level_system(), FieldSignal.sinusoid(), 0.05, METHOD_NEWTON)
    trajectory = simulate(ctx, rho0, StepPlan(0.05, 0))
    assert len(trajectory) == 1
    assert trajectory.times[0] == 0
    assert torch.equal(trajectory.final_state.matrix, rho0.matrix)
    assert trajectory.step_time == 0
    assert trajectory.liouville_time == 0


def test_stride():
    ctx = build_context(three_level_system(), FieldSignal.sinusoid(), 0.05, METHOD_EXPONENTIAL)
    full = simulate(ctx, DensityMatrix.pure(3), StepPlan.periodic(20, 1))
    strided = simulate(ctx, DensityMatrix.pure(3), StepPlan.periodic(20, 1, stride=7))
    assert np.allclose(strided.times, [0.0, 0.35, 0.7, 1.0])
    assert np.array_equal(strided.populations, full.populations[[0, 7, 14, 20]])
    assert torch.equal(strided.final_state.matrix, full.final_state.matrix)


def test_newton_matches_exponential():
    def validate(system, n_p, periods, tol):
        trajectories = [
            simulate(build_context(system, FieldSignal.sinusoid(), 1 / n_p, method), DensityMatrix.pure(3), StepPlan.periodic(n_p, periods))
            for method in [METHOD_EXPONENTIAL, METHOD_NEWTON]
        ]
        assert trajectories[0].max_deviation(trajectories[1]) <= tol

    validate(three_level_system(), 20, 2, 1e-12)
    validate(three_level_system(), 5, 4, 1e-12)
    validate(three_level_system(degenerate_polarizability()), 20, 2, 1e-9)


def test_conservation():
    relaxation = RelaxationModel.pauli(
        [[0.0, 0.3, 0.1], [0.2, 0.0, 0.4], [0.0, 0.5, 0.0]],
        [[0.0, 1.0, 0.5], [1.0, 0.0, 1.0], [0.5, 1.0, 0.0]],
    )

    def validate(system, method, **kwargs):
        ctx = build_context(system, FieldSignal.sinusoid(), 0.05, method, **kwargs)
        trajectory = simulate(ctx, coherent_state(), StepPlan.periodic(20, 2))
        assert trajectory.max_trace_error <= 1e-11
        assert trajectory.max_hermiticity_defect <= 1e-11
        assert np.allclose(trajectory.populations.sum(axis=1), 1.0, atol=1e-11)
        return trajectory

    for system in [three_level_system(), three_level_system(relaxation=relaxation)]:
        for method in METHODS:
            trajectory = validate(system, method)
            if method != METHOD_CRANK_NICOLSON:
                assert trajectory.min_eigenvalue >= -1e-11
        assert validate(system, METHOD_CRANK_NICOLSON, form=CN_CAYLEY).min_eigenvalue >= -1e-11


def test_three_level_conservation_over_twenty_periods():
    system = three_level_system()
    plan = StepPlan.periodic(20, 20)
    for method in METHODS:
        ctx = build_context(system, FieldSignal.sinusoid(), plan.dt, method)
        trajectory = simulate(ctx, DensityMatrix.pure(3), plan)
        assert len(trajectory) == 401
        assert trajectory.max_trace_error <= 1e-11
        assert trajectory.max_hermiticity_defect <= 1e-11


def test_time_reversibility():
    system = three_level_system()
    signal = FieldSignal.sinusoid(1.0, 2 * np.pi, 0.3)
    plan = StepPlan.periodic(20, 2)
    rho0 = coherent_state()

    forward = simulate(build_context(system, signal, plan.dt, METHOD_EXPONENTIAL), rho0, plan)
    backward_ctx = build_context(system.with_omega(-system.omega), signal.time_reversed(plan.t_end), plan.dt, METHOD_EXPONENTIAL)
    backward = simulate(backward_ctx, forward.final_state, plan)
    assert state_distance(backward.final_state, rho0) <= 1e-12


def test_strang_step_checks_step():
    ctx = build_context(three_level_system(), FieldSignal.sinusoid(), 0.05, METHOD_EXPONENTIAL)
    strang_step(ctx, DensityMatrix.pure(3), 0.0, 0.05)
    with pytest.raises(ValueError):
        strang_step(ctx, DensityMatrix.pure(3), 0.0, 0.1)


def test_step_failure():
    system = three_level_system(degenerate_polarizability())
    ctx = build_context(system, FieldSignal.sinusoid(), 0.05, METHOD_CANONICAL)
    with pytest.raises(StepFailure) as info:
        simulate(ctx, DensityMatrix.pure(3), StepPlan.periodic(20, 1))
    assert info.value.method == METHOD_CANONICAL
    assert info.value.step == 0
    assert isinstance(info.value.cause, DegenerateSpectrum)


# Test Trajectory

def test_trajectory_frame():
    ctx = build_context(three_level_system(), FieldSignal.sinusoid(), 0.1, METHOD_EXPONENTIAL)
    trajectory = simulate(ctx, coherent_state(), StepPlan.periodic(10, 1))
    frame = trajectory.to_frame()
    assert list(frame.columns) == [
        "t", "rho_11", "rho_22", "rho_33",
        "re_rho_12", "im_rho_12", "re_rho_13", "im_rho_13", "re_rho_23", "im_rho_23",
    ] + DIAGNOSTIC_COLUMNS
    assert len(frame) == 11

    restored = Trajectory.from_frame(frame)
    assert np.array_equal(restored.coherences, trajectory.coherences)
    assert restored.max_deviation(trajectory) == 0
