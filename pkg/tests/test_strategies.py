import numpy as np
import pytest
import torch

from bloch.core.linalg import as_matrix, dagger, eye, hermiticity_defect, max_norm
from bloch.core.spectral import spectral_precompute
from bloch.core.system import DensityMatrix, random_polarizability, three_level_polarizability
from bloch.errors import InvalidStrategy
from bloch.propagators.strategies import (CN_CAYLEY, CN_TRAPEZOIDAL, EXP_SERIES, METHOD_CANONICAL,
                                          METHOD_CRANK_NICOLSON, METHOD_EXPONENTIAL, METHOD_NEWTON, METHODS,
                                          build_strategy, conjugation_matrix, liouville_step)


def random_hermitian(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = (a + a.conj().T) / (2 * np.sqrt(n))
    np.fill_diagonal(h, 0)
    return as_matrix(h)


def random_state(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return DensityMatrix.from_array(rho / np.trace(rho).real)


def test_build_strategy():
    spec = spectral_precompute(three_level_polarizability())
    for method in METHODS:
        assert build_strategy(method, spec).variant == method
    assert build_strategy(METHOD_CRANK_NICOLSON, spec, form=CN_CAYLEY).hyperparams["form"] == CN_CAYLEY
    assert build_strategy(METHOD_EXPONENTIAL, spec, evaluator=EXP_SERIES).hyperparams["evaluator"] == EXP_SERIES


def test_build_strategy_invalid():
    spec = spectral_precompute(three_level_polarizability())
    with pytest.raises(InvalidStrategy, match="exp, cn, newton, canonical"):
        build_strategy("rk4", spec)
    with pytest.raises(InvalidStrategy):
        build_strategy(METHOD_CANONICAL, spectral_precompute(random_hermitian(4, np.random.default_rng(0))))
    with pytest.raises(InvalidStrategy):
        build_strategy(METHOD_CRANK_NICOLSON, spec, form="implicit")
    with pytest.raises(InvalidStrategy):
        build_strategy(METHOD_EXPONENTIAL, spec, evaluator="pade")


def test_exact_strategies_agree():
    rng = np.random.default_rng(42)

    def validate(p, gamma, methods, tol):
        spec = spectral_precompute(p)
        reference = conjugation_matrix(build_strategy(METHOD_EXPONENTIAL, spec), gamma, 0.01)
        for method in methods:
            m = conjugation_matrix(build_strategy(method, spec), gamma, 0.01)
            assert max_norm(m - reference) <= tol * max(1.0, max_norm(reference))

    for draw in range(200):
        n = 2 + draw % 5
        gamma = rng.uniform(-2.0, 2.0)
        p = random_polarizability(n, rng)
        p = p / max_norm(p)
        validate(p, gamma, [METHOD_NEWTON], 1e-11)
        if n == 3 and spectral_precompute(p).node_gap > 0.05:
            validate(p, gamma, [METHOD_CANONICAL], 1e-10)


def test_series_evaluator_agrees():
    spec = spectral_precompute(three_level_polarizability())
    spectral = build_strategy(METHOD_EXPONENTIAL, spec)
    series = build_strategy(METHOD_EXPONENTIAL, spec, evaluator=EXP_SERIES)
    for gamma in [0.05, 0.5, 3.0]:
        assert max_norm(spectral.conjugation_matrix(gamma, 0.01) - series.conjugation_matrix(gamma, 0.01)) <= 1e-12


def test_conjugation_matrices_unitary():
    spec = spectral_precompute(three_level_polarizability())

    def validate(strategy):
        for gamma in [-1.2, 0.3, 2.5]:
            m = strategy.conjugation_matrix(gamma, 0.01)
            assert max_norm(dagger(m) @ m - eye(3)) <= 1e-12

    for method in METHODS:
        validate(build_strategy(method, spec))
    validate(build_strategy(METHOD_CRANK_NICOLSON, spec, form=CN_CAYLEY))


def test_zero_gamma_is_identity():
    spec = spectral_precompute(three_level_polarizability())
    rho = random_state(3, np.random.default_rng(1))
    for method in METHODS:
        strategy = build_strategy(method, spec)
        assert torch.equal(conjugation_matrix(strategy, 0.0, 0.01), eye(3))
        assert torch.equal(liouville_step(strategy, rho, 0.0, 0.01).matrix, rho.matrix)


def test_step_invariants():
    rng = np.random.default_rng(3)
    spec = spectral_precompute(three_level_polarizability())
    rho = random_state(3, rng)
    initial = torch.linalg.eigvalsh(rho.matrix)

    def validate(strategy, keeps_spectrum):
        result = liouville_step(strategy, rho, 0.4, 0.01)
        assert abs(torch.trace(result.matrix).item() - 1) <= 1e-13
        assert hermiticity_defect(result.matrix) <= 1e-13
        if keeps_spectrum:
            assert torch.allclose(torch.linalg.eigvalsh(result.matrix), initial, atol=1e-12)

    for method in [METHOD_EXPONENTIAL, METHOD_NEWTON, METHOD_CANONICAL]:
        validate(build_strategy(method, spec), True)
    validate(build_strategy(METHOD_CRANK_NICOLSON, spec, form=CN_CAYLEY), True)
    validate(build_strategy(METHOD_CRANK_NICOLSON, spec, form=CN_TRAPEZOIDAL), False)


def test_maximally_mixed_state_is_fixed():
    spec = spectral_precompute(three_level_polarizability())
    rho = DensityMatrix.from_array(np.eye(3) / 3)
    for method in METHODS:
        result = liouville_step(build_strategy(method, spec), rho, 0.7, 0.01)
        assert max_norm(result.matrix - rho.matrix) <= 1e-14


def test_trapezoidal_is_second_order():
    spec = spectral_precompute(three_level_polarizability())
    rho = random_state(3, np.random.default_rng(5))
    exact = build_strategy(METHOD_EXPONENTIAL, spec)
    trapezoidal = build_strategy(METHOD_CRANK_NICOLSON, spec)

    def error(gamma):
        return max_norm(trapezoidal.step(rho, gamma, 0.01).matrix - exact.step(rho, gamma, 0.01).matrix)

    ratio = error(0.1) / error(0.05)
    assert 6 < ratio < 10


def test_trapezoidal_commutator():
    rng = np.random.default_rng(7)
    p = random_hermitian(3, rng)
    strategy = build_strategy(METHOD_CRANK_NICOLSON, spectral_precompute(p))
    x = as_matrix(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    commutator = (strategy._commutator @ x.reshape(-1)).reshape(3, 3)
    assert max_norm(commutator - (p @ x - x @ p)) <= 1e-14
