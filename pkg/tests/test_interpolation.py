import numpy as np
import pytest

from bloch.core.linalg import as_matrix, dagger, eye, max_norm, series_exponential
from bloch.core.spectral import spectral_precompute, unitary_exponential
from bloch.core.system import degenerate_polarizability, three_level_polarizability
from bloch.errors import DegenerateSpectrum, NodeCollision
from bloch.propagators.interpolation import (canonical3_coefficients, cayley, newton_divided_differences,
                                             newton_polynomial, newton_to_power_basis)


PAULI_X = [[0.0, 1.0], [1.0, 0.0]]


def random_hermitian(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = (a + a.conj().T) / (2 * np.sqrt(n))
    np.fill_diagonal(h, 0)
    return as_matrix(h)


# Test newton_divided_differences

def test_divided_differences_zero_gamma():
    assert np.allclose(newton_divided_differences(0.0, [-1.0, 0.5, 2.0]), [1.0, 0.0, 0.0], atol=1e-15)


def test_divided_differences_two_nodes():
    gamma = 0.7
    expected = [np.exp(-1j * gamma), 1j * np.sin(gamma)]
    assert np.allclose(newton_divided_differences(gamma, [-1.0, 1.0]), expected, atol=1e-15)


def test_divided_differences_against_vandermonde():
    def validate(gamma, nodes):
        nodes = np.asarray(nodes)
        power = np.linalg.solve(np.vander(nodes, increasing=True), np.exp(1j * gamma * nodes))
        coefficients = newton_divided_differences(gamma, nodes)
        assert np.allclose(newton_to_power_basis(coefficients, nodes), power, atol=1e-13)

    validate(0.5, [0.0, 1.0, 2.0])
    validate(1.3, [-2.1, -0.4, 0.3, 1.9])
    validate(-0.8, [-1.0, 2.0])


def test_divided_differences_collision():
    with pytest.raises(NodeCollision):
        newton_divided_differences(0.3, [0.0, 0.0, 1.0])


# Test newton_polynomial

def test_newton_polynomial_zero_gamma():
    spec = spectral_precompute(three_level_polarizability())
    assert max_norm(newton_polynomial(0.0, spec) - eye(3)) <= 1e-15


def test_newton_polynomial_degenerate():
    p = degenerate_polarizability()
    spec = spectral_precompute(p)
    c = newton_divided_differences(0.4, [-1.0, 2.0])
    expected = c[0] * eye(3) + c[1] * (p + eye(3))
    assert max_norm(newton_polynomial(0.4, spec) - expected) <= 1e-12
    assert max_norm(newton_polynomial(0.4, spec) - unitary_exponential(0.4, spec)) <= 1e-12


def test_newton_polynomial_large_system():
    spec = spectral_precompute(random_hermitian(10, np.random.default_rng(11)))
    assert max_norm(newton_polynomial(0.1, spec) - unitary_exponential(0.1, spec)) <= 1e-10


def test_newton_polynomial_range():
    spec = spectral_precompute(three_level_polarizability())
    for gamma in [-9.0, -2.0, 0.31, 4.0, 9.0]:
        assert max_norm(newton_polynomial(gamma, spec) - unitary_exponential(gamma, spec)) <= 1e-11


# Test canonical3_coefficients

def test_canonical_zero_gamma():
    assert np.allclose(canonical3_coefficients(0.0, [-1.0, 0.5, 2.0]), [1.0, 0.0, 0.0], atol=1e-15)


def test_canonical_symmetric_nodes():
    gamma = 0.9
    alpha = canonical3_coefficients(gamma, [-1.0, 0.0, 1.0])
    assert np.allclose(alpha, [1.0, 1j * np.sin(gamma), np.cos(gamma) - 1], atol=1e-15)


def test_canonical_reconstruction():
    p = three_level_polarizability()
    spec = spectral_precompute(p)
    a0, a1, a2 = canonical3_coefficients(0.31, spec.eigenvalues.tolist())
    assert max_norm(a0 * eye(3) + a1 * p + a2 * (p @ p) - unitary_exponential(0.31, spec)) <= 1e-11


def test_canonical_degenerate():
    spec = spectral_precompute(degenerate_polarizability())
    with pytest.raises(DegenerateSpectrum):
        canonical3_coefficients(0.3, spec.eigenvalues.tolist())
    with pytest.raises(DegenerateSpectrum):
        canonical3_coefficients(0.3, [0.0, 1e-9, 1.0])


# Test cayley

def test_cayley_zero_gamma():
    assert max_norm(cayley(0.0, three_level_polarizability()) - eye(3)) == 0


def test_cayley_two_levels():
    p = as_matrix(PAULI_X)
    expected = (0.99 * eye(2) + 0.2j * p) / 1.01
    assert max_norm(cayley(0.2, p) - expected) <= 1e-15


def test_cayley_unitary():
    p = random_hermitian(6, np.random.default_rng(7))
    a = cayley(1.7, p)
    assert max_norm(dagger(a) @ a - eye(6)) <= 1e-12


def test_cayley_local_order():
    p = three_level_polarizability()

    def error(gamma):
        return max_norm(cayley(gamma, p) - series_exponential(1j * gamma * p))

    for gamma in [0.1, 0.05]:
        ratio = error(gamma) / error(gamma / 2)
        assert 6 < ratio < 10
