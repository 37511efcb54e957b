"""Polynomial forms of exp(i gamma p) and its Crank-Nicolson approximant.

By Cayley-Hamilton, exp(i gamma p) equals the polynomial interpolating
f(x) = exp(i gamma x) at the eigenvalues of p. Repeated eigenvalues are
merged upstream: p is Hermitian, hence diagonalizable, so interpolating at
the distinct nodes is still exact.
"""
import numpy as np
import torch

from bloch.core.linalg import DTYPE, eye
from bloch.errors import DegenerateSpectrum, NodeCollision, SingularResolvent


COLLISION_TOL = 64 * np.finfo(float).eps
DEGENERACY_TOL = 1e-6
CANONICAL_RESIDUAL_TOL = 1e-12


def newton_divided_differences(gamma, nodes):
    """Newton coefficients (f[x_1], f[x_1, x_2], ..., f[x_1, ..., x_M]) of exp(i gamma x)."""
    nodes = np.asarray(nodes, dtype=float)
    scale = max(1.0, np.abs(nodes).max())
    gaps = np.abs(nodes[:, None] - nodes[None, :]) + np.eye(len(nodes)) * scale
    if gaps.min() < COLLISION_TOL * scale:
        raise NodeCollision(f"interpolation nodes {nodes.tolist()} are not distinct")

    # diagonal[k] holds f[x_k, ..., x_m] for the current last node x_m
    diagonal = np.exp(1j * gamma * nodes)
    coefficients = np.empty(len(nodes), dtype=complex)
    coefficients[0] = diagonal[0]
    for m in range(1, len(nodes)):
        for k in range(m - 1, -1, -1):
            diagonal[k] = (diagonal[k] - diagonal[k + 1]) / (nodes[k] - nodes[m])
        coefficients[m] = diagonal[0]

    return coefficients


def newton_polynomial(gamma, spec):
    """P_gamma(p) = sum_l c_l B_l over the cached Newton basis."""
    coefficients = torch.from_numpy(newton_divided_differences(gamma, spec.distinct_nodes))
    return torch.tensordot(coefficients, spec.newton_basis, dims=1)


def newton_to_power_basis(coefficients, nodes):
    """Expand sum_l c_l prod_{k<=l} (x - x_k) into power-basis coefficients alpha_j."""
    m = len(coefficients)
    alpha = np.zeros(m, dtype=complex)
    alpha[0] = coefficients[-1]
    # Horner on polynomials: q <- c_l + (x - x_l) q
    for l in range(m - 2, -1, -1):
        shifted = np.zeros(m, dtype=complex)
        shifted[1:] = alpha[:-1]
        alpha = shifted - nodes[l] * alpha
        alpha[0] += coefficients[l]

    return alpha


def degeneracy_threshold(nodes):
    return DEGENERACY_TOL * max(1.0, np.abs(np.asarray(nodes, dtype=float)).max())


def canonical3_coefficients(gamma, nodes):
    """Power-basis coefficients of exp(i gamma x) on three distinct nodes.

    Closed-form Cramer ratios of the Vandermonde system
    alpha0 + alpha1 x_k + alpha2 x_k^2 = exp(i gamma x_k), k = 1, 2, 3.
    """
    l1, l2, l3 = (float(x) for x in nodes)
    gap = min(abs(l2 - l1), abs(l3 - l1), abs(l3 - l2))
    if gap < degeneracy_threshold(nodes):
        raise DegenerateSpectrum(f"node gap {gap:.3e} too small for the canonical formulas")

    e1, e2, e3 = np.exp(1j * gamma * np.array([l1, l2, l3]))
    delta = (l2 - l1) * (l3 - l1) * (l3 - l2)
    alpha0 = (e1 * l2 * l3 * (l3 - l2) + e2 * l3 * l1 * (l1 - l3) + e3 * l1 * l2 * (l2 - l1)) / delta
    alpha1 = (e1 * (l2 ** 2 - l3 ** 2) + e2 * (l3 ** 2 - l1 ** 2) + e3 * (l1 ** 2 - l2 ** 2)) / delta
    alpha2 = (e1 * (l3 - l2) + e2 * (l1 - l3) + e3 * (l2 - l1)) / delta

    scale = max(1.0, abs(l1), abs(l2), abs(l3))
    residual = max(abs(alpha0 + alpha1 * x + alpha2 * x ** 2 - e) for x, e in zip((l1, l2, l3), (e1, e2, e3)))
    if residual > CANONICAL_RESIDUAL_TOL * scale ** 2 * max(abs(e1), abs(e2), abs(e3)):
        raise DegenerateSpectrum(f"canonical coefficients miss the interpolation conditions by {residual:.3e}")

    return complex(alpha0), complex(alpha1), complex(alpha2)


def cayley(gamma, p):
    """(I + i gamma p/2)(I - i gamma p/2)^-1, the Crank-Nicolson approximant of exp(i gamma p)."""
    identity = eye(p.shape[0])
    half = 0.5j * gamma * p.to(DTYPE)
    try:
        # The two factors commute, so solving from the left is enough
        return torch.linalg.solve(identity - half, identity + half)
    except RuntimeError as error:
        raise SingularResolvent(f"I - i gamma p/2 is singular for gamma={gamma}") from error
