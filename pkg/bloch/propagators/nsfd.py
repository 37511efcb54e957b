"""Nonstandard finite-difference reading of the exact Liouville step.

Writing P_gamma(p) = alpha0 + i E alpha1_tilde Q(p), with Q(p) = p + ...,
the exact step P rho' = rho P becomes

    Phi^-1 (rho' - rho) = -i (V~ rho' - rho V~),  Phi = alpha1_tilde / alpha0,

with V~ = E Q(p): a renormalised step size Phi = dt + O(dt^2) and a
nonlocal right-hand side.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch

from bloch.core.linalg import DTYPE, eye, max_norm
from bloch.errors import DegenerateSpectrum, VanishingCoefficient
from bloch.propagators.interpolation import canonical3_coefficients, newton_divided_differences, newton_to_power_basis


VANISHING_TOL = 1e-12


@dataclass(frozen=True)
class CanonicalNsfd:

    alpha: complex
    beta: complex
    xi: complex
    phi_over_dt: complex


@dataclass(frozen=True)
class NsfdReport:
    gamma: float
    dt: float
    e_field: float
    alpha: np.ndarray
    alpha0: complex
    alpha1_tilde: complex
    phi_over_dt: complex
    q_poly_coeffs: np.ndarray
    canonical: Optional[CanonicalNsfd] = None

    @property
    def phi(self):
        return self.alpha1_tilde / self.alpha0

    def tilde_potential(self, p):
        p = p.to(DTYPE)
        result = torch.zeros_like(p)
        power = eye(p.shape[0])
        for q in self.q_poly_coeffs[1:]:
            power = power @ p
            result = result + complex(q) * power
        return self.e_field * result

    def residual(self, rho_n, rho_np1, p):
        v = self.tilde_potential(p)
        a, b = rho_n.matrix, rho_np1.matrix
        return max_norm((b - a) / self.phi + 1j * (v @ b - a @ v))

    def to_dict(self):
        row = {
            "dt": self.dt,
            "e_field": self.e_field,
            "gamma": self.gamma,
            "alpha0": self.alpha0,
            "alpha1_tilde": self.alpha1_tilde,
            "phi_over_dt": self.phi_over_dt,
        }
        if self.canonical is not None:
            row.update({"alpha": self.canonical.alpha, "beta": self.canonical.beta, "xi": self.canonical.xi})
        return row


def nsfd_report(gamma, dt, e_field, spec):
    if not np.isclose(gamma, dt * e_field, rtol=1e-12, atol=0):
        raise ValueError(f"gamma={gamma} is not dt * e_field = {dt * e_field}")

    n = spec.n_levels
    if e_field == 0:
        return _zero_field_report(dt, n)

    nodes = spec.distinct_nodes
    coefficients = newton_divided_differences(gamma, nodes)
    alpha = np.zeros(n, dtype=complex)
    alpha[:len(nodes)] = newton_to_power_basis(coefficients, nodes)

    alpha0 = complex(alpha[0])
    alpha1_tilde = complex(alpha[1] / (1j * e_field))
    if abs(alpha0) <= VANISHING_TOL:
        raise VanishingCoefficient(f"alpha0 vanishes at gamma={gamma}")
    if abs(alpha1_tilde) <= VANISHING_TOL * dt:
        raise VanishingCoefficient(f"alpha1_tilde vanishes at gamma={gamma}")

    q_poly_coeffs = alpha / alpha[1]
    q_poly_coeffs[0] = 0

    return NsfdReport(
        gamma=gamma,
        dt=dt,
        e_field=e_field,
        alpha=alpha,
        alpha0=alpha0,
        alpha1_tilde=alpha1_tilde,
        phi_over_dt=alpha1_tilde / (alpha0 * dt),
        q_poly_coeffs=q_poly_coeffs,
        canonical=_canonical_report(gamma, dt, e_field, spec),
    )


def _canonical_report(gamma, dt, e_field, spec):
    if spec.n_levels != 3:
        return None
    try:
        a0, a1, a2 = canonical3_coefficients(gamma, spec.eigenvalues.tolist())
    except DegenerateSpectrum:
        return None

    # Coefficients of exp(i dt V) in powers of V = E p
    beta = -1j * a1 / e_field
    xi = a2 / a1 ** 2

    return CanonicalNsfd(alpha=a0, beta=beta, xi=xi, phi_over_dt=beta / (a0 * dt))


def _zero_field_report(dt, n):
    # Limit values as E -> 0
    alpha = np.zeros(n, dtype=complex)
    alpha[0] = 1
    q_poly_coeffs = np.zeros(n, dtype=complex)
    q_poly_coeffs[1] = 1
    canonical = CanonicalNsfd(alpha=1, beta=dt, xi=0.5, phi_over_dt=1) if n == 3 else None

    return NsfdReport(
        gamma=0.0,
        dt=dt,
        e_field=0.0,
        alpha=alpha,
        alpha0=1,
        alpha1_tilde=dt,
        phi_over_dt=1,
        q_poly_coeffs=q_poly_coeffs,
        canonical=canonical,
    )
