from dataclasses import dataclass, replace

import numpy as np
import torch

from bloch.core.linalg import DTYPE, REAL_DTYPE, as_matrix, dagger, hermiticity_defect, max_norm
from bloch.errors import InvalidDensityMatrix, InvalidMatrix, InvalidRates


CONSTRUCTION_TOL = 1e-12

RELAXATION_NONE = "none"
RELAXATION_PAULI = "pauli"


@dataclass(frozen=True)
class DensityMatrix:
    """State of an N-level system.

    Use `DensityMatrix.from_array` to build a validated state; propagation
    wraps its results directly so that drift is monitored, never repaired.
    """

    matrix: torch.Tensor

    @classmethod
    def from_array(cls, data):
        m = as_matrix(data)

        defect = hermiticity_defect(m)
        if defect > CONSTRUCTION_TOL:
            raise InvalidDensityMatrix(f"not Hermitian (defect {defect:.3e})")
        trace_error = abs(torch.trace(m).item() - 1)
        if trace_error > CONSTRUCTION_TOL:
            raise InvalidDensityMatrix(f"trace differs from one by {trace_error:.3e}")
        min_eigenvalue = torch.linalg.eigvalsh((m + dagger(m)) / 2)[0].item()
        if min_eigenvalue < -CONSTRUCTION_TOL:
            raise InvalidDensityMatrix(f"not positive semidefinite (eigenvalue {min_eigenvalue:.3e})")

        return cls(m)

    @classmethod
    def pure(cls, n_levels, level=0):
        populations = [0.0] * n_levels
        populations[level] = 1.0
        return cls.from_array(np.diag(populations))

    @property
    def n_levels(self):
        return self.matrix.shape[0]

    @property
    def populations(self):
        return self.matrix.diagonal().real

    def coherences(self):
        rows, cols = torch.triu_indices(self.n_levels, self.n_levels, offset=1)
        return self.matrix[rows, cols]


@dataclass(frozen=True)
class RelaxationModel:
    """Pauli-type relaxation: population transfer plus coherence damping.

    pop_rates[j, k] is the transition rate from level k to level j and
    coh_rates[j, k] the damping rate of the coherence rho_jk.
    """

    kind: str
    pop_rates: torch.Tensor
    coh_rates: torch.Tensor

    def __post_init__(self):
        pop_rates = torch.as_tensor(self.pop_rates, dtype=REAL_DTYPE)
        coh_rates = torch.as_tensor(self.coh_rates, dtype=REAL_DTYPE)
        object.__setattr__(self, "pop_rates", pop_rates)
        object.__setattr__(self, "coh_rates", coh_rates)
        self._validate()

    @classmethod
    def none(cls, n_levels):
        zeros = torch.zeros(n_levels, n_levels, dtype=REAL_DTYPE)
        return cls(RELAXATION_NONE, zeros, zeros.clone())

    @classmethod
    def pauli(cls, pop_rates, coh_rates):
        return cls(RELAXATION_PAULI, pop_rates, coh_rates)

    @property
    def n_levels(self):
        return self.pop_rates.shape[0]

    @property
    def decay_rates(self):
        # Gamma_k: total rate out of level k
        return self.pop_rates.sum(dim=0)

    @property
    def hyperparams(self):
        return {"kind": self.kind, "pop_rates": self.pop_rates.tolist(), "coh_rates": self.coh_rates.tolist()}

    def _validate(self):
        w, g = self.pop_rates, self.coh_rates
        n = w.shape[0]

        if w.dim() != 2 or w.shape != (n, n) or g.shape != (n, n):
            raise InvalidRates("rate matrices must be square and of equal size")
        if not (torch.isfinite(w).all() and torch.isfinite(g).all()):
            raise InvalidRates("rates must be finite")

        if self.kind == RELAXATION_NONE:
            if w.abs().max() > 0 or g.abs().max() > 0:
                raise InvalidRates("relaxation kind 'none' requires zero rates")
            return
        if self.kind != RELAXATION_PAULI:
            raise InvalidRates(f"unknown relaxation kind {self.kind!r}")

        if (w < 0).any() or (g < 0).any():
            raise InvalidRates("rates must be nonnegative")
        if w.diagonal().abs().max() > 0 or g.diagonal().abs().max() > 0:
            raise InvalidRates("rate matrices must have a zero diagonal")
        if (g - g.T).abs().max() > 0:
            raise InvalidRates("coherence damping rates must be symmetric")

        gamma = self.decay_rates
        required = (gamma.unsqueeze(0) + gamma.unsqueeze(1)) / 2
        off_diagonal = ~torch.eye(n, dtype=torch.bool)
        if (g < required - CONSTRUCTION_TOL)[off_diagonal].any():
            raise InvalidRates("coherence damping below (Gamma_j + Gamma_k)/2 breaks positivity")


@dataclass(frozen=True)
class LevelSystem:
    """Level frequencies, constant polarizability and relaxation model.

    H0 = diag(omega) and the interaction potential is V(t) = E(t) p.
    """

    omega: torch.Tensor
    polarizability: torch.Tensor
    relaxation: RelaxationModel = None

    def __post_init__(self):
        omega = torch.as_tensor(self.omega, dtype=REAL_DTYPE).flatten()
        p = as_matrix(self.polarizability)
        relaxation = self.relaxation if self.relaxation is not None else RelaxationModel.none(p.shape[0])
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "polarizability", p)
        object.__setattr__(self, "relaxation", relaxation)

        n = p.shape[0]
        if omega.shape[0] != n:
            raise InvalidMatrix(f"{omega.shape[0]} level frequencies for a {n}-level polarizability")
        if not torch.isfinite(omega).all():
            raise InvalidMatrix("level frequencies must be finite")
        tol = CONSTRUCTION_TOL * max(1.0, max_norm(p))
        if hermiticity_defect(p) > tol:
            raise InvalidMatrix("polarizability must be Hermitian")
        if p.diagonal().abs().max().item() > tol:
            raise InvalidMatrix("polarizability must have a zero diagonal")
        if relaxation.n_levels != n:
            raise InvalidRates(f"relaxation model is for {relaxation.n_levels} levels, system has {n}")

    @property
    def n_levels(self):
        return self.polarizability.shape[0]

    @property
    def transition_frequencies(self):
        # omega_jk = omega_j - omega_k
        return self.omega.unsqueeze(1) - self.omega.unsqueeze(0)

    @property
    def hamiltonian(self):
        return torch.diag(self.omega.to(DTYPE))

    def potential(self, e_field):
        return e_field * self.polarizability

    def with_omega(self, omega):
        return replace(self, omega=omega)

    @property
    def hyperparams(self):
        return {"n_levels": self.n_levels, "omega": self.omega.tolist(), "relaxation": self.relaxation.kind}


def three_level_polarizability():
    return as_matrix([[0.0, 1.0, 1.1], [1.0, 0.0, 1.0], [1.1, 1.0, 0.0]])


def degenerate_polarizability():
    # Eigenvalues -1 (double) and 2
    return as_matrix([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])


def random_polarizability(n_levels, rng, low=0.5, high=1.5):
    """Real symmetric zero-diagonal matrix with off-diagonal entries uniform in [low, high]."""
    upper = np.triu(rng.uniform(low, high, size=(n_levels, n_levels)), k=1)
    return as_matrix(upper + upper.T)


def three_level_system(polarizability=None, relaxation=None):
    p = three_level_polarizability() if polarizability is None else polarizability
    return LevelSystem(torch.tensor([0.0, np.pi, 2 * np.pi], dtype=REAL_DTYPE), p, relaxation)


def ladder_system(polarizability, relaxation=None):
    n = as_matrix(polarizability).shape[0]
    return LevelSystem(torch.arange(n, dtype=REAL_DTYPE) * np.pi, polarizability, relaxation)
