import logging
from dataclasses import dataclass

import torch

from bloch.core.linalg import DTYPE, as_matrix, dagger, eigendecompose_hermitian, eye


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralData:
    """Offline data of a polarizability matrix p.

    newton_basis is stacked as an (M, N, N) tensor with B_0 = I and
    B_l = B_{l-1} (p - node_l I), built over the M distinct nodes.
    """

    polarizability: torch.Tensor
    eigenvalues: torch.Tensor
    eigenvectors: torch.Tensor
    distinct_nodes: tuple
    newton_basis: torch.Tensor

    @property
    def n_levels(self):
        return self.polarizability.shape[0]

    @property
    def spectral_radius(self):
        return self.eigenvalues.abs().max().item()

    @property
    def node_gap(self):
        values = self.eigenvalues.tolist()
        return min(b - a for a, b in zip(values, values[1:]))


def default_dedup_tol(eigenvalues):
    return 1e-8 * max(1.0, torch.as_tensor(eigenvalues).abs().max().item())


def spectral_precompute(sys, dedup_tol=None):
    p = as_matrix(sys.polarizability if hasattr(sys, "polarizability") else sys)
    eigenvalues, eigenvectors = eigendecompose_hermitian(p)
    if dedup_tol is None:
        dedup_tol = default_dedup_tol(eigenvalues)

    nodes = cluster_nodes(eigenvalues.tolist(), dedup_tol)
    logger.debug(f"{len(nodes)} distinct nodes out of {len(eigenvalues)} eigenvalues")

    return SpectralData(p, eigenvalues, eigenvectors, tuple(nodes), newton_basis(p, nodes))


def cluster_nodes(sorted_values, tol):
    """Merge ascending values closer than tol, one mean representative per cluster."""
    clusters = [[sorted_values[0]]]
    for value in sorted_values[1:]:
        if value - clusters[-1][-1] <= tol:
            clusters[-1].append(value)
        else:
            clusters.append([value])

    return [sum(cluster) / len(cluster) for cluster in clusters]


def newton_basis(p, nodes):
    n = p.shape[0]
    identity = eye(n)
    basis = [identity]
    for node in nodes[:-1]:
        basis.append(basis[-1] @ (p - node * identity))

    return torch.stack(basis)


def unitary_exponential(gamma, spec):
    """exp(i gamma p) = U diag(exp(i gamma lambda)) U^dagger."""
    phases = torch.exp(1j * gamma * spec.eigenvalues.to(DTYPE))
    u = spec.eigenvectors
    return (u * phases) @ dagger(u)
