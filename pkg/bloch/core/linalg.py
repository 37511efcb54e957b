import math
from collections import namedtuple

import numpy as np
import torch

from bloch.errors import InvalidMatrix, NotHermitian, NoConvergence


DTYPE = torch.complex128
REAL_DTYPE = torch.float64

HERMITIAN_TOL = 1e-10
SERIES_TOL = 1e-14
MAX_SWEEPS = 50
MAX_TAYLOR_ORDER = 60

Diagnostics = namedtuple("Diagnostics", ["hermiticity_defect", "trace_error", "min_eigenvalue"])


def as_matrix(data):
    """Coerce data to a dense N x N complex128 tensor (N >= 2, finite entries)."""
    if isinstance(data, torch.Tensor):
        m = data.to(DTYPE)
    else:
        m = torch.from_numpy(np.array(data, dtype=np.complex128))

    if m.dim() != 2 or m.shape[0] != m.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {tuple(m.shape)}")
    if m.shape[0] < 2:
        raise InvalidMatrix("a 1-level system has trivial dynamics")
    if not (torch.isfinite(m.real).all() and torch.isfinite(m.imag).all()):
        raise InvalidMatrix("matrix has non-finite entries")

    return m


def dagger(m):
    return m.conj().transpose(-2, -1)


def max_norm(m):
    return m.abs().max().item()


def hermiticity_defect(m):
    return max_norm(m - dagger(m))


def eye(n, dtype=DTYPE):
    return torch.eye(n, dtype=dtype)


def eigendecompose_hermitian(m, max_sweeps=MAX_SWEEPS):
    """Cyclic Jacobi eigensolver for Hermitian matrices.

    Returns eigenvalues sorted ascending (float64) and the unitary matrix of
    eigenvectors (complex128, one per column). Each eigenvector is phase
    normalised so that its first non-negligible component is real positive,
    and eigenvalue ties are ordered lexicographically on the normalised
    eigenvectors, which makes the output deterministic.
    """
    m = as_matrix(m)
    n = m.shape[0]
    scale = max_norm(m)
    if hermiticity_defect(m) > HERMITIAN_TOL * scale:
        raise NotHermitian(f"symmetry defect {hermiticity_defect(m):.3e} exceeds tolerance")

    a = (m + dagger(m)) / 2
    v = eye(n)
    frobenius = torch.linalg.norm(a).item()
    threshold = 1e-15 * frobenius

    for _ in range(max_sweeps):
        if _off_diagonal_norm(a) <= threshold:
            break
        for k in range(n - 1):
            for l in range(k + 1, n):
                _rotate(a, v, k, l, 1e-18 * frobenius)
    else:
        if _off_diagonal_norm(a) > threshold:
            raise NoConvergence(f"Jacobi rotations did not converge in {max_sweeps} sweeps")

    eigenvalues = a.diagonal().real.clone()
    v = _normalise_phases(v)
    order = _deterministic_order(eigenvalues, v, 1e-12 * max(1.0, scale))

    return eigenvalues[order], v[:, order]


def _off_diagonal_norm(a):
    off = a - torch.diag(a.diagonal())
    return torch.linalg.norm(off).item()


def _rotate(a, v, k, l, skip_tol):
    # Zero a[k, l]: a phase shift on column l makes the pivot real, then a
    # real Jacobi rotation diagonalises the 2 x 2 block.
    z = a[k, l].item()
    r = abs(z)
    if r <= skip_tol:
        return

    phase = z / r
    a_kk = a[k, k].real.item()
    a_ll = a[l, l].real.item()
    theta = (a_ll - a_kk) / (2 * r)
    t = 1.0 / (abs(theta) + math.sqrt(theta ** 2 + 1.0))
    if theta < 0:
        t = -t
    c = 1.0 / math.sqrt(t ** 2 + 1.0)
    s = t * c

    q = torch.tensor([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]], dtype=DTYPE)
    idx = [k, l]
    a[:, idx] = a[:, idx] @ q
    a[idx, :] = dagger(q) @ a[idx, :]
    v[:, idx] = v[:, idx] @ q

    a[k, l] = 0
    a[l, k] = 0
    a[k, k] = a_kk - t * r
    a[l, l] = a_ll + t * r


def _normalise_phases(v):
    v = v.clone()
    for j in range(v.shape[1]):
        column = v[:, j]
        cutoff = 1e-12 * column.abs().max().item()
        for x in column.tolist():
            if abs(x) > cutoff:
                v[:, j] = column * (x.conjugate() / abs(x))
                break
    return v


def _deterministic_order(eigenvalues, v, tie_tol):
    values = eigenvalues.tolist()
    order = sorted(range(len(values)), key=lambda i: values[i])

    def vector_key(i):
        return tuple(x for z in v[:, i].tolist() for x in (z.real, z.imag))

    # Sort clusters of tied eigenvalues by their eigenvectors
    result = []
    cluster = [order[0]]
    for i in order[1:]:
        if values[i] - values[cluster[-1]] <= tie_tol:
            cluster.append(i)
        else:
            result.extend(sorted(cluster, key=vector_key))
            cluster = [i]
    result.extend(sorted(cluster, key=vector_key))

    return result


def series_exponential(m, tol=SERIES_TOL):
    """Matrix exponential by scaling and squaring of a truncated Taylor series.

    The matrix is halved s = max(0, ceil(log2 ||m||_1)) times so that the
    scaled one-norm is at most one, the Taylor order is the smallest one whose
    a-priori remainder bound is below tol, and the result is squared s times.
    Real input stays real.
    """
    m = torch.as_tensor(m)
    m = m.to(DTYPE if m.is_complex() else REAL_DTYPE)
    identity = eye(m.shape[-1], dtype=m.dtype)

    norm = m.abs().sum(dim=0).max().item()
    if norm == 0:
        return identity

    n_squarings = max(0, math.ceil(math.log2(norm)))
    scaled = m / 2 ** n_squarings
    order = _taylor_order(norm / 2 ** n_squarings, tol)

    # Horner form of I + A + A^2/2! + ... + A^K/K!
    result = identity
    for k in range(order, 0, -1):
        result = identity + (scaled @ result) / k

    for _ in range(n_squarings):
        result = result @ result

    return result


def _taylor_order(x, tol):
    term = x
    for k in range(1, MAX_TAYLOR_ORDER):
        term *= x / (k + 1)
        # term = x^(k+1)/(k+1)!; geometric bound on the tail
        if term / (1 - x / (k + 2)) <= tol:
            return k
    return MAX_TAYLOR_ORDER


def diagnostics(rho):
    m = rho.matrix if hasattr(rho, "matrix") else torch.as_tensor(rho).to(DTYPE)
    hermitized = (m + dagger(m)) / 2

    return Diagnostics(
        hermiticity_defect=hermiticity_defect(m),
        trace_error=abs(torch.trace(m).item() - 1),
        min_eigenvalue=torch.linalg.eigvalsh(hermitized)[0].item(),
    )
