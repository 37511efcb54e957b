import torch

from bloch.core.linalg import DTYPE, dagger, eye, series_exponential
from bloch.core.spectral import unitary_exponential
from bloch.core.system import DensityMatrix
from bloch.errors import InvalidStrategy, SingularResolvent
from bloch.propagators.interpolation import canonical3_coefficients, cayley, newton_polynomial


METHOD_EXPONENTIAL = "exp"
METHOD_CRANK_NICOLSON = "cn"
METHOD_NEWTON = "newton"
METHOD_CANONICAL = "canonical"
METHODS = (METHOD_EXPONENTIAL, METHOD_CRANK_NICOLSON, METHOD_NEWTON, METHOD_CANONICAL)

METHOD_NAMES = {
    METHOD_EXPONENTIAL: "Exponential",
    METHOD_CRANK_NICOLSON: "Crank-Nicolson",
    METHOD_NEWTON: "Newton",
    METHOD_CANONICAL: "Canonical",
}

EXP_SPECTRAL = "spectral"
EXP_SERIES = "series"

CN_TRAPEZOIDAL = "trapezoidal"
CN_CAYLEY = "cayley"


class BaseStrategy:
    """Evaluates the matrix playing the role of exp(i gamma p) for one Liouville step.

    A step maps rho to M^dagger rho M with M = conjugation_matrix(gamma, dt).
    A vanishing field (gamma == 0) short-circuits to the identity.
    """

    variant = None

    def __init__(self, spec):
        self._spec = spec
        self._identity = eye(spec.n_levels)

    @property
    def spec(self):
        return self._spec

    @property
    def n_levels(self):
        return self._spec.n_levels

    @property
    def hyperparams(self):
        return {"method": self.variant}

    def conjugation_matrix(self, gamma, dt):
        if gamma == 0:
            return self._identity
        return self._conjugation_matrix(gamma, dt)

    def step(self, rho, gamma, dt):
        if gamma == 0:
            return rho
        m = self._conjugation_matrix(gamma, dt)
        return DensityMatrix(dagger(m) @ rho.matrix @ m)

    def _conjugation_matrix(self, gamma, dt):
        raise NotImplementedError


class ExponentialStrategy(BaseStrategy):

    variant = METHOD_EXPONENTIAL

    def __init__(self, spec, evaluator=EXP_SPECTRAL):
        super().__init__(spec)
        if evaluator not in (EXP_SPECTRAL, EXP_SERIES):
            raise InvalidStrategy(f"unknown exponential evaluator {evaluator!r}")
        self._evaluator = evaluator
        self._ip = 1j * spec.polarizability

    @property
    def hyperparams(self):
        return {**super().hyperparams, "evaluator": self._evaluator}

    def _conjugation_matrix(self, gamma, dt):
        if self._evaluator == EXP_SERIES:
            return series_exponential(gamma * self._ip)
        return unitary_exponential(gamma, self._spec)


class NewtonStrategy(BaseStrategy):

    variant = METHOD_NEWTON

    def _conjugation_matrix(self, gamma, dt):
        return newton_polynomial(gamma, self._spec)


class Canonical3Strategy(BaseStrategy):

    variant = METHOD_CANONICAL

    def __init__(self, spec):
        super().__init__(spec)
        if spec.n_levels != 3:
            raise InvalidStrategy(f"the canonical formulas are for 3 levels, got {spec.n_levels}")
        p = spec.polarizability
        self._powers = torch.stack([self._identity, p, p @ p])
        self._nodes = tuple(spec.eigenvalues.tolist())

    def _conjugation_matrix(self, gamma, dt):
        alpha = torch.tensor(canonical3_coefficients(gamma, self._nodes), dtype=DTYPE)
        return torch.tensordot(alpha, self._powers, dims=1)


class CrankNicolsonStrategy(BaseStrategy):
    """Crank-Nicolson treatment of the Liouville sub-equation.

    The trapezoidal form applies the trapezoidal rule to d rho/dt = -i[V, rho],
    (I + i gamma/2 ad_p) rho' = (I - i gamma/2 ad_p) rho, solved as an
    N^2 x N^2 dense system. It keeps trace and Hermiticity but not the
    spectrum once N >= 3. The Cayley form conjugates with cayley(gamma, p).
    Both forms report cayley(gamma, p) as their conjugation matrix.
    """

    variant = METHOD_CRANK_NICOLSON

    def __init__(self, spec, form=CN_TRAPEZOIDAL):
        super().__init__(spec)
        if form not in (CN_TRAPEZOIDAL, CN_CAYLEY):
            raise InvalidStrategy(f"unknown Crank-Nicolson form {form!r}")
        self._form = form
        n = spec.n_levels
        p = spec.polarizability
        # Row-major vectorisation: vec(pX - Xp) = (p kron I - I kron p^T) vec(X)
        self._commutator = torch.kron(p, eye(n)) - torch.kron(eye(n), p.T.contiguous())
        self._super_identity = eye(n * n)

    @property
    def hyperparams(self):
        return {**super().hyperparams, "form": self._form}

    def step(self, rho, gamma, dt):
        if gamma == 0 or self._form == CN_CAYLEY:
            return super().step(rho, gamma, dt)

        n = self.n_levels
        half = 0.5j * gamma * self._commutator
        rhs = (self._super_identity - half) @ rho.matrix.reshape(-1)
        try:
            solution = torch.linalg.solve(self._super_identity + half, rhs)
        except RuntimeError as error:
            raise SingularResolvent(f"trapezoidal Liouville system is singular for gamma={gamma}") from error

        return DensityMatrix(solution.reshape(n, n))

    def _conjugation_matrix(self, gamma, dt):
        return cayley(gamma, self._spec.polarizability)


def build_strategy(method, spec, **kwargs):
    if method == METHOD_EXPONENTIAL:
        return ExponentialStrategy(spec, kwargs.get("evaluator", EXP_SPECTRAL))
    elif method == METHOD_CRANK_NICOLSON:
        return CrankNicolsonStrategy(spec, kwargs.get("form", CN_TRAPEZOIDAL))
    elif method == METHOD_NEWTON:
        return NewtonStrategy(spec)
    elif method == METHOD_CANONICAL:
        return Canonical3Strategy(spec)
    raise InvalidStrategy(f"unknown method {method!r}, valid methods are {', '.join(METHODS)}")


def conjugation_matrix(strategy, gamma, dt):
    return strategy.conjugation_matrix(gamma, dt)


def liouville_step(strategy, rho, gamma, dt):
    return strategy.step(rho, gamma, dt)
