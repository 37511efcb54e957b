from dataclasses import dataclass, fields, replace
from typing import Optional

import numpy as np
import torch
import yaml

from bloch.core.linalg import REAL_DTYPE, as_matrix, eigendecompose_hermitian
from bloch.core.system import (RELAXATION_NONE, RELAXATION_PAULI, LevelSystem, RelaxationModel,
                               degenerate_polarizability, ladder_system, random_polarizability,
                               three_level_polarizability)
from bloch.errors import BlochError, ConfigError
from bloch.propagators.interpolation import degeneracy_threshold
from bloch.propagators.strategies import CN_CAYLEY, CN_TRAPEZOIDAL, EXP_SERIES, EXP_SPECTRAL, METHODS


EXPERIMENT_THREE_LEVEL = "three_level"
EXPERIMENT_DEGENERATE = "degenerate"
EXPERIMENT_SCALING = "scaling"
EXPERIMENT_TABLE1 = "table1"
EXPERIMENT_CONVERGENCE = "convergence"
EXPERIMENT_NSFD = "nsfd"
EXPERIMENT_CUSTOM = "custom"
EXPERIMENTS = (EXPERIMENT_THREE_LEVEL, EXPERIMENT_DEGENERATE, EXPERIMENT_SCALING, EXPERIMENT_TABLE1,
               EXPERIMENT_CONVERGENCE, EXPERIMENT_NSFD, EXPERIMENT_CUSTOM)
TIMING_EXPERIMENTS = (EXPERIMENT_SCALING, EXPERIMENT_TABLE1)

PRESET_THREE_LEVEL = "three_level"
PRESET_DEGENERATE = "degenerate"
PRESET_RANDOM = "random"

TRAJECTORY_PERIODS = 20
TIMING_PERIODS = 200
FULL_TIMING_PERIODS = 2000
CONVERGENCE_PERIODS = 1
MAX_RANDOM_DRAWS = 1000


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment run.

    Field names double as the keys of a YAML config file. A `periods` of None
    selects the default for the experiment: 20 periods for trajectories and
    200 (2000 with `full`) for timing runs.
    """

    experiment: str = EXPERIMENT_THREE_LEVEL
    method: str = "exp"
    n_p: int = 20
    periods: Optional[int] = None
    levels: tuple = (2, 3, 4, 5, 10)
    omega: Optional[tuple] = None
    p_matrix: object = PRESET_THREE_LEVEL
    relaxation: object = RELAXATION_NONE
    output_path: Optional[str] = None
    record_stride: int = 1
    seed: int = 0
    cn_form: str = CN_TRAPEZOIDAL
    exp_evaluator: str = EXP_SPECTRAL
    full: bool = False
    parallel: bool = False
    n_p_list: tuple = (5, 10, 20, 100)
    methods: tuple = METHODS
    dt_list: tuple = (1 / 20, 1 / 40, 1 / 80, 1 / 160)
    reference_refinement: int = 8

    def __post_init__(self):
        for name in ("levels", "n_p_list", "methods", "dt_list"):
            value = getattr(self, name)
            object.__setattr__(self, name, tuple(value) if isinstance(value, (list, tuple)) else (value,))
        if self.omega is not None:
            object.__setattr__(self, "omega", tuple(float(w) for w in self.omega))
        self.validate()

    @classmethod
    def from_yaml(cls, path, **overrides):
        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as error:
            raise ConfigError(f"cannot read config {path}: {error}") from error
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must be a mapping of field names to values")

        return cls.from_dict(data).updated(**overrides)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        return cls(**data)

    def updated(self, **overrides):
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @property
    def resolved_periods(self):
        if self.periods is not None:
            return self.periods
        if self.experiment in TIMING_EXPERIMENTS:
            return FULL_TIMING_PERIODS if self.full else TIMING_PERIODS
        if self.experiment == EXPERIMENT_CONVERGENCE:
            return CONVERGENCE_PERIODS
        return TRAJECTORY_PERIODS

    @property
    def strategy_kwargs(self):
        return {"form": self.cn_form, "evaluator": self.exp_evaluator}

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {', '.join(EXPERIMENTS)}, got {self.experiment!r}")
        for method in (self.method,) + self.methods:
            if method not in METHODS:
                raise ConfigError(f"method must be one of {', '.join(METHODS)}, got {method!r}")
        if self.n_p < 2 or any(n_p < 2 for n_p in self.n_p_list):
            raise ConfigError("n_p must be at least 2")
        if self.periods is not None and self.periods < 1:
            raise ConfigError(f"periods must be at least 1, got {self.periods}")
        if any(n < 2 for n in self.levels):
            raise ConfigError("levels must be at least 2")
        if self.record_stride < 1:
            raise ConfigError(f"record_stride must be at least 1, got {self.record_stride}")
        if self.cn_form not in (CN_TRAPEZOIDAL, CN_CAYLEY):
            raise ConfigError(f"cn_form must be {CN_TRAPEZOIDAL} or {CN_CAYLEY}, got {self.cn_form!r}")
        if self.exp_evaluator not in (EXP_SPECTRAL, EXP_SERIES):
            raise ConfigError(f"exp_evaluator must be {EXP_SPECTRAL} or {EXP_SERIES}, got {self.exp_evaluator!r}")
        if self.reference_refinement < 2:
            raise ConfigError("reference_refinement must be at least 2")
        if isinstance(self.p_matrix, str) and self.p_matrix not in (PRESET_THREE_LEVEL, PRESET_DEGENERATE, PRESET_RANDOM):
            raise ConfigError(f"unknown polarizability preset {self.p_matrix!r}")
        if self.omega is not None and not isinstance(self.p_matrix, str) and len(self.omega) != len(self.p_matrix):
            raise ConfigError(f"{len(self.omega)} level frequencies for a {len(self.p_matrix)}-level polarizability")


def parse_matrix(rows):
    try:
        return as_matrix([[complex(str(x).replace(" ", "")) for x in row] for row in rows])
    except (TypeError, ValueError, BlochError) as error:
        raise ConfigError(f"invalid p_matrix: {error}") from error


def build_relaxation(cfg, n_levels):
    spec = cfg.relaxation
    try:
        if spec is None or spec == RELAXATION_NONE:
            return RelaxationModel.none(n_levels)
        if isinstance(spec, dict) and spec.get("kind") == RELAXATION_PAULI:
            return RelaxationModel.pauli(spec["pop_rates"], spec["coh_rates"])
    except (KeyError, BlochError) as error:
        raise ConfigError(f"invalid relaxation: {error}") from error
    raise ConfigError(f"relaxation must be 'none' or a mapping with kind 'pauli', got {spec!r}")


def random_gapped_polarizability(n_levels, rng):
    for _ in range(MAX_RANDOM_DRAWS):
        p = random_polarizability(n_levels, rng)
        eigenvalues = eigendecompose_hermitian(p)[0].tolist()
        if min(b - a for a, b in zip(eigenvalues, eigenvalues[1:])) > degeneracy_threshold(eigenvalues):
            return p
    raise ConfigError(f"no {n_levels}-level polarizability with separated eigenvalues in {MAX_RANDOM_DRAWS} draws")


def build_polarizability(cfg, n_levels=3, rng=None):
    if cfg.p_matrix == PRESET_THREE_LEVEL:
        return three_level_polarizability()
    if cfg.p_matrix == PRESET_DEGENERATE:
        return degenerate_polarizability()
    if cfg.p_matrix == PRESET_RANDOM:
        return random_gapped_polarizability(n_levels, np.random.default_rng(cfg.seed) if rng is None else rng)
    return parse_matrix(cfg.p_matrix)


def build_system(cfg, polarizability=None):
    p = build_polarizability(cfg, cfg.levels[0]) if polarizability is None else polarizability
    relaxation = build_relaxation(cfg, p.shape[0])
    try:
        if cfg.omega is None:
            return ladder_system(p, relaxation)
        return LevelSystem(torch.tensor(cfg.omega, dtype=REAL_DTYPE), p, relaxation)
    except BlochError as error:
        raise ConfigError(str(error)) from error
