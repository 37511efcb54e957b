from .linalg import as_matrix, diagnostics, eigendecompose_hermitian, series_exponential, Diagnostics
from .system import DensityMatrix, LevelSystem, RelaxationModel
from .spectral import SpectralData, spectral_precompute, unitary_exponential
