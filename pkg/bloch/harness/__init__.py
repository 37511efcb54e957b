from .config import ExperimentConfig
from .benchmark import BenchmarkRow, MethodBenchmarker
from .experiments import (run_convergence, run_crank_nicolson_table, run_custom, run_degenerate, run_nsfd_sweep,
                          run_scaling, run_three_level)
from .io import emit_csv, read_csv
