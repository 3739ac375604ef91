from .adversary import generate_adversary
from .benchmark import compute_benchmark
from .experiment import (
    CSV_COLUMNS,
    ExperimentConfig,
    RegretReport,
    report_csv_bytes,
    run_experiment,
    write_run_csv,
)
from .slope import fit_slope

__all__ = [
    "generate_adversary",
    "compute_benchmark",
    "CSV_COLUMNS",
    "ExperimentConfig",
    "RegretReport",
    "report_csv_bytes",
    "run_experiment",
    "write_run_csv",
    "fit_slope",
]
