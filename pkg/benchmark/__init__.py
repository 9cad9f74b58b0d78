"""
Benchmark package
Synthetic workloads, timed runs, CSV and Excel output
"""
from benchmark.excel_export import records_to_excel, summarize
from benchmark.generator import (
    BENCH,
    DEFAULT_COUNTS,
    NUM_INPUTS,
    STUDIED,
    Variable,
    WorkloadSpec,
    generate_models,
    generate_policies,
    is_extension,
)
from benchmark.records import (
    BASELINE_TASK,
    CSV_COLUMNS,
    TASKS,
    BenchRecord,
    ScalingVerdict,
    check_scaling,
    emit_csv,
    net_time,
    read_csv,
)
from benchmark.runner import run_benchmark, run_http_benchmark, run_stress, task_functions

__all__ = [
    "BASELINE_TASK",
    "BENCH",
    "CSV_COLUMNS",
    "DEFAULT_COUNTS",
    "NUM_INPUTS",
    "STUDIED",
    "TASKS",
    "BenchRecord",
    "ScalingVerdict",
    "Variable",
    "WorkloadSpec",
    "check_scaling",
    "emit_csv",
    "generate_models",
    "generate_policies",
    "is_extension",
    "net_time",
    "read_csv",
    "records_to_excel",
    "run_benchmark",
    "run_http_benchmark",
    "run_stress",
    "summarize",
    "task_functions",
]
