from src.egw.benchmark.config import BenchmarkSpec, EpsRule, GeneratorSpec
from src.egw.benchmark.runner import (
    BUDGET_EXCEEDED,
    BenchmarkRunner,
    RunRecord,
    records_frame,
    run_cell,
    scaling_exponent,
)
