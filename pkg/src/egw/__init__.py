from src.egw.benchmark import (
    BenchmarkRunner,
    BenchmarkSpec,
    EpsRule,
    GeneratorSpec,
    RunRecord,
    records_frame,
    scaling_exponent,
)
from src.egw.core import *  # noqa: F401,F403
from src.egw.exceptions import *  # noqa: F401,F403
from src.egw.measures import *  # noqa: F401,F403
from src.egw.oracle import *  # noqa: F401,F403
from src.egw.solvers import *  # noqa: F401,F403
