WEIGHT_SUM_ATOL = 1e-12
FILE_WEIGHT_SUM_ATOL = 1e-9
CENTER_ATOL = 1e-12
ORTHOGONALITY_ATOL = 1e-10
FEASIBILITY_ATOL = 1e-12

# Sinkhorn
EXHAUSTIVE_ETA_THRESHOLD = 4096
MIN_GAMMA = 1e-15
SINKHORN_KMAX = 100_000
# per-call cap and gamma floor (relative to min b) inside the outer solvers
SOLVER_SINKHORN_KMAX = 2_000
SINKHORN_GAMMA_FLOOR = 1e-12
KL_ZERO_THRESHOLD = 1e-300

# Hessian diagnostics
HESSIAN_PLAN_VIOLATION = 1e-12
HSYSTEM_RESIDUAL_ATOL = 1e-8
HSYSTEM_NORMALIZATION_ATOL = 1e-10
REFERENCE_GAMMA = 1e-14

# Problem constants
M_MARGIN = 1e-5
CONVEX_MARGIN = 1.05
START_SCALE = 1e-5
PAIRWISE_BLOCK_SIZE = 1024

# Solvers
GRAD_TOL = 5e-8
MAX_OUTER_ITERS = 10_000
LINE_SEARCH_SHRINK = 0.99
LINE_SEARCH_MAX_STEPS = 200
ORACLE_ERROR_FRACTION = 10
STATIONARY_START_FACTOR = 10
DEFAULT_DELTA = 1.0
SINKHORN_CLI_DELTA = 1e-6

# Benchmark
SIGMA_0 = 0.05
SIGMA_1 = 0.1
NONCONVEX_MARGIN = 0.5
MAX_EPS_DOUBLINGS = 10
TIME_BUDGET = 3600.0

RASTER_MAX_SIDE = 32
