from src.egw.oracle.hilbert import hilbert_distance, hilbert_distance_log, norm_bound
from src.egw.oracle.kernel import (
    Kernel,
    build_kernel,
    contraction_coefficient,
    contraction_gap,
    cost_matrix,
    log_cross_ratio,
)
from src.egw.oracle.sinkhorn import (
    Coupling,
    OracleCertificate,
    SinkhornOracle,
    certify,
    coupling_distance,
    max_iterations_bound,
    oracle_tolerance_schedule,
    sinkhorn,
    sinkhorn_log,
    tolerance_alpha,
)
