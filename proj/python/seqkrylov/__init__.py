"""Matrix-free iterative solvers for sequences of symmetric linear systems.

The heavy lifting lives in the compiled extension: MINRES and the conjugate
residual method, recycling MINRES with harmonic Ritz recycle spaces, sparse
approximate map preconditioner updates, sequence experiments, and a
predictor-corrector Pareto front tracer.
"""

from seqkrylov._core import (
    ComparisonRecord,
    FrontTrace,
    LinearOperator,
    ParetoPoint,
    ParseError,
    Preconditioner,
    RecycleSpace,
    SamEvalRecord,
    SamEvalReport,
    SamMap,
    SequenceSummary,
    SolveReport,
    SolverBreakdown,
    SparseMatrix,
    SystemSequence,
    add_scaled,
    compute_sam,
    cond_estimate,
    cond_exact,
    cr_solve,
    emit_report,
    frobenius_diff,
    generate_sequence,
    ic0,
    ic0_factor,
    identity_preconditioner,
    jacobi_precond,
    load_matrix_market,
    load_sequence,
    load_vector,
    matvec,
    minres_solve,
    operator_from_matrix,
    orthonormalize,
    project_initial,
    ritz_extract,
    rminres_solve,
    run_comparison,
    run_sam_eval,
    sam_precondition,
    save_matrix_market,
    save_vector,
    trace_front,
)

__all__ = [
    "ComparisonRecord",
    "FrontTrace",
    "LinearOperator",
    "ParetoPoint",
    "ParseError",
    "Preconditioner",
    "RecycleSpace",
    "SamEvalRecord",
    "SamEvalReport",
    "SamMap",
    "SequenceSummary",
    "SolveReport",
    "SolverBreakdown",
    "SparseMatrix",
    "SystemSequence",
    "add_scaled",
    "compute_sam",
    "cond_estimate",
    "cond_exact",
    "cr_solve",
    "emit_report",
    "frobenius_diff",
    "generate_sequence",
    "ic0",
    "ic0_factor",
    "identity_preconditioner",
    "jacobi_precond",
    "load_matrix_market",
    "load_sequence",
    "load_vector",
    "matvec",
    "minres_solve",
    "operator_from_matrix",
    "orthonormalize",
    "project_initial",
    "ritz_extract",
    "rminres_solve",
    "run_comparison",
    "run_sam_eval",
    "sam_precondition",
    "save_matrix_market",
    "save_vector",
    "trace_front",
]

__version__ = "0.1.0"
