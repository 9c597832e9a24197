"""Automatic detection of quadratic Lyapunov functions for first-order
optimization algorithms via Gram-matrix performance estimation and an
embedded conic (semidefinite) solver."""

from .algorithm import IterationMap, OutcomeSet, TransitionPair, build_sigma, expect, transport
from .assembly import (
    AssemblyOptions,
    Certificate,
    CertificateProblem,
    LyapunovSpec,
    Mode,
    Normalization,
    assemble,
    assemble_minmax_value,
    bisect_rate,
    solve_certificate,
)
from .classes import (
    BlockSmoothConvex,
    Convex,
    FunctionHandle,
    OperatorHandle,
    SmoothConvex,
    SmoothStronglyConvex,
)
from .conic import Cone, ConicProgram, SchemaError, smat, svec
from .solver import SolveOptions, SolveReport, certify_residuals, solve
from .symbolic import (
    Constraint,
    FSymbol,
    PepModel,
    PointExpr,
    ScalarExpr,
    Sense,
    combine,
    dot,
    f_value,
)
from .verify import (
    InstanceSample,
    SampleCheckReport,
    VerificationReport,
    divergence_witness,
    sample_check,
    verify_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "IterationMap", "OutcomeSet", "TransitionPair", "build_sigma", "expect",
    "transport", "AssemblyOptions", "Certificate", "CertificateProblem",
    "LyapunovSpec", "Mode", "Normalization", "assemble",
    "assemble_minmax_value", "bisect_rate", "solve_certificate",
    "BlockSmoothConvex", "Convex", "FunctionHandle", "OperatorHandle",
    "SmoothConvex", "SmoothStronglyConvex", "Cone", "ConicProgram",
    "SchemaError", "smat", "svec", "SolveOptions", "SolveReport",
    "certify_residuals", "solve", "Constraint", "FSymbol", "PepModel",
    "PointExpr", "ScalarExpr", "Sense", "combine", "dot", "f_value",
    "InstanceSample", "SampleCheckReport", "VerificationReport",
    "divergence_witness", "sample_check", "verify_certificate",
]
