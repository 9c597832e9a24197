"""Gradient descent on smooth convex functions.

One iteration x+ = x - gamma * grad f(x) with f convex and L-smooth,
minimized at x* = 0.  Leaves: x0, grad f(x0), grad f(x1); the candidate
Lyapunov function is quadratic over {x0, grad f(x0)} plus a multiple of
f(x0) - f*, and the default decrease is R = f(x0) - f*.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from ..algorithm import IterationMap, OutcomeSet, build_sigma
from ..assembly import (
    AssemblyOptions,
    LyapunovSpec,
    Mode,
    Normalization,
    assemble,
    assemble_minmax_value,
    solve_certificate,
)
from ..classes import FunctionHandle, SmoothConvex
from ..solver import SolveOptions, solve
from ..symbolic import PepModel, f_value
from ..verify import InstanceSample, divergence_witness
from .common import (
    EXIT_FEASIBLE,
    EXIT_INACCURATE,
    EXIT_INFEASIBLE,
    ScenarioResult,
    certify,
)

__all__ = ["GdConfig", "build_gd", "gd_sampler", "run_gd"]


@dataclass
class GdConfig:
    gamma: float
    L: float = 1.0
    rate: float | None = None  # linear-rate mode when set
    minmax: bool = False
    tol: float = 1e-6
    seed: int = 0
    n_samples: int = 1000

    def __post_init__(self) -> None:
        if self.gamma <= 0 or self.L <= 0:
            raise ValueError("gamma and L must be positive")
        if self.rate is not None and not (0 < self.rate <= 1):
            raise ValueError("rate must lie in (0, 1]")


def build_gd(gamma: float, L: float = 1.0):
    """Model + outcome set + Lyapunov spec for one gradient-descent step."""
    m = PepModel()
    f = FunctionHandle(m, SmoothConvex(L), "f")
    _, _, fs = f.stationary_point()
    x0 = m.new_leaf("x0")
    g0, f0 = f.oracle(x0)
    x1 = x0 - gamma * g0
    g1, f1 = f.oracle(x1)
    f.emit_class_constraints()
    m.freeze()
    imap = IterationMap(
        point_pairs=[(x0.max_leaf(), x1), (g0.max_leaf(), g1)],
        f_pairs=[(fs, f_value(fs)), (f0, f_value(f1))],
        lyapunov_support=(x0.max_leaf(), g0.max_leaf()),
    )
    outcomes = OutcomeSet.deterministic(build_sigma(m, imap))
    spec = LyapunovSpec(
        support=(x0.max_leaf(), g0.max_leaf()),
        nonneg_quantities=[f_value(f0) - f_value(fs)],
        decrease=f_value(f0) - f_value(fs),
        mode=Mode.DESCENT,
    )
    return m, outcomes, spec


def gd_sampler(gamma: float, L: float = 1.0, dim: int = 4):
    """Random convex quadratics with spectrum in [0, L], run one step."""

    def sample(rng: np.random.Generator) -> InstanceSample:
        B = rng.standard_normal((dim, dim))
        U, _ = np.linalg.qr(B)
        eigs = rng.uniform(0.0, L, size=dim)
        eigs[rng.integers(dim)] = L * rng.uniform(0.9, 1.0)  # exercise the edge
        H = (U * eigs) @ U.T
        x0 = rng.standard_normal(dim)

        def fval(x):
            return 0.5 * float(x @ H @ x)

        def leaves(x):
            g = H @ x
            x1 = x - gamma * g
            g1 = H @ x1
            X = np.column_stack([x, g, g1])
            fv = np.array([0.0, fval(x), fval(x1)])
            return X, fv, x1

        X, fv, x1 = leaves(x0)
        Xp, fvp, _ = leaves(x1)
        return InstanceSample(X, fv, [(1.0, Xp, fvp)])

    return sample


def _gd_witness(gamma: float, L: float):
    curvatures = np.linspace(0.1 * L, L, 10)
    return divergence_witness(
        lambda x, curv: x - gamma * curv * x, curvatures
    )


def run_gd(cfg: GdConfig) -> ScenarioResult:
    params = dataclasses.asdict(cfg)
    m, outcomes, spec = build_gd(cfg.gamma, cfg.L)
    if cfg.minmax:
        mmspec = dataclasses.replace(spec, mode=Mode.DESCENT)
        cp = assemble_minmax_value(
            m, outcomes, mmspec, Normalization(initial_leaves=(0,))
        )
        report = solve(cp.program, SolveOptions())
        status = report.status if report.status != "Optimal" else "Feasible"
        code = EXIT_FEASIBLE if report.status == "Optimal" else EXIT_INACCURATE
        return ScenarioResult(
            "gd", params, status, code, value=float(report.obj_primal)
        )
    if cfg.rate is not None:
        spec = dataclasses.replace(spec, mode=Mode.LINEAR_RATE, rho=cfg.rate)
    cp = assemble(m, outcomes, spec, AssemblyOptions(coeff_cap=100.0,
                                                     feas_tol=cfg.tol))
    feasible, status, cert, ver, samp = certify(
        cp,
        sampler=gd_sampler(cfg.gamma, cfg.L),
        feas_tol=cfg.tol,
        seed=cfg.seed,
        n_samples=cfg.n_samples,
    )
    witness = None
    if feasible is False:
        witness = _gd_witness(cfg.gamma, cfg.L)
    code = {True: EXIT_FEASIBLE, False: EXIT_INFEASIBLE, None: EXIT_INACCURATE}[
        feasible
    ]
    return ScenarioResult(
        "gd",
        params,
        status,
        code,
        feasible=feasible,
        margin=cert.margin,
        rho=cfg.rate,
        certificate=cert.to_json_dict() if feasible else None,
        verification=ver.to_json_dict() if ver else None,
        sample_report=samp.to_json_dict() if samp else None,
        witness=witness,
    )
