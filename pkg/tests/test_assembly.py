"""Certificate assembly: feasibility margins, pinned coefficients,
rate bisection, min-max normalization."""

import dataclasses

import numpy as np
import pytest

from lyacert.algorithm import IterationMap, OutcomeSet, build_sigma
from lyacert.assembly import (
    AssemblyOptions,
    LyapunovSpec,
    Mode,
    Normalization,
    assemble,
    assemble_minmax_value,
    bisect_rate,
    solve_certificate,
)
from lyacert.classes import FunctionHandle, SmoothStronglyConvex
from lyacert.scenarios.gd import build_gd
from lyacert.solver import SolveOptions, solve
from lyacert.symbolic import PepModel, f_value

# margins frozen from independent runs of the full pipeline
INFEASIBLE_MARGINS = {2.0: 0.1429, 2.2: 0.1575, 2.5: 0.1739}


def _solve_gd(gamma, **spec_overrides):
    m, outcomes, spec = build_gd(gamma)
    if spec_overrides:
        spec = dataclasses.replace(spec, **spec_overrides)
    cp = assemble(m, outcomes, spec, AssemblyOptions(coeff_cap=100.0))
    return solve_certificate(cp)


@pytest.mark.parametrize("gamma", [0.5, 1.0, 1.5])
def test_gd_descent_feasible(gamma):
    cert, rep = _solve_gd(gamma)
    assert rep.status == "Optimal"
    assert cert.margin <= 1e-6


@pytest.mark.parametrize("gamma,margin", sorted(INFEASIBLE_MARGINS.items()))
def test_gd_descent_infeasible_margin(gamma, margin):
    cert, rep = _solve_gd(gamma)
    assert rep.status == "Optimal"
    assert cert.margin == pytest.approx(margin, abs=2e-3)


def test_q_fixed_is_pinned():
    cert, rep = _solve_gd(1.0, q_fixed={0: 0.7})
    assert rep.status == "Optimal"
    assert cert.q[0] == pytest.approx(0.7, abs=1e-9)


def test_certificate_json_shape():
    cert, _ = _solve_gd(1.0)
    d = cert.to_json_dict()
    assert set(d) >= {"Q", "q", "multipliers", "margin", "mode"}
    Q = np.asarray(d["Q"])
    assert Q.shape == (3, 3)
    np.testing.assert_allclose(Q, Q.T, atol=1e-12)


def _strongly_convex_gd(gamma, mu, L):
    m = PepModel()
    f = FunctionHandle(m, SmoothStronglyConvex(mu, L), "f")
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
        mode=Mode.LINEAR_RATE,
        rho=0.5,
    )
    return m, outcomes, spec


def test_bisect_rate_strongly_convex():
    mu, L, gamma = 0.1, 1.0, 1.0
    m, outcomes, spec = _strongly_convex_gd(gamma, mu, L)
    res = bisect_rate(m, outcomes, spec, lo=0.02, hi=0.95, tol=2e-3)
    # close to the iterate contraction factor (1 - gamma*mu)^2 = 0.81
    assert res.rho is not None
    assert 0.5 <= res.rho <= (1 - gamma * mu) ** 2 + 0.02
    assert res.certificate is not None
    # the bisection trace must be consistent: no feasible rho below an
    # infeasible one
    feas = [r for r, ok in res.trace if ok]
    infeas = [r for r, ok in res.trace if not ok]
    if feas and infeas:
        assert min(feas) > max(infeas)


def test_minmax_value_zero_when_descent_holds():
    m, outcomes, spec = build_gd(1.0)
    cp = assemble_minmax_value(m, outcomes, spec,
                               Normalization(initial_leaves=(0,)))
    rep = solve(cp.program, SolveOptions())
    assert rep.status == "Optimal"
    assert rep.obj_primal <= 1e-6


def test_minmax_value_positive_when_descent_fails():
    m, outcomes, spec = build_gd(2.5)
    cp = assemble_minmax_value(m, outcomes, spec,
                               Normalization(initial_leaves=(0,)))
    rep = solve(cp.program, SolveOptions())
    assert rep.status == "Optimal"
    assert rep.obj_primal >= 0.1
