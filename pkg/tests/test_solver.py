"""Interior-point solver against independent oracles."""

import numpy as np
import pytest
from scipy.optimize import linprog

from lyacert.conic import Cone, ConicProgram, svec
from lyacert.solver import SolveOptions, certify_residuals, solve

from oracles import (
    planted_dual_infeasible,
    planted_optimal,
    planted_primal_infeasible,
    random_battery,
)


def _scipy_lp_value(prog):
    """Reference value via scipy on a pure LP (zero/nonneg cones)."""
    A_eq, b_eq, A_ub, b_ub = [], [], [], []
    for cone, sl in prog.segments():
        if cone.kind == "zero":
            A_eq.append(prog.A[sl])
            b_eq.append(prog.b[sl])
        elif cone.kind == "nonneg":
            A_ub.append(prog.A[sl])
            b_ub.append(prog.b[sl])
        else:
            raise AssertionError("not an LP")
    res = linprog(
        prog.c,
        A_ub=np.vstack(A_ub) if A_ub else None,
        b_ub=np.concatenate(b_ub) if b_ub else None,
        A_eq=np.vstack(A_eq) if A_eq else None,
        b_eq=np.concatenate(b_eq) if b_eq else None,
        bounds=(None, None),
        method="highs",
    )
    return res


def test_lp_values_match_scipy():
    rng = np.random.default_rng(11)
    for _ in range(25):
        prog, planted = planted_optimal(rng, lp_only=True)
        ref = _scipy_lp_value(prog)
        assert ref.status == 0
        assert ref.fun == pytest.approx(planted, abs=1e-7)
        rep = solve(prog, SolveOptions())
        assert rep.status == "Optimal"
        assert rep.obj_primal == pytest.approx(ref.fun, abs=1e-6)


def test_lp_infeasible_matches_scipy():
    rng = np.random.default_rng(13)
    for _ in range(10):
        prog = planted_primal_infeasible(rng, lp_only=True)
        assert _scipy_lp_value(prog).status == 2  # scipy: infeasible
        assert solve(prog, SolveOptions()).status == "PrimalInfeasible"


def test_planted_sdp_optimum():
    rng = np.random.default_rng(17)
    for _ in range(20):
        prog, value = planted_optimal(rng)
        rep = solve(prog, SolveOptions())
        assert rep.status == "Optimal"
        assert rep.obj_primal == pytest.approx(value, abs=1e-5)
        assert rep.obj_dual == pytest.approx(value, abs=1e-5)


def test_psd_infeasible_and_unbounded():
    rng = np.random.default_rng(19)
    for _ in range(10):
        assert (
            solve(planted_primal_infeasible(rng), SolveOptions()).status
            == "PrimalInfeasible"
        )
        assert (
            solve(planted_dual_infeasible(rng), SolveOptions()).status
            == "DualInfeasible"
        )


def test_min_eigenvalue_program():
    # min t s.t. tI - M >= 0 gives t = lambda_max(M)
    rng = np.random.default_rng(23)
    M = rng.standard_normal((4, 4))
    M = (M + M.T) / 2
    A = -svec(np.eye(4)).reshape(-1, 1)
    prog = ConicProgram(np.array([1.0]), A, -svec(M), (Cone("psd", 4),))
    rep = solve(prog, SolveOptions())
    assert rep.status == "Optimal"
    assert rep.obj_primal == pytest.approx(
        float(np.linalg.eigvalsh(M)[-1]), abs=1e-7
    )


def test_equality_only_system():
    rng = np.random.default_rng(29)
    A = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    x = rng.standard_normal(3)
    c = rng.standard_normal(3)
    prog = ConicProgram(c, A, A @ x, (Cone("zero", 3),))
    rep = solve(prog, SolveOptions())
    assert rep.status == "Optimal"
    assert rep.obj_primal == pytest.approx(float(c @ x), abs=1e-7)
    np.testing.assert_allclose(rep.x, x, atol=1e-6)


def test_deterministic():
    rng = np.random.default_rng(31)
    prog, _ = planted_optimal(rng)
    r1 = solve(prog, SolveOptions())
    r2 = solve(prog, SolveOptions())
    np.testing.assert_array_equal(r1.x, r2.x)
    np.testing.assert_array_equal(r1.y, r2.y)
    assert r1.iterations == r2.iterations


def test_residual_certification():
    rng = np.random.default_rng(37)
    prog, _ = planted_optimal(rng)
    rep = solve(prog, SolveOptions())
    res_p, res_d, gap = certify_residuals(prog, rep.x, rep.y, rep.s)
    assert max(res_p, res_d, gap) < 1e-6


def test_battery_statuses_and_values():
    for prog, status, value in random_battery(101, 60):
        rep = solve(prog, SolveOptions())
        assert rep.status == status
        if value is not None:
            assert rep.obj_primal == pytest.approx(value, abs=1e-5)
