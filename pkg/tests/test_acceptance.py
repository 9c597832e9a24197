"""End-to-end acceptance gate.

Each test exercises one externally stated criterion at its stated
tolerance and records a PASS/FAIL line (printed in the terminal
summary).  Expensive scenario runs are shared through module-scoped
fixtures so the soundness criterion can audit every emitted
certificate.
"""

import os
import time

import numpy as np
import pytest

from lyacert.scenarios import (
    GdConfig,
    PdhgQebConfig,
    RcdConfig,
    run_gd,
    run_pdhg_qeb,
    run_rcd,
)
from lyacert.scenarios.gd import build_gd
from lyacert.solver import SolveOptions, solve
from oracles import random_battery

TABLE_DIMS = (2, 3, 4, 5, 8, 10)
GD_FEASIBLE = (0.5, 1.0, 1.5)


@pytest.fixture(scope="module")
def rcd_table():
    out = {}
    for d in TABLE_DIMS:
        t0 = time.monotonic()
        res = run_rcd(RcdConfig(d=d))
        out[d] = (res, time.monotonic() - t0)
    return out


@pytest.fixture(scope="module")
def gd_results():
    out = {}
    for L in (1.0, 2.0):
        for g in GD_FEASIBLE + (2.5,):
            out[(g, L)] = run_gd(GdConfig(gamma=g / L, L=L))
    return out


@pytest.fixture(scope="module")
def pdhg_result():
    os.environ.setdefault("LYACERT_THREADS", str(min(4, os.cpu_count() or 1)))
    return run_pdhg_qeb(
        PdhgQebConfig(gamma_min=0.05, gamma_max=1.3, steps=20, eta=0.5)
    )


def test_criterion_1_coordinate_descent_table(rcd_table, acceptance):
    details = []
    ok = True
    for d, (res, secs) in rcd_table.items():
        row = res.rows[0] if res.rows else {}
        q1, q2 = row.get("q1"), row.get("q2")
        good = (
            res.status == "Feasible"
            and q1 == pytest.approx(d - 1, abs=0.05)
            and q2 == pytest.approx(d / 2, abs=0.05)
            and secs < 30.0
        )
        ok = ok and good
        details.append(f"d={d}: q1={q1:.3f} q2={q2:.3f} {secs:.1f}s")
    acceptance("1 coordinate-descent coefficient table", ok,
               "; ".join(details))


def test_criterion_2_coefficient_conjecture(acceptance):
    worst_res, worst_slack = 0.0, 0.0
    ok = True
    for d in range(2, 11):
        res = run_rcd(RcdConfig(d=d, check_conjecture=True))
        ver = res.verification or {}
        samp = res.sample_report or {}
        res_max = max(
            abs(ver.get("eig_max", 1.0)),
            abs(ver.get("lin_res", 1.0)),
            abs(ver.get("const_slack", 1.0)),
        )
        slack = samp.get("worst_slack", 1.0)
        ok = ok and res.status == "Feasible" and res_max <= 1e-6 \
            and slack <= 1e-7 and samp.get("n_samples") == 1000
        worst_res = max(worst_res, res_max)
        worst_slack = max(worst_slack, slack)
    acceptance(
        "2 fixed-coefficient conjecture d=2..10", ok,
        f"max residual {worst_res:.2e}, max sampled slack {worst_slack:.2e}",
    )


def test_criterion_3_gd_step_size_threshold(gd_results, acceptance):
    ok = True
    for L in (1.0, 2.0):
        for g in GD_FEASIBLE:
            ok = ok and gd_results[(g, L)].status == "Feasible"
        bad = gd_results[(2.5, L)]
        ok = ok and bad.status == "Infeasible" and bad.witness is not None
        if bad.witness is not None:
            traj = np.abs(np.asarray(bad.witness["trajectory"]))
            ok = ok and traj[-1] > traj[0]
    acceptance(
        "3 gradient descent feasible at {0.5,1,1.5}/L, infeasible at 2.5/L "
        "with divergence witness", ok,
    )


def test_criterion_4_exact_transition(acceptance):
    gamma = 1.0
    _, outcomes, _ = build_gd(gamma)
    (_, t), = outcomes.outcomes
    want = np.array([[1.0, 0.0, 0.0], [-gamma, 0.0, 0.0], [0.0, 1.0, 0.0]])
    ok = bool(np.allclose(t.sigma, want, atol=1e-12))
    rng = np.random.default_rng(0)
    G = rng.standard_normal((3, 3))
    G = G @ G.T
    Gp = t.sigma.T @ G @ t.sigma
    ok = ok and bool(np.allclose(Gp[2, :], 0.0, atol=1e-12))
    ok = ok and bool(np.allclose(Gp[:, 2], 0.0, atol=1e-12))
    acceptance("4 exact symbolic transition for gradient descent", ok)


def test_criterion_5_pdhg_rate_grid(pdhg_result, acceptance):
    rows = pdhg_result.rows
    ok = len(rows) == 20
    rhos = []
    for row in rows:
        ok = ok and 0.05 <= row["gamma"] <= 1.3
        ok = ok and row["rho"] is not None and row["rho"] < 1.0
        rhos.append(row["rho"] if row["rho"] is not None else 1.0)
    argmin = int(np.argmin(rhos)) if rhos else -1
    interior = 0 < argmin < len(rows) - 1
    ok = ok and interior
    best = f"rho*={min(rhos):.4f} at gamma={rows[argmin]['gamma']:.3f}" \
        if rows else "no rows"
    acceptance(
        "5 PDHG certified rates rho < 1 on the 20-point grid with an "
        "interior optimum", ok, best,
    )


def test_criterion_6_minmax_values(acceptance):
    ok = True
    vals = []
    for g in GD_FEASIBLE:
        res = run_gd(GdConfig(gamma=g, minmax=True))
        ok = ok and res.status == "Feasible" and res.value <= 1e-6
        vals.append(res.value)
    bad = run_gd(GdConfig(gamma=2.5, minmax=True))
    ok = ok and bad.value >= 0.1
    acceptance(
        "6 min-max certification value: ~0 when descent holds, >= 0.1 at "
        "gamma=2.5", ok,
        f"max feasible {max(vals):.2e}, gamma=2.5 -> {bad.value:.3f}",
    )


def test_criterion_7_solver_battery(acceptance):
    t0 = time.monotonic()
    mismatches = 0
    worst = 0.0
    for prog, status, value in random_battery(2024, 200):
        rep = solve(prog, SolveOptions())
        if rep.status != status:
            mismatches += 1
        elif value is not None:
            worst = max(worst, abs(rep.obj_primal - value))
    secs = time.monotonic() - t0
    ok = mismatches == 0 and worst <= 1e-5 and secs < 60.0
    acceptance(
        "7 embedded solver vs independent oracle on 200 programs", ok,
        f"{mismatches} status mismatches, worst value error {worst:.2e}, "
        f"{secs:.1f}s",
    )


def test_criterion_8_soundness_chain(rcd_table, gd_results, pdhg_result,
                                     acceptance):
    audited, ok = 0, True
    results = [res for res, _ in rcd_table.values()]
    results += list(gd_results.values())
    for res in results:
        if res.status != "Feasible":
            continue
        audited += 1
        ok = ok and (res.verification or {}).get("ok") is True
        ok = ok and (res.sample_report or {}).get("ok") is True
    for row in pdhg_result.rows:
        if row.get("rho") is None:
            continue
        audited += 1
        ok = ok and row.get("verified") is True and row.get("sample_ok") is True
    ok = ok and audited > 0
    acceptance(
        "8 every emitted certificate passed independent verification and "
        "sampling", ok, f"{audited} certificates audited",
    )
