"""Randomized coordinate descent on block-smooth convex functions.

One iteration picks a block I uniformly from d blocks and performs an
exact block gradient step x+ = x0 - (1/L_I) U_I grad_I f(x0); the model
enumerates all d outcomes.  Leaves are the block components of x0 and of
grad f(x0) (distinct blocks orthogonal); the Lyapunov candidate is
q1 * (f(x0) - f*) + q2 * ||x0 - x*||^2 in the L-weighted norm, with
decrease f(x0) - f*.

``run_rcd`` either searches the minimal q1 (bisection at resolution
1e-3, then minimizes q2), or, with ``check_conjecture``, fixes
(q1, q2, decrease coefficient) = (d-1, d/2, d-2) and certifies that
fixed inequality.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from ..algorithm import IterationMap, OutcomeSet, build_sigma, expect
from ..assembly import (
    AssemblyOptions,
    Certificate,
    LyapunovSpec,
    Mode,
    assemble,
    solve_certificate,
)
from ..classes import BlockSmoothConvex, FunctionHandle
from ..solver import SolveOptions
from ..symbolic import PepModel, PointExpr, ScalarExpr, Sense, dot, f_value
from ..verify import InstanceSample, sample_check, verify_certificate
from .common import (
    EXIT_FEASIBLE,
    EXIT_INACCURATE,
    EXIT_INFEASIBLE,
    ScenarioResult,
    certify,
)

__all__ = ["RcdConfig", "build_rcd", "rcd_sampler", "run_rcd"]


@dataclass
class RcdConfig:
    d: int
    L: tuple[float, ...] | None = None  # defaults to all ones
    check_conjecture: bool = False
    tol: float = 1e-6
    seed: int = 0
    n_samples: int = 1000
    resolution: float = 1e-3

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError("need at least 2 blocks")
        if self.L is None:
            self.L = tuple(1.0 for _ in range(self.d))
        self.L = tuple(float(v) for v in self.L)
        if len(self.L) != self.d or any(v <= 0 for v in self.L):
            raise ValueError("need d positive block constants")


def build_rcd(d: int, L: tuple[float, ...]):
    """Model, outcomes, weighted-norm template, nonneg quantity, decrease."""
    m = PepModel()
    f = FunctionHandle(m, BlockSmoothConvex(L), "f")
    _, _, fs = f.stationary_point()
    xblk = [m.new_leaf(f"x{i}") for i in range(d)]
    gblk = [m.new_leaf(f"g{i}") for i in range(d)]
    x0 = PointExpr.zero()
    for xb in xblk:
        x0 = x0 + xb
    f0 = m.new_f_symbol("f0")
    f.register_block_triple(x0, gblk, f0)
    f.emit_class_constraints()
    for a in range(d):
        for b in range(d):
            if a < b:
                m.add_constraint(dot(xblk[a], xblk[b]), Sense.EQ0, f"orth:x{a}:x{b}")
                m.add_constraint(dot(gblk[a], gblk[b]), Sense.EQ0, f"orth:g{a}:g{b}")
            if a != b:
                m.add_constraint(dot(xblk[a], gblk[b]), Sense.EQ0, f"orth:x{a}:g{b}")
    f1 = []
    for i in range(d):
        x1 = x0 - (1.0 / L[i]) * gblk[i]
        f.emit_block_smooth_constraints(x0, x1, i)
        f1.append(f.value(x1))
    m.freeze()
    outs = []
    for i in range(d):
        pairs = [
            (xblk[j].max_leaf(),
             xblk[j] if j != i else xblk[j] - (1.0 / L[i]) * gblk[i])
            for j in range(d)
        ]
        imap = IterationMap(
            point_pairs=pairs,
            f_pairs=[(fs, f_value(fs)), (f0, f_value(f1[i]))],
            lyapunov_support=tuple(x.max_leaf() for x in xblk),
        )
        outs.append((1.0 / d, build_sigma(m, imap)))
    outcomes = OutcomeSet(outs)
    p = m.leaf_count
    # ||x||^2 in the L-weighted norm: sum_i L_i ||x_i||^2
    weighted = np.zeros((p, p))
    for i, xb in enumerate(xblk):
        weighted[xb.max_leaf(), xb.max_leaf()] = L[i]
    gap = f_value(f0) - f_value(fs)
    return m, outcomes, weighted, gap


def rcd_sampler(d: int, L: tuple[float, ...]):
    """Random block quadratics (1-D blocks) with A_ii <= L_i."""

    def sample(rng: np.random.Generator) -> InstanceSample:
        B = rng.standard_normal((d, d)) / np.sqrt(d)
        A = B.T @ B
        scale = rng.uniform(0.3, 1.0) / max(
            A[i, i] / L[i] for i in range(d)
        )
        A *= scale
        x0 = rng.standard_normal(d)

        def fval(x):
            return 0.5 * float(x @ A @ x)

        def leaves(x):
            g = A @ x
            X = np.zeros((d, 2 * d))
            for i in range(d):
                X[i, i] = x[i]
                X[i, d + i] = g[i]
            fv = np.zeros(2 + d)
            fv[1] = fval(x)
            for i in range(d):
                xi = x.copy()
                xi[i] -= g[i] / L[i]
                fv[2 + i] = fval(xi)
            return X, fv

        X, fv = leaves(x0)
        post = []
        for i in range(d):
            xi = x0.copy()
            xi[i] -= (A @ x0)[i] / L[i]
            Xp, fvp = leaves(xi)
            post.append((1.0 / d, Xp, fvp))
        return InstanceSample(X, fv, post)

    return sample


def _feasible(m, outcomes, weighted, gap, q1, cfg, objective="margin"):
    spec = LyapunovSpec(
        support=(),
        nonneg_quantities=[gap],
        decrease=gap,
        mode=Mode.DESCENT,
        q_fixed={0: q1},
        quad_templates=[weighted],
    )
    opts = AssemblyOptions(
        coeff_cap=1000.0,
        objective=objective,
        margin_bound=cfg.tol if objective != "margin" else None,
        feas_tol=cfg.tol,
    )
    cp = assemble(m, outcomes, spec, opts)
    cert, rep = solve_certificate(cp, SolveOptions())
    ok = (
        rep.status == "Optimal"
        and cert.margin is not None
        and cert.margin <= cfg.tol
    )
    return ok, cert, cp, rep


def _conjecture_spec(m, outcomes, weighted, gap, d):
    """Fixed inequality E[V+] <= (d-2) gap + (d/2)||x0||^2_L with
    V = (d-1) gap + (d/2)||x0||^2_L; folded into descent form by moving
    the fixed quadratic through the expectation into the decrease."""
    wexpr = ScalarExpr.from_dense(0.0, np.zeros(0), weighted)
    decrease = gap + (d / 2.0) * (expect(outcomes, wexpr) - wexpr)
    return LyapunovSpec(
        support=(),
        nonneg_quantities=[gap],
        decrease=decrease,
        mode=Mode.DESCENT,
        q_fixed={0: float(d - 1)},
        quad_templates=None,
    )


def run_rcd(cfg: RcdConfig) -> ScenarioResult:
    params = dataclasses.asdict(cfg)
    m, outcomes, weighted, gap = build_rcd(cfg.d, cfg.L)
    sampler = rcd_sampler(cfg.d, cfg.L)
    if cfg.check_conjecture:
        spec = _conjecture_spec(m, outcomes, weighted, gap, cfg.d)
        cp = assemble(
            m, outcomes, spec,
            AssemblyOptions(coeff_cap=1000.0, feas_tol=cfg.tol),
        )
        feasible, status, cert, ver, samp = certify(
            cp, sampler=sampler, feas_tol=cfg.tol, seed=cfg.seed,
            n_samples=cfg.n_samples,
        )
        code = {True: EXIT_FEASIBLE, False: EXIT_INFEASIBLE, None: EXIT_INACCURATE}[
            feasible
        ]
        return ScenarioResult(
            "rcd", params, status, code, feasible=feasible,
            margin=cert.margin,
            certificate=cert.to_json_dict() if feasible else None,
            verification=ver.to_json_dict() if ver else None,
            sample_report=samp.to_json_dict() if samp else None,
        )
    # bisect the minimal q1 with q2 free, then minimize q2 at that q1
    lo, hi = 0.0, 2.0 * cfg.d
    ok, _, _, rep = _feasible(m, outcomes, weighted, gap, hi, cfg)
    if not ok:
        code = EXIT_INACCURATE if rep.status != "Optimal" else EXIT_INFEASIBLE
        return ScenarioResult("rcd", params, rep.status, code, feasible=False)
    while hi - lo > cfg.resolution:
        mid = (lo + hi) / 2
        ok, _, _, _ = _feasible(m, outcomes, weighted, gap, mid, cfg)
        if ok:
            hi = mid
        else:
            lo = mid
    q1 = hi
    ok, cert, cp, rep = _feasible(
        m, outcomes, weighted, gap, q1, cfg, objective="template_sum"
    )
    if not ok:
        return ScenarioResult("rcd", params, "Inaccurate", EXIT_INACCURATE)
    # template coefficient on the weighted norm = Q diagonal over L weights
    diag = np.diag(cert.Q)[: cfg.d]
    q2 = float(np.mean(diag / np.asarray(cfg.L)))
    ver = verify_certificate(cp.model, cp.outcomes, cp.spec, cert,
                             tol=cfg.tol * 10)
    if not ver.ok:
        return ScenarioResult("rcd", params, "Inaccurate", EXIT_INACCURATE,
                              verification=ver.to_json_dict())
    samp = sample_check(sampler, cp.spec, cert, n_samples=cfg.n_samples,
                        seed=cfg.seed, tol=max(1e-7, cfg.tol))
    if not samp.ok:
        raise AssertionError(
            "soundness violation: verified certificate failed sampling "
            f"(worst slack {samp.worst_slack:.3e})"
        )
    row = {"d": cfg.d, "q1": q1, "q2": q2}
    return ScenarioResult(
        "rcd", params, "Feasible", EXIT_FEASIBLE, feasible=True,
        margin=cert.margin,
        certificate=cert.to_json_dict(),
        verification=ver.to_json_dict(),
        sample_report=samp.to_json_dict(),
        rows=[row],
    )
