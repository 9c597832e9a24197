"""Experimental: primal-dual method with random coordinate updates.

Setup: two primal blocks, one dual block, uniform block probabilities
(1/2, 1/2), extrapolation factor 2, no smooth term.  Step sizes satisfy
2 * tau_i * sigma * ||M_i||^2 = gamma with ||M_i|| <= 1, tau_i = sigma =
sqrt(gamma / 2).  The saddle point is translated to 0 (each g_i and h*
minimized at 0).

The scenario runs the min-max value mode: it reports the smallest
achievable worst-case value of E[V(next)] + R - V over the desk-scale
template below.  Small values (~0) suggest convergence; clearly positive
values mean no Lyapunov function of this restricted shape exists.

Desk-scale simplifications (this template is a scenario constant):
- V is quadratic over {x0^1, x0^2, y0, M_1 x0^1, M_2 x0^2} plus a conic
  weight on the primal value gap sum_i (g_i(x0^i) - g_i*); the dual-side
  gap is dropped because its one-step image is not expressible over the
  tracked leaves at this scale.
- R is the expected squared distance between consecutive iterates
  scaled by the inverse step sizes.

No acceptance guarantee: results may be Inaccurate and are not gated.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from ..algorithm import IterationMap, OutcomeSet, build_sigma
from ..assembly import (
    LyapunovSpec,
    Mode,
    Normalization,
    assemble_minmax_value,
)
from ..classes import Convex, FunctionHandle, OperatorHandle
from ..solver import SolveOptions, solve
from ..symbolic import PepModel, ScalarExpr, Sense, dot, f_value
from .common import EXIT_FEASIBLE, EXIT_INACCURATE, ScenarioResult

__all__ = ["PurecdConfig", "run_purecd"]


@dataclass
class PurecdConfig:
    gamma: float
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")


def build_purecd(gamma: float):
    n = 2
    tau = sigma = math.sqrt(gamma / n)
    theta = 2.0
    m = PepModel()
    gfuns = [FunctionHandle(m, Convex(), f"g{i}") for i in range(n)]
    h = FunctionHandle(m, Convex(), "h")
    Ms = [OperatorHandle(m, 1.0, f"M{i}") for i in range(n)]
    gstars = [gf.stationary_point()[2] for gf in gfuns]
    _, _, hstar = h.stationary_point()
    xb = [m.new_leaf(f"x0_{i}") for i in range(n)]
    y0 = m.new_leaf("y0")
    mx = [Ms[i].apply(xb[i]) for i in range(n)]
    Mx0 = mx[0] + mx[1]
    yb1, hs1, hval1 = h.prox(y0 + sigma * Mx0, sigma)
    mty = [Ms[i].apply_adjoint(yb1) for i in range(n)]
    xbar, gsub, gval1 = [], [], []
    for i in range(n):
        pt, sub, val = gfuns[i].prox(xb[i] - tau * mty[i], tau)
        xbar.append(pt)
        gsub.append(sub)
        gval1.append(val)
    mxbar = [Ms[i].apply(xbar[i]) for i in range(n)]
    # value symbols at the pre-iterate blocks (with subgradients so the
    # interpolation inequalities bind them)
    g0sub, g0val = [], []
    for i in range(n):
        sub, val = gfuns[i].oracle(xb[i])
        g0sub.append(sub)
        g0val.append(val)
    for gf in gfuns:
        gf.emit_class_constraints()
    h.emit_class_constraints()
    for K in Ms:
        K.emit_operator_constraints()
    # primal blocks live in orthogonal subspaces
    block_vecs = [[xb[i], gsub[i], g0sub[i], mty[i]] for i in range(n)]
    for u in block_vecs[0]:
        for w in block_vecs[1]:
            m.add_constraint(dot(u, w), Sense.EQ0, "orth:block")
    m.freeze()

    # outcome i: block i accepts the bar point, y extrapolates through it
    outs = []
    support = tuple(v.max_leaf() for v in (xb[0], xb[1], y0, mx[0], mx[1]))
    for i in range(n):
        y1 = yb1 + sigma * theta * (mxbar[i] - mx[i])
        pairs = []
        for j in range(n):
            pairs.append((xb[j].max_leaf(), xbar[j] if j == i else xb[j]))
            pairs.append((mx[j].max_leaf(), mxbar[j] if j == i else mx[j]))
        pairs.append((y0.max_leaf(), y1))
        fpairs = [(hstar, f_value(hstar))]
        for j in range(n):
            fpairs.append((gstars[j], f_value(gstars[j])))
            fpairs.append(
                (g0val[j], f_value(gval1[j] if j == i else g0val[j]))
            )
        imap = IterationMap(pairs, fpairs, support)
        outs.append((1.0 / n, build_sigma(m, imap)))
    outcomes = OutcomeSet(outs)

    primal_gap = ScalarExpr()
    for i in range(n):
        primal_gap = primal_gap + f_value(g0val[i]) - f_value(gstars[i])
    R = ScalarExpr()
    for i in range(n):
        y1 = yb1 + sigma * theta * (mxbar[i] - mx[i])
        dx = xb[i] - xbar[i]
        dy = y0 - y1
        R = R + (1.0 / n) * ((1.0 / tau) * dot(dx, dx)
                             + (1.0 / sigma) * dot(dy, dy))
    spec = LyapunovSpec(
        support=support,
        nonneg_quantities=[primal_gap],
        decrease=R,
        mode=Mode.DESCENT,
    )
    init = (xb[0].max_leaf(), xb[1].max_leaf(), y0.max_leaf())
    return m, outcomes, spec, init


def run_purecd(cfg: PurecdConfig) -> ScenarioResult:
    params = dataclasses.asdict(cfg)
    m, outcomes, spec, init = build_purecd(cfg.gamma)
    cp = assemble_minmax_value(
        m, outcomes, spec, Normalization(initial_leaves=init)
    )
    report = solve(cp.program, SolveOptions())
    status = "Feasible" if report.status == "Optimal" else report.status
    code = EXIT_FEASIBLE if report.status == "Optimal" else EXIT_INACCURATE
    return ScenarioResult(
        "purecd", params, status, code,
        value=float(report.obj_primal),
    )
