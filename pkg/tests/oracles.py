"""Independent oracles used by the solver tests.

Programs are constructed so that their status and optimal value are
known *before* the solver runs: optimal instances plant a primal-dual
pair with complementary slackness (value = c@x* = -b@y* by strong
duality), infeasible instances plant a Farkas certificate.  LP
instances are additionally cross-checked against scipy's linprog.
"""

from __future__ import annotations

import numpy as np

from lyacert.conic import Cone, ConicProgram, svec

__all__ = [
    "planted_optimal",
    "planted_primal_infeasible",
    "planted_dual_infeasible",
    "random_battery",
]


def _random_cones(rng, max_psd=6, lp_only=False):
    cones = []
    if rng.random() < 0.5:
        cones.append(Cone("zero", int(rng.integers(1, 4))))
    cones.append(Cone("nonneg", int(rng.integers(1, 6))))
    if not lp_only and rng.random() < 0.8:
        cones.append(Cone("psd", int(rng.integers(2, max_psd + 1))))
    return cones


def _plant_slack_dual(rng, cones):
    """(s*, y*) in K x K* with s* complementary to y* blockwise."""
    s_parts, y_parts = [], []
    for cone in cones:
        if cone.kind == "zero":
            s_parts.append(np.zeros(cone.dim))
            y_parts.append(rng.standard_normal(cone.dim))
        elif cone.kind == "nonneg":
            active = rng.random(cone.dim) < 0.5
            s = np.where(active, 0.0, rng.uniform(0.5, 2.0, cone.dim))
            y = np.where(active, rng.uniform(0.5, 2.0, cone.dim), 0.0)
            s_parts.append(s)
            y_parts.append(y)
        else:
            k = cone.dim
            Q, _ = np.linalg.qr(rng.standard_normal((k, k)))
            active = rng.random(k) < 0.5
            if active.all():
                active[rng.integers(k)] = False
            a = np.where(active, 0.0, rng.uniform(0.5, 2.0, k))
            b = np.where(active, rng.uniform(0.5, 2.0, k), 0.0)
            s_parts.append(svec((Q * a) @ Q.T))
            y_parts.append(svec((Q * b) @ Q.T))
    return np.concatenate(s_parts), np.concatenate(y_parts)


def planted_optimal(rng: np.random.Generator, lp_only=False):
    """Program with known optimal value; returns (program, value)."""
    cones = _random_cones(rng, lp_only=lp_only)
    m = sum(c.size for c in cones)
    n = int(rng.integers(2, m + 2))
    A = rng.standard_normal((m, n))
    x_star = rng.standard_normal(n)
    s_star, y_star = _plant_slack_dual(rng, cones)
    b = A @ x_star + s_star
    c = -A.T @ y_star
    prog = ConicProgram(c, A, b, tuple(cones))
    return prog, float(c @ x_star)


def planted_primal_infeasible(rng: np.random.Generator, lp_only=False):
    """Program with a planted Farkas certificate (A^T y = 0, b@y < 0,
    y in K*)."""
    cones = _random_cones(rng, lp_only=lp_only)
    m = sum(c.size for c in cones)
    n = int(rng.integers(2, max(3, m)))
    # y0 strictly inside K* (identity matrices on PSD blocks)
    y_parts = []
    for cone in cones:
        if cone.kind == "zero":
            y_parts.append(rng.standard_normal(cone.dim))
        elif cone.kind == "nonneg":
            y_parts.append(rng.uniform(0.5, 2.0, cone.dim))
        else:
            y_parts.append(svec(np.eye(cone.dim) * rng.uniform(0.5, 2.0)))
    y0 = np.concatenate(y_parts)
    A = rng.standard_normal((m, n))
    A -= np.outer(y0, y0 @ A) / (y0 @ y0)
    b = rng.standard_normal(m)
    b -= y0 * (y0 @ b + 1.0) / (y0 @ y0)
    c = rng.standard_normal(n)
    return ConicProgram(c, A, b, tuple(cones))


def planted_dual_infeasible(rng: np.random.Generator):
    """Unbounded LP: a feasible ray x0 with c@x0 < 0 (nonneg cone only)."""
    m = int(rng.integers(2, 7))
    n = int(rng.integers(2, 5))
    x0 = rng.standard_normal(n)
    A = rng.standard_normal((m, n))
    flip = (A @ x0) > 0
    A[flip] *= -1.0  # now -A x0 >= 0: the ray keeps slack nonnegative
    b = A @ rng.standard_normal(n) + rng.uniform(0.1, 1.0, m)
    c = rng.standard_normal(n)
    if c @ x0 > 0:
        x0 = -x0
        flip = (A @ x0) > 0
        A[flip] *= -1.0
        b = A @ rng.standard_normal(n) + rng.uniform(0.1, 1.0, m)
    if abs(c @ x0) < 1e-3:
        c = c - x0 * (c @ x0 + 1.0) / (x0 @ x0)
    return ConicProgram(c, A, b, (Cone("nonneg", m),))


def random_battery(seed: int, count: int):
    """(program, expected_status, expected_value_or_None) list."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        kind = i % 4
        if kind in (0, 1):
            prog, val = planted_optimal(rng, lp_only=(kind == 1))
            out.append((prog, "Optimal", val))
        elif kind == 2:
            out.append(
                (planted_primal_infeasible(rng, lp_only=bool(i % 8 == 6)),
                 "PrimalInfeasible", None)
            )
        else:
            out.append((planted_dual_infeasible(rng), "DualInfeasible", None))
    return out
