"""Independent certificate verification and instance-sampling checks.

Nothing here trusts the conic assembly or the solver: the dual
conditions are recomputed from the model's dense constraint data and the
transported expressions, and the sampling check runs the actual
algorithm on explicit random instances and evaluates the certified
inequality numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algorithm import OutcomeSet, expect
from .assembly import Certificate, LyapunovSpec, Mode
from .symbolic import PepModel, ScalarExpr, Sense

__all__ = [
    "VerificationReport",
    "verify_certificate",
    "InstanceSample",
    "SampleCheckReport",
    "sample_check",
    "divergence_witness",
]


@dataclass
class VerificationReport:
    ok: bool
    eig_max: float  # largest eigenvalue of any aggregated matrix
    lin_res: float  # infinity norm of any aggregated linear residual
    const_slack: float  # largest aggregated constant term
    min_multiplier: float  # most negative of (q, lam)
    min_eig_Q: float
    min_eig_Lam: float
    off_support: float  # largest |Q| entry outside the declared support
    tol: float

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "eig_max": self.eig_max,
            "lin_res": self.lin_res,
            "const_slack": self.const_slack,
            "min_multiplier": self.min_multiplier,
            "min_eig_Q": self.min_eig_Q,
            "min_eig_Lam": self.min_eig_Lam,
            "off_support": self.off_support,
            "tol": self.tol,
        }


def _lyapunov_exprs(
    spec: LyapunovSpec, Q: np.ndarray, q: np.ndarray, p: int
) -> tuple[ScalarExpr, ScalarExpr]:
    """(quadratic part, affine part) of V as symbolic expressions."""
    vq = ScalarExpr.from_dense(0.0, np.zeros(0), Q)
    va = ScalarExpr()
    for qj, n in zip(q, spec.nonneg_quantities):
        va = va + float(qj) * n
    return vq, va


def verify_certificate(
    model: PepModel,
    outcomes: OutcomeSet,
    spec: LyapunovSpec,
    cert: Certificate,
    tol: float = 1e-6,
) -> VerificationReport:
    """Recompute the dual feasibility conditions with dense arithmetic.

    Checks, for each certified system expression ``expr``:
      (a) eig_max( quad(expr) - sum lam D - sum nu D + sum <Lam, blk> ) <= tol
      (b) || lin(expr) - sum lam b - sum nu b ||_inf <= tol
      (c) const(expr) - sum lam a - sum nu a <= tol
    plus sign conditions Q >= 0 on its support (and zero off it),
    q >= -tol, lam >= -tol, Lam >= 0.
    """
    p = model.leaf_count
    f = model.f_count
    Q = np.asarray(cert.Q, dtype=float)
    q = np.asarray(cert.q, dtype=float)
    vq, va = _lyapunov_exprs(spec, Q, q, p)
    V = vq + va
    EV = expect(outcomes, V)
    if cert.mode == Mode.LINEAR_RATE:
        rho = float(cert.rho)
        exprs = [EV - rho * V, expect(outcomes, spec.decrease) - EV]
    else:
        exprs = [EV + spec.decrease - V]
    if len(exprs) != len(cert.multipliers):
        raise ValueError("certificate multiplier count does not match mode")

    ineq, eq = [], []
    for a, b, D, sense, tag in model.constraint_data():
        (ineq if sense == Sense.LEQ0 else eq).append((a, b, D))
    lmis = model.lmi_data()

    eig_max = -np.inf
    lin_res = 0.0
    const_slack = -np.inf
    min_mult = float(np.min(q)) if q.size else 0.0
    min_eig_Lam = np.inf
    for expr, mult in zip(exprs, cert.multipliers):
        lam = np.asarray(mult["lam"], dtype=float)
        nu = np.asarray(mult["nu"], dtype=float)
        Lams = [np.asarray(L, dtype=float) for L in mult["Lam"]]
        M = expr.quad_matrix(p)
        v = expr.lin_vector(f)
        c = expr.const
        for lk, (a, b, D) in zip(lam, ineq):
            M = M - lk * D
            v = v - lk * b
            c = c - lk * a
        for nk, (a, b, D) in zip(nu, eq):
            M = M - nk * D
            v = v - nk * b
            c = c - nk * a
        for L, blk in zip(Lams, lmis):
            M = M + np.einsum("rs,rsij->ij", L, blk)
            min_eig_Lam = min(
                min_eig_Lam, float(np.linalg.eigvalsh((L + L.T) / 2)[0])
            )
        eig_max = max(eig_max, float(np.linalg.eigvalsh((M + M.T) / 2)[-1]))
        lin_res = max(lin_res, float(np.max(np.abs(v))) if v.size else 0.0)
        const_slack = max(const_slack, float(c))
        if lam.size:
            min_mult = min(min_mult, float(np.min(lam)))
    if min_eig_Lam == np.inf:
        min_eig_Lam = 0.0

    min_eig_Q = float(np.linalg.eigvalsh((Q + Q.T) / 2)[0]) if p else 0.0
    # Q may only touch the declared support block or template patterns
    allowed = np.zeros((p, p), dtype=bool)
    if spec.support:
        sup = np.asarray(spec.support)
        allowed[np.ix_(sup, sup)] = True
    if spec.quad_templates is not None:
        for B in spec.quad_templates:
            allowed |= np.asarray(B) != 0.0
    off = np.where(allowed, 0.0, np.abs(Q))
    off_support = float(off.max()) if off.size else 0.0

    ok = bool(
        eig_max <= tol
        and lin_res <= tol
        and const_slack <= tol
        and min_mult >= -tol
        and min_eig_Q >= -tol
        and min_eig_Lam >= -tol
        and off_support <= tol
    )
    return VerificationReport(
        ok,
        eig_max,
        lin_res,
        const_slack,
        min_mult,
        min_eig_Q,
        min_eig_Lam,
        off_support,
        tol,
    )


# ---------------------------------------------------------------------------
# sampling


@dataclass
class InstanceSample:
    """One explicit instance: leaf vectors (columns) + F values, pre and post.

    ``post`` enumerates every random outcome of one iteration with its
    probability; deterministic algorithms have a single entry.
    """

    leaf_vectors: np.ndarray  # (dim, leaf_count)
    f_values: np.ndarray  # (f_count,)
    post: list[tuple[float, np.ndarray, np.ndarray]]


@dataclass
class SampleCheckReport:
    ok: bool
    worst_slack: float
    worst_nonneg: float  # most negative sampled value of the N quantities
    n_samples: int
    seed: int
    tol: float

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "worst_slack": self.worst_slack,
            "worst_nonneg": self.worst_nonneg,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "tol": self.tol,
        }


def sample_check(
    sampler: Callable[[np.random.Generator], InstanceSample],
    spec: LyapunovSpec,
    cert: Certificate,
    n_samples: int = 1000,
    seed: int = 0,
    tol: float = 1e-7,
) -> SampleCheckReport:
    """Evaluate the certified inequality on sampled explicit instances.

    Descent mode checks E[V(next)] + R - V <= tol; linear-rate mode
    checks E[V(next)] <= rho V + tol and E[R(next)] <= E[V(next)] + tol.
    The expectation enumerates the listed outcomes exactly.
    """
    rng = np.random.default_rng(seed)
    Q = np.asarray(cert.Q, dtype=float)
    q = np.asarray(cert.q, dtype=float)

    def V_of(X: np.ndarray, fv: np.ndarray) -> float:
        G = X.T @ X
        total = float(np.sum(Q * G))
        for qj, n in zip(q, spec.nonneg_quantities):
            total += float(qj) * n.evaluate(X, fv)
        return total

    worst = -np.inf
    worst_nn = np.inf
    for _ in range(n_samples):
        s = sampler(rng)
        V = V_of(s.leaf_vectors, s.f_values)
        R = spec.decrease.evaluate(s.leaf_vectors, s.f_values)
        for n in spec.nonneg_quantities:
            worst_nn = min(
                worst_nn, n.evaluate(s.leaf_vectors, s.f_values)
            )
        EVp = 0.0
        ERp = 0.0
        for prob, Xp, fvp in s.post:
            EVp += prob * V_of(Xp, fvp)
            ERp += prob * spec.decrease.evaluate(Xp, fvp)
        if cert.mode == Mode.LINEAR_RATE:
            rho = float(cert.rho)
            worst = max(worst, EVp - rho * V, ERp - EVp)
        else:
            worst = max(worst, EVp + R - V)
    if worst_nn == np.inf:
        worst_nn = 0.0
    return SampleCheckReport(
        bool(worst <= tol), float(worst), float(worst_nn), n_samples, seed, tol
    )


def divergence_witness(
    step: Callable[[float, float], float],
    params: Sequence[float],
    n_steps: int = 25,
    growth: float = 1.0 + 1e-9,
) -> dict | None:
    """Search 1-D quadratic instances for a diverging trajectory.

    ``step(x, curvature)`` performs one iteration of the algorithm on
    f(x) = curvature/2 * x^2; ``params`` lists candidate curvatures.
    Returns {curvature, trajectory} for the first trajectory whose
    distance to 0 grows geometrically, else None.
    """
    for curv in params:
        x = 1.0
        traj = [x]
        for _ in range(n_steps):
            x = step(x, curv)
            traj.append(x)
            if not np.isfinite(x):
                break
        if abs(traj[-1]) > growth ** n_steps * abs(traj[0]):
            return {"curvature": float(curv), "trajectory": traj}
    return None
