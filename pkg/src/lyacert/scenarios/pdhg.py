"""PDHG with extrapolation under a quadratic error bound (QEB).

Saddle problem min_x max_y f(x) + <Mx, y> - g*(y) with f, g* convex,
||M|| <= 1, solved by

    yb1 = prox_{sigma g*}(y0 + sigma M x0)
    x1  = prox_{tau f}(x0 - tau M^T yb1)
    y1  = yb1 + sigma M (x1 - x0)

with tau = sigma = sqrt(gamma).  The saddle point is translated to 0.
The QEB constraint asserts that the beta-smoothed duality gap at
zb1 = (x1, yb1) dominates (eta/2) ||zb1||^2; under it the scenario
bisects the linear rate rho for V quadratic over the tracked leaves
{x0, y0, Mx0, M^T y0, subgrad g*(yb1), M^T yb1, subgrad f(x1)} plus
conic weights on the primal/dual value gaps, with decrease
R = ||x0||^2 + ||y0||^2.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..algorithm import IterationMap, OutcomeSet, build_sigma
from ..assembly import (
    AssemblyOptions,
    LyapunovSpec,
    Mode,
    bisect_rate,
)
from ..classes import Convex, FunctionHandle, OperatorHandle
from ..solver import SolveOptions
from ..symbolic import PepModel, Sense, dot, f_value
from ..verify import InstanceSample, sample_check, verify_certificate
from .common import EXIT_FEASIBLE, EXIT_INACCURATE, ScenarioResult

__all__ = ["PdhgQebConfig", "build_pdhg", "pdhg_sampler", "run_pdhg_qeb"]


@dataclass
class PdhgQebConfig:
    gamma_min: float
    gamma_max: float
    steps: int
    eta: float
    beta: float = 1.0
    tol: float = 1e-6
    seed: int = 0
    n_samples: int = 200
    rate_resolution: float = 5e-3
    plot: str | None = None

    def __post_init__(self) -> None:
        if not (0 < self.gamma_min < self.gamma_max < 4.0 / 3.0):
            raise ValueError("gamma grid must lie inside (0, 4/3)")
        if self.steps < 1:
            raise ValueError("need at least one grid point")
        if self.eta <= 0 or self.beta <= 0:
            raise ValueError("eta and beta must be positive")


def build_pdhg(gamma: float, eta: float, beta: float = 1.0):
    """One PDHG iteration with the QEB constraint; returns the pieces
    needed for rate certification plus the QEB expression (for
    instance filtering)."""
    t = s = math.sqrt(gamma)
    m = PepModel()
    f = FunctionHandle(m, Convex(), "f")
    g = FunctionHandle(m, Convex(), "g")
    K = OperatorHandle(m, 1.0, "K")
    _, _, fs = f.stationary_point()
    _, _, gs = g.stationary_point()
    x0 = m.new_leaf("x0")
    y0 = m.new_leaf("y0")
    m1 = K.apply(x0)
    m0 = K.apply_adjoint(y0)
    yb1, sg, g1v = g.prox(y0 + s * m1, s)
    m2 = K.apply_adjoint(yb1)
    x1, sf, f1v = f.prox(x0 - t * m2, t)
    m3 = K.apply(x1 - x0)
    y1 = yb1 + s * m3
    m4 = K.apply_adjoint(m3)
    mx1 = m1 + m3
    mty1 = m2 + s * m4
    yb2, sg2, g2v = g.prox(y1 + s * mx1, s)
    m5 = K.apply_adjoint(yb2)
    x2, sf2, f2v = f.prox(x1 - t * m5, t)
    xh, sfh, fhv = f.prox(x1 - (1 / beta) * m2, 1 / beta)
    yh, sgh, ghv = g.prox(yb1 + (1 / beta) * mx1, 1 / beta)
    f.emit_class_constraints()
    g.emit_class_constraints()
    K.emit_operator_constraints()
    # smoothed gap at zb1 = (x1, yb1), maximizer approximated by the
    # beta-prox points (xh, yh); QEB: (eta/2)||zb1||^2 <= gap
    gap_lin = f_value(f1v) + f_value(g1v) - f_value(fhv) - f_value(ghv)
    gap_quad = (
        dot(mx1, yh) - dot(xh, m2)
        - (beta / 2) * (dot(xh - x1, xh - x1) + dot(yh - yb1, yh - yb1))
    )
    qeb = (eta / 2) * (dot(x1, x1) + dot(yb1, yb1)) - gap_quad - gap_lin
    m.add_constraint(qeb, Sense.LEQ0, "qeb")
    m.freeze()
    support = tuple(v.max_leaf() for v in (x0, y0, m1, m0, sg, m2, sf))
    imap = IterationMap(
        point_pairs=[
            (x0.max_leaf(), x1), (y0.max_leaf(), y1),
            (m1.max_leaf(), mx1), (m0.max_leaf(), mty1),
            (sg.max_leaf(), sg2), (m2.max_leaf(), m5), (sf.max_leaf(), sf2),
        ],
        f_pairs=[
            (fs, f_value(fs)), (gs, f_value(gs)),
            (f1v, f_value(f2v)), (g1v, f_value(g2v)),
        ],
        lyapunov_support=support,
    )
    outcomes = OutcomeSet.deterministic(build_sigma(m, imap))
    spec = LyapunovSpec(
        support=support,
        nonneg_quantities=[f_value(f1v) - f_value(fs),
                           f_value(g1v) - f_value(gs)],
        decrease=dot(x0, x0) + dot(y0, y0),
        mode=Mode.LINEAR_RATE,
        rho=0.5,
    )
    return m, outcomes, spec, qeb


def pdhg_sampler(gamma: float, eta: float, beta: float, qeb_expr,
                 max_tries: int = 200):
    """Scalar quadratic saddles f = a x^2/2, g* = b y^2/2, M = m scalar.

    Samples are rejected unless the encoded QEB inequality holds at the
    initial state, so every accepted instance satisfies the model.
    """
    t = s = math.sqrt(gamma)

    def leaves(x0, y0, a, b, mv):
        m1 = mv * x0
        m0 = mv * y0
        yb1 = (y0 + s * m1) / (1 + s * b)
        sg = b * yb1
        m2 = mv * yb1
        x1 = (x0 - t * m2) / (1 + t * a)
        sf = a * x1
        m3 = mv * (x1 - x0)
        y1 = yb1 + s * m3
        m4 = mv * m3
        mx1 = mv * x1
        yb2 = (y1 + s * mx1) / (1 + s * b)
        sg2 = b * yb2
        m5 = mv * yb2
        x2 = (x1 - t * m5) / (1 + t * a)
        sf2 = a * x2
        xh = (x1 - (1 / beta) * m2) / (1 + a / beta)
        sfh = a * xh
        yh = (yb1 + (1 / beta) * mx1) / (1 + b / beta)
        sgh = b * yh
        X = np.array([[x0, y0, m1, m0, sg, m2, sf, m3, m4, sg2, m5, sf2,
                       sfh, sgh]])
        fv = np.array([0.0, 0.0, b * yb1**2 / 2, a * x1**2 / 2,
                       b * yb2**2 / 2, a * x2**2 / 2, a * xh**2 / 2,
                       b * yh**2 / 2])
        return X, fv, x1, y1

    def sample(rng: np.random.Generator) -> InstanceSample:
        for _ in range(max_tries):
            a = rng.uniform(0.05, 5.0)
            b = rng.uniform(0.05, 5.0)
            mv = rng.uniform(-1.0, 1.0)
            x0 = rng.standard_normal()
            y0 = rng.standard_normal()
            X, fv, x1, y1 = leaves(x0, y0, a, b, mv)
            if qeb_expr.evaluate(X, fv) <= 1e-12:
                Xp, fvp, _, _ = leaves(x1, y1, a, b, mv)
                return InstanceSample(X, fv, [(1.0, Xp, fvp)])
        raise RuntimeError("could not sample a QEB-satisfying instance")

    return sample


def _grid_point(args) -> dict:
    (gamma, cfg_dict) = args
    cfg = PdhgQebConfig(**cfg_dict)
    m, outcomes, spec, qeb = build_pdhg(gamma, cfg.eta, cfg.beta)
    res = bisect_rate(
        m, outcomes, spec, lo=0.02, hi=0.995, tol=cfg.rate_resolution,
        options=AssemblyOptions(coeff_cap=100.0, feas_tol=cfg.tol),
        solve_opts=SolveOptions(),
    )
    row = {"gamma": gamma, "rho": res.rho,
           "one_minus_rho": None if res.rho is None else 1.0 - res.rho,
           "status": "Feasible" if res.rho is not None else "NoCertificate"}
    if res.certificate is not None:
        ver = verify_certificate(m, outcomes,
                                 dataclasses.replace(spec, rho=res.rho),
                                 res.certificate, tol=cfg.tol * 10)
        samp = sample_check(
            pdhg_sampler(gamma, cfg.eta, cfg.beta, qeb),
            spec, res.certificate, n_samples=cfg.n_samples,
            seed=cfg.seed, tol=1e-5,
        )
        row["verified"] = bool(ver.ok)
        row["sample_ok"] = bool(samp.ok)
        row["sample_worst"] = samp.worst_slack
        if ver.ok and not samp.ok:
            raise AssertionError(
                "soundness violation at gamma="
                f"{gamma}: sampled slack {samp.worst_slack:.3e}"
            )
        if not ver.ok:
            row["status"] = "Inaccurate"
            row["rho"] = None
            row["one_minus_rho"] = None
    return row


def run_pdhg_qeb(cfg: PdhgQebConfig) -> ScenarioResult:
    params = dataclasses.asdict(cfg)
    if cfg.steps == 1:
        grid = [cfg.gamma_min]
    else:
        grid = list(np.linspace(cfg.gamma_min, cfg.gamma_max, cfg.steps))
    jobs = [(g, params) for g in grid]
    workers = int(os.environ.get("LYACERT_THREADS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
            rows = list(ex.map(_grid_point, jobs))
    else:
        rows = [_grid_point(j) for j in jobs]
    certified = [r for r in rows if r["rho"] is not None]
    status = "Feasible" if certified else "Inaccurate"
    code = EXIT_FEASIBLE if certified else EXIT_INACCURATE
    if cfg.plot:
        from ..svg import write_line_plot

        pts = [(r["gamma"], r["one_minus_rho"]) for r in certified]
        write_line_plot(
            cfg.plot,
            [(f"eta={cfg.eta}", pts)],
            x_label="gamma",
            y_label="1 - rho",
            log_y=True,
        )
    return ScenarioResult("pdhg-qeb", params, status, code, rows=rows)
