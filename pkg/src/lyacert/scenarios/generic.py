"""Generic driver for user-supplied JSON files.

Two input schemas are accepted, distinguished by their top-level keys:

1. Raw conic program: {"c": [...], "b": [...], "A": [[i, j, v], ...],
   "cones": [{"type": "zero"|"nonneg"|"psd", "dim": k}, ...]} -- solved
   directly, returning the solver report.

2. Certification model: {
     "model": <PepModel JSON>,
     "outcomes": {"outcomes": [{"prob": p, "sigma": [[...]],
                  "sigma_f": [[...]], "sigma_f_const": [...]}]},
     "lyapunov": {"support": [...], "nonneg": [<expr>, ...],
                  "decrease": <expr>, "mode": "descent"|"linear_rate",
                  "rho": float?, "q_fixed": {"j": value}?}
   } with <expr> = {"a": const, "b": [[k, v]], "D": [[i, j, v]]} --
   run through assemble / solve / verify.

Malformed input raises :class:`~lyacert.conic.SchemaError`.
"""

from __future__ import annotations

import json
from typing import Mapping

import numpy as np

from ..algorithm import OutcomeSet, TransitionPair
from ..assembly import AssemblyOptions, LyapunovSpec, Mode, assemble
from ..conic import ConicProgram, SchemaError
from ..solver import SolveOptions, solve
from ..symbolic import PepModel, ScalarExpr
from ..verify import verify_certificate
from .common import (
    EXIT_FEASIBLE,
    EXIT_INACCURATE,
    EXIT_INFEASIBLE,
    ScenarioResult,
    certify,
)

__all__ = ["run_generic", "parse_model_file"]


def parse_model_file(d: Mapping):
    """Parse schema 2 into (model, outcomes, spec)."""
    try:
        model = PepModel.from_json_dict(d["model"])
        model.freeze()
        outs = []
        for od in d["outcomes"]["outcomes"]:
            outs.append(
                (
                    float(od["prob"]),
                    TransitionPair(
                        np.asarray(od["sigma"], dtype=float),
                        np.asarray(od["sigma_f"], dtype=float),
                        np.asarray(
                            od.get("sigma_f_const",
                                   [0.0] * model.f_count),
                            dtype=float,
                        ),
                    ),
                )
            )
        outcomes = OutcomeSet(outs)
        ly = d["lyapunov"]
        spec = LyapunovSpec(
            support=tuple(int(i) for i in ly.get("support", [])),
            nonneg_quantities=[
                ScalarExpr.from_json_dict(e) for e in ly.get("nonneg", [])
            ],
            decrease=ScalarExpr.from_json_dict(ly["decrease"]),
            mode=Mode(ly.get("mode", "descent")),
            rho=ly.get("rho"),
            q_fixed={int(k): float(v)
                     for k, v in ly.get("q_fixed", {}).items()},
        )
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as ex:
        raise SchemaError(f"malformed model file: {ex}") from ex
    return model, outcomes, spec


def run_generic(path: str, tol: float = 1e-6,
                seed: int = 0) -> ScenarioResult:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as ex:
            raise SchemaError(f"{path}: invalid JSON: {ex}") from ex
    if not isinstance(d, dict):
        raise SchemaError(f"{path}: top level must be a JSON object")
    params = {"file": path, "tol": tol, "seed": seed}
    if "cones" in d and "model" not in d:
        prog = ConicProgram.from_json_dict(d)
        report = solve(prog, SolveOptions())
        code = {
            "Optimal": EXIT_FEASIBLE,
            "PrimalInfeasible": EXIT_INFEASIBLE,
            "DualInfeasible": EXIT_INFEASIBLE,
        }.get(report.status, EXIT_INACCURATE)
        res = ScenarioResult("solve", params, report.status, code)
        res.rows = [report.to_json_dict()]
        return res
    model, outcomes, spec = parse_model_file(d)
    cp = assemble(model, outcomes, spec,
                  AssemblyOptions(coeff_cap=100.0, feas_tol=tol))
    feasible, status, cert, ver, _ = certify(cp, feas_tol=tol, seed=seed)
    code = {True: EXIT_FEASIBLE, False: EXIT_INFEASIBLE,
            None: EXIT_INACCURATE}[feasible]
    return ScenarioResult(
        "solve", params, status, code, feasible=feasible,
        margin=cert.margin,
        certificate=cert.to_json_dict() if feasible else None,
        verification=ver.to_json_dict() if ver else None,
    )
