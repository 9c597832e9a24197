"""Shared result record and solve/verify glue for the scenarios."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..assembly import Certificate, CertificateProblem, solve_certificate
from ..solver import SolveOptions, SolveReport
from ..verify import sample_check, verify_certificate

EXIT_FEASIBLE = 0
EXIT_INFEASIBLE = 1
EXIT_INACCURATE = 2
EXIT_USAGE = 64

__all__ = [
    "EXIT_FEASIBLE",
    "EXIT_INFEASIBLE",
    "EXIT_INACCURATE",
    "EXIT_USAGE",
    "ScenarioResult",
    "certify",
]


@dataclass
class ScenarioResult:
    scenario: str
    params: dict
    status: str
    exit_code: int
    feasible: bool | None = None
    margin: float | None = None
    value: float | None = None
    rho: float | None = None
    certificate: dict | None = None
    verification: dict | None = None
    sample_report: dict | None = None
    witness: dict | None = None
    rows: list[dict] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        out = {
            "scenario": self.scenario,
            "params": self.params,
            "status": self.status,
            "exit_code": self.exit_code,
        }
        for k in ("feasible", "margin", "value", "rho"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.verification is not None:
            out["verification"] = self.verification
        if self.sample_report is not None:
            out["sample_check"] = self.sample_report
        if self.witness is not None:
            out["witness"] = self.witness
        if self.rows:
            out["rows"] = self.rows
        return out


def certify(
    cp: CertificateProblem,
    sampler=None,
    feas_tol: float = 1e-6,
    sample_tol: float = 1e-7,
    n_samples: int = 1000,
    seed: int = 0,
    solve_opts: SolveOptions | None = None,
):
    """Solve, verify, and sample-check one assembled problem.

    Returns (feasible, status, certificate, verification report,
    sample report); ``feasible`` is None when the solve was inaccurate.
    An emitted "feasible" always implies the independent verification
    passed; sampling failure on a verified certificate raises, since the
    soundness chain forbids it.
    """
    cert, report = solve_certificate(cp, solve_opts)
    if report.status != "Optimal":
        return None, "Inaccurate", cert, None, None
    if cert.margin is not None and cert.margin > feas_tol:
        return False, "Infeasible", cert, None, None
    ver = verify_certificate(cp.model, cp.outcomes, cp.spec, cert, tol=feas_tol * 10)
    if not ver.ok:
        return None, "Inaccurate", cert, ver, None
    cert.residuals = ver.to_json_dict()
    samp = None
    if sampler is not None:
        samp = sample_check(
            sampler, cp.spec, cert, n_samples=n_samples, seed=seed, tol=sample_tol
        )
        if not samp.ok:
            raise AssertionError(
                "soundness violation: verified certificate failed sampling "
                f"(worst slack {samp.worst_slack:.3e})"
            )
    return True, "Feasible", cert, ver, samp
