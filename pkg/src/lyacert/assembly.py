"""Assemble Lyapunov-existence conditions into conic programs.

The target inequality (descent mode) is

    E_w[ V(next) ] + R - V <= 0   for every instance in the class,

with V(x) = <Q, x x^T> + q @ N(f, x), Q PSD on a support set of leaves,
q >= 0, and N a list of class-nonnegative scalar quantities.  The inner
"for every instance" quantifier ranges over Gram matrices G >= 0 and
value vectors F satisfying the model constraints; dualizing it with
multipliers lam >= 0 (inequalities), nu free (equalities) and Lam >= 0
(LMI blocks) gives the sufficient conditions

    (a)  quad(expr) - sum lam_i D_i - sum nu_j D_j + sum <Lam_k, blk_k> <= 0
         (matrix inequality over the full leaf basis),
    (b)  lin(expr)  - sum lam_i b_i - sum nu_j b_j  = 0,
    (c)  const(expr) - sum lam_i a_i - sum nu_j a_j <= 0,

which are jointly conic in (Q, q, lam, nu, Lam).  Linear-rate mode emits
two such systems sharing (Q, q): [E V(next) <= rho V] and
[E R(next) <= E V(next)], each with independent multipliers.

A robustness device used throughout: instead of testing exact
feasibility, minimize a scalar margin u with (a) relaxed to <= u*I,
|(b)| <= u and (c) <= u.  The optimal margin is ~0 exactly when a
certificate exists, and the program always has interior, which the
interior-point solver likes.  Feasibility queries test u* against a
small tolerance and then re-verify the returned certificate.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .algorithm import OutcomeSet, transport
from .conic import Cone, ConicProgram, smat, svec, svec_dim, svec_identity
from .solver import SolveOptions, SolveReport, solve
from .symbolic import PepModel, ScalarExpr, Sense

__all__ = [
    "Mode",
    "LyapunovSpec",
    "AssemblyOptions",
    "Normalization",
    "CertificateProblem",
    "Certificate",
    "assemble",
    "assemble_minmax_value",
    "solve_certificate",
    "bisect_rate",
    "BisectResult",
]


class Mode(str, Enum):
    DESCENT = "descent"
    LINEAR_RATE = "linear_rate"
    MINMAX_VALUE = "minmax_value"


@dataclass
class LyapunovSpec:
    """Shape of the candidate Lyapunov function and the required decrease."""

    support: tuple[int, ...]
    nonneg_quantities: list[ScalarExpr]
    decrease: ScalarExpr
    mode: Mode
    rho: float | None = None
    q_fixed: dict[int, float] = field(default_factory=dict)
    quad_templates: list[np.ndarray] | None = None

    def __post_init__(self) -> None:
        self.support = tuple(sorted(set(self.support)))
        if self.mode == Mode.LINEAR_RATE:
            if self.rho is None or not (0 < self.rho < 1):
                raise ValueError("linear-rate mode needs 0 < rho < 1")
        for n in self.nonneg_quantities:
            if not n.is_affine_in_f():
                raise ValueError("nonneg quantities must have no quadratic part")
        for j in self.q_fixed:
            if not 0 <= j < len(self.nonneg_quantities):
                raise ValueError("q_fixed index out of range")


@dataclass
class AssemblyOptions:
    margin: bool = True
    margin_bound: float | None = None  # upper bound on the margin variable
    objective: str = "margin"  # margin | template_sum | q_sum | zero
    coeff_cap: float | None = None  # bound on tr(Q) + sum(q)
    feas_tol: float = 1e-7


@dataclass
class Normalization:
    """Scale fixing for the min-max value mode."""

    initial_leaves: tuple[int, ...]
    coeff_cap: float = 100.0


# ---------------------------------------------------------------------------
# shared system semantics


class _Systems:
    """Dense data for the per-system expressions as functions of (Q, q)."""

    def __init__(self, model: PepModel, outcomes: OutcomeSet, spec: LyapunovSpec):
        p = model.leaf_count
        f = model.f_count
        self.p, self.f = p, f
        self.spec = spec
        self.outcomes = outcomes
        nq = len(spec.nonneg_quantities)
        self.nq = nq
        # N and its transported expectation
        self.N_lin = np.zeros((f, nq))
        self.N_const = np.zeros(nq)
        self.TN_lin = np.zeros((f, nq))
        self.TN_const = np.zeros(nq)
        for j, n in enumerate(spec.nonneg_quantities):
            self.N_lin[:, j] = n.lin_vector(f)
            self.N_const[j] = n.const
            acc_l = np.zeros(f)
            acc_c = 0.0
            for prob, t in outcomes.outcomes:
                te = transport(n, t)
                acc_l += prob * te.lin_vector(f)
                acc_c += prob * te.const
            self.TN_lin[:, j] = acc_l
            self.TN_const[j] = acc_c
        # decrease R and its transported expectation
        R = spec.decrease
        self.R_quad = R.quad_matrix(p)
        self.R_lin = R.lin_vector(f)
        self.R_const = R.const
        self.TR_quad = np.zeros((p, p))
        self.TR_lin = np.zeros(f)
        self.TR_const = 0.0
        for prob, t in outcomes.outcomes:
            te = transport(R, t)
            self.TR_quad += prob * te.quad_matrix(p)
            self.TR_lin += prob * te.lin_vector(f)
            self.TR_const += prob * te.const
        self.sigmas = [(prob, t.sigma) for prob, t in outcomes.outcomes]

    def expected_Q(self, Q: np.ndarray) -> np.ndarray:
        out = np.zeros_like(Q)
        for prob, s in self.sigmas:
            out += prob * (s @ Q @ s.T)
        return out

    def n_systems(self) -> int:
        return 2 if self.spec.mode == Mode.LINEAR_RATE else 1

    def eval(
        self, k: int, Q: np.ndarray, q: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, float]:
        """(matrix, linear, const) parts of system ``k`` at (Q, q)."""
        EQ = self.expected_Q(Q)
        if self.spec.mode == Mode.LINEAR_RATE:
            rho = float(self.spec.rho)
            if k == 0:  # E V(next) - rho V <= 0
                M = EQ - rho * Q
                v = (self.TN_lin - rho * self.N_lin) @ q
                c = float((self.TN_const - rho * self.N_const) @ q)
            else:  # E R(next) - E V(next) <= 0
                M = self.TR_quad - EQ
                v = self.TR_lin - self.TN_lin @ q
                c = self.TR_const - float(self.TN_const @ q)
            return M, v, c
        # descent / minmax: E V(next) + R - V <= 0
        M = EQ - Q + self.R_quad
        v = (self.TN_lin - self.N_lin) @ q + self.R_lin
        c = float((self.TN_const - self.N_const) @ q) + self.R_const
        return M, v, c


# ---------------------------------------------------------------------------
# problem container and certificate


@dataclass
class CertificateProblem:
    program: ConicProgram
    model: PepModel
    outcomes: OutcomeSet
    spec: LyapunovSpec
    options: AssemblyOptions
    varmap: dict
    systems: _Systems

    def to_solver_json(self) -> str:
        return self.program.to_json()


@dataclass
class Certificate:
    Q: np.ndarray  # full leaf-basis size, supported on spec.support
    q: np.ndarray
    multipliers: list[dict]  # per system: {"lam": ..., "nu": ..., "Lam": [...]}
    margin: float | None
    objective: float | None
    mode: Mode
    rho: float | None
    residuals: dict | None = None  # filled by the verification oracle

    def to_json_dict(self) -> dict:
        out = {
            "Q": self.Q.tolist(),
            "q": self.q.tolist(),
            "multipliers": [
                {
                    "lam": m["lam"].tolist(),
                    "nu": m["nu"].tolist(),
                    "Lam": [L.tolist() for L in m["Lam"]],
                    "tags": m.get("tags", {}),
                }
                for m in self.multipliers
            ],
            "margin": self.margin,
            "objective": self.objective,
            "mode": self.mode.value,
            "rho": self.rho,
        }
        if self.residuals is not None:
            out["verification"] = self.residuals
        return out


# ---------------------------------------------------------------------------
# assembly


def _constraint_split(model: PepModel):
    ineq, eq = [], []
    for a, b, D, sense, tag in model.constraint_data():
        (ineq if sense == Sense.LEQ0 else eq).append((a, b, D, tag))
    return ineq, eq


def assemble(
    model: PepModel,
    outcomes: OutcomeSet,
    spec: LyapunovSpec,
    options: AssemblyOptions | None = None,
) -> CertificateProblem:
    """Build the conic program for descent / linear-rate certificates."""
    if not model.frozen:
        raise ValueError("model must be frozen before assembly")
    options = options or AssemblyOptions()
    p = model.leaf_count
    f = model.f_count
    if spec.support and max(spec.support) >= p:
        raise ValueError("lyapunov support references leaves outside the model")
    sysd = _Systems(model, outcomes, spec)
    nsys = sysd.n_systems()
    ineq, eq = _constraint_split(model)
    lmis = model.lmi_data()
    n_ineq, n_eq = len(ineq), len(eq)

    # --- variable layout -----------------------------------------------
    varmap: dict = {}
    n = 0
    use_templates = spec.quad_templates is not None
    if use_templates:
        templates = [np.asarray(B, dtype=float) for B in spec.quad_templates]
        for B in templates:
            if B.shape != (p, p):
                raise ValueError("templates must be full leaf-basis size")
        nt = len(templates)
        varmap["theta"] = slice(n, n + nt)
        n += nt
        ns = 0
    else:
        templates = []
        ns = len(spec.support)
        varmap["Qs"] = slice(n, n + svec_dim(ns))
        n += svec_dim(ns)
    free_q = [j for j in range(sysd.nq) if j not in spec.q_fixed]
    varmap["q_free"] = slice(n, n + len(free_q))
    varmap["q_free_idx"] = list(free_q)
    n += len(free_q)
    sys_slices = []
    for k in range(nsys):
        entry = {"lam": slice(n, n + n_ineq)}
        n += n_ineq
        entry["nu"] = slice(n, n + n_eq)
        n += n_eq
        entry["Lam"] = []
        for arr in lmis:
            kk = arr.shape[0]
            entry["Lam"].append((kk, slice(n, n + svec_dim(kk))))
            n += svec_dim(kk)
        sys_slices.append(entry)
    varmap["systems"] = sys_slices
    if options.margin:
        varmap["u"] = n
        n += 1

    emb = np.zeros((p, ns)) if not use_templates else None
    if emb is not None:
        for i, leaf in enumerate(spec.support):
            emb[leaf, i] = 1.0

    def q_full_of(x_qfree: np.ndarray) -> np.ndarray:
        q = np.zeros(sysd.nq)
        for j, v in spec.q_fixed.items():
            q[j] = v
        q[free_q] = x_qfree
        return q

    q_fixed_vec = q_full_of(np.zeros(len(free_q)))

    # influence of each V-variable on (M, v, c) per system, via linearity
    v_vars: list[tuple[int, list[tuple[np.ndarray, np.ndarray, float]]]] = []
    base_parts = [sysd.eval(k, np.zeros((p, p)), q_fixed_vec) for k in range(nsys)]

    def influences(Q: np.ndarray, q: np.ndarray):
        out = []
        for k in range(nsys):
            M, v, c = sysd.eval(k, Q, q + q_fixed_vec)
            M0, v0, c0 = base_parts[k]
            out.append((M - M0, v - v0, c - c0))
        return out

    if use_templates:
        for t_idx, B in enumerate(templates):
            v_vars.append(
                (varmap["theta"].start + t_idx, influences(B, np.zeros(sysd.nq)))
            )
    else:
        for r in range(svec_dim(ns)):
            ev = np.zeros(svec_dim(ns))
            ev[r] = 1.0
            Qs = smat(ev, ns)
            Qfull = emb @ Qs @ emb.T
            v_vars.append(
                (varmap["Qs"].start + r, influences(Qfull, np.zeros(sysd.nq)))
            )
    for pos, j in enumerate(free_q):
        ej = np.zeros(sysd.nq)
        ej[j] = 1.0
        v_vars.append(
            (varmap["q_free"].start + pos, influences(np.zeros((p, p)), ej))
        )

    # --- rows ----------------------------------------------------------
    rows_A: list[np.ndarray] = []
    rows_b: list[float] = []
    cones: list[Cone] = []

    def add_rows(A_blk: np.ndarray, b_blk: np.ndarray, cone: Cone) -> None:
        rows_A.append(np.atleast_2d(A_blk))
        rows_b.append(np.atleast_1d(b_blk))
        cones.append(cone)

    u_col = varmap.get("u")

    # (b) / margin rows and (c) rows, then (a) PSD blocks per system
    for k in range(nsys):
        sl = sys_slices[k]
        M0, v0, c0 = base_parts[k]
        # v(x) = v0 + sum var*vinf - lam@b_i - nu@b_eq
        Vmat = np.zeros((f, n))
        for col, infl in v_vars:
            Vmat[:, col] = infl[k][1]
        for i, (a, b, D, tag) in enumerate(ineq):
            Vmat[:, sl["lam"].start + i] = -b
        for j, (a, b, D, tag) in enumerate(eq):
            Vmat[:, sl["nu"].start + j] = -b
        if options.margin:
            A1 = Vmat.copy()
            A1[:, u_col] = -1.0
            add_rows(A1, -v0, Cone("nonneg", f))
            A2 = -Vmat.copy()
            A2[:, u_col] = -1.0
            add_rows(A2, v0, Cone("nonneg", f))
        else:
            add_rows(Vmat, -v0, Cone("zero", f))
        # (c) constant row
        crow = np.zeros(n)
        for col, infl in v_vars:
            crow[col] = infl[k][2]
        for i, (a, b, D, tag) in enumerate(ineq):
            crow[sl["lam"].start + i] = -a
        for j, (a, b, D, tag) in enumerate(eq):
            crow[sl["nu"].start + j] = -a
        if options.margin:
            crow[u_col] = -1.0
        if np.any(crow != 0.0) or c0 != 0.0:
            add_rows(crow, -c0, Cone("nonneg", 1))
        # (a) matrix row block: svec(Mtilde(x) - u I) + s = 0, s in PSD(p)
        d = svec_dim(p)
        Ablk = np.zeros((d, n))
        for col, infl in v_vars:
            Ablk[:, col] = svec(infl[k][0])
        for i, (a, b, D, tag) in enumerate(ineq):
            Ablk[:, sl["lam"].start + i] = -svec(D)
        for j, (a, b, D, tag) in enumerate(eq):
            Ablk[:, sl["nu"].start + j] = -svec(D)
        for arr, (kk, lam_sl) in zip(lmis, sl["Lam"]):
            for r in range(svec_dim(kk)):
                ev = np.zeros(svec_dim(kk))
                ev[r] = 1.0
                Lb = smat(ev, kk)
                contrib = np.einsum("rs,rsij->ij", Lb, arr)
                Ablk[:, lam_sl.start + r] = svec(contrib)
        if options.margin:
            Ablk[:, u_col] = -svec_identity(p)
        add_rows(Ablk, -svec(M0), Cone("psd", p))

    # variable cones: theta >= 0, q >= 0, lam >= 0, Qs PSD, Lam PSD
    def add_sign_rows(sl_: slice, kind: str, dim: int | None = None) -> None:
        ln = sl_.stop - sl_.start
        if ln == 0:
            return
        blk = np.zeros((ln, n))
        for i in range(ln):
            blk[i, sl_.start + i] = -1.0
        if kind == "psd":
            add_rows(blk, np.zeros(ln), Cone("psd", dim))
        else:
            add_rows(blk, np.zeros(ln), Cone("nonneg", ln))

    if use_templates:
        add_sign_rows(varmap["theta"], "nonneg")
    else:
        if ns:
            add_sign_rows(varmap["Qs"], "psd", ns)
    add_sign_rows(varmap["q_free"], "nonneg")
    for k in range(nsys):
        add_sign_rows(sys_slices[k]["lam"], "nonneg")
        for kk, lam_sl in sys_slices[k]["Lam"]:
            add_sign_rows(lam_sl, "psd", kk)

    if options.margin:
        row = np.zeros(n)
        row[u_col] = -1.0
        add_rows(row, 1.0, Cone("nonneg", 1))  # u >= -1 keeps it bounded
        if options.margin_bound is not None:
            row = np.zeros(n)
            row[u_col] = 1.0
            add_rows(row, options.margin_bound, Cone("nonneg", 1))
    if options.coeff_cap is not None:
        row = np.zeros(n)
        if use_templates:
            for t_idx, B in enumerate(templates):
                row[varmap["theta"].start + t_idx] = float(np.trace(B))
        else:
            off = varmap["Qs"].start
            for r, (i, j) in enumerate(zip(*np.triu_indices(ns))):
                if i == j:
                    row[off + r] = 1.0
        row[varmap["q_free"]] = 1.0
        cap = options.coeff_cap - float(np.sum(list(spec.q_fixed.values())))
        add_rows(row, cap, Cone("nonneg", 1))

    # objective
    c = np.zeros(n)
    if options.objective == "margin":
        if not options.margin:
            raise ValueError("margin objective needs margin mode")
        c[u_col] = 1.0
    elif options.objective == "template_sum":
        if not use_templates:
            raise ValueError("template_sum objective needs templates")
        c[varmap["theta"]] = 1.0
        if options.margin:
            c[u_col] = 1e-6  # tiny tie-break keeping the margin small
    elif options.objective == "q_sum":
        c[varmap["q_free"]] = 1.0
        if options.margin:
            c[u_col] = 1e-6
    elif options.objective == "zero":
        pass
    else:
        raise ValueError(f"unknown objective {options.objective!r}")

    A = np.vstack(rows_A) if rows_A else np.zeros((0, n))
    b = np.concatenate(rows_b) if rows_b else np.zeros(0)
    program = ConicProgram(c, A, b, tuple(cones))
    return CertificateProblem(program, model, outcomes, spec, options, varmap, sysd)




def extract_certificate(
    cp: CertificateProblem, report: SolveReport
) -> Certificate:
    x = report.x
    spec = cp.spec
    p = cp.model.leaf_count
    if spec.quad_templates is not None:
        theta = x[cp.varmap["theta"]]
        Q = np.zeros((p, p))
        for t, B in zip(theta, spec.quad_templates):
            Q += float(t) * np.asarray(B)
    else:
        ns = len(spec.support)
        Qs = smat(x[cp.varmap["Qs"]], ns)
        Q = np.zeros((p, p))
        for a, la in enumerate(spec.support):
            for b_, lb in enumerate(spec.support):
                Q[la, lb] = Qs[a, b_]
    q = np.zeros(cp.systems.nq)
    for j, v in spec.q_fixed.items():
        q[j] = v
    q[cp.varmap["q_free_idx"]] = x[cp.varmap["q_free"]]
    ineq, eq = _constraint_split(cp.model)
    mults = []
    for entry in cp.varmap["systems"]:
        lam = x[entry["lam"]].copy()
        nu = x[entry["nu"]].copy()
        Lams = [
            smat(x[lam_sl], kk) for kk, lam_sl in entry["Lam"]
        ]
        tags = {}
        for i, (a, b_, D, tag) in enumerate(ineq):
            tags.setdefault(tag, 0.0)
            tags[tag] += abs(float(lam[i]))
        mults.append({"lam": lam, "nu": nu, "Lam": Lams, "tags": tags})
    margin = float(x[cp.varmap["u"]]) if "u" in cp.varmap else None
    cert = Certificate(
        Q=Q,
        q=q,
        multipliers=mults,
        margin=margin,
        objective=float(report.obj_primal),
        mode=spec.mode,
        rho=spec.rho,
    )
    return cert


def solve_certificate(
    cp: CertificateProblem, solve_opts: SolveOptions | None = None
) -> tuple[Certificate, SolveReport]:
    report = solve(cp.program, solve_opts)
    cert = extract_certificate(cp, report)
    return cert, report


# ---------------------------------------------------------------------------
# min-max value mode


def assemble_minmax_value(
    model: PepModel,
    outcomes: OutcomeSet,
    spec: LyapunovSpec,
    normalization: Normalization,
) -> CertificateProblem:
    """Conic program whose optimal value upper-bounds the saddle value.

    The inner maximization is normalized by unit bounds on the Gram
    diagonal of the designated initial leaves; their multipliers t_i >= 0
    plus the constant slack w >= 0 form the reported value.  A cap
    tr(Q) + sum(q) <= B fixes the scale of the outer minimization.
    """
    if normalization is None or not normalization.initial_leaves:
        raise ValueError("min-max value mode requires a normalization")
    spec = dataclasses.replace(spec, mode=Mode.DESCENT, rho=None)
    options = AssemblyOptions(
        margin=False, objective="zero", coeff_cap=normalization.coeff_cap
    )
    base = assemble(model, outcomes, spec, options)
    # extend with t_i (one per initial leaf) and w
    prog = base.program
    n0 = prog.n_var
    p = model.leaf_count
    nt = len(normalization.initial_leaves)
    n = n0 + nt + 1
    A = np.zeros((prog.A.shape[0], n))
    A[:, :n0] = prog.A
    b = prog.b.copy()
    # locate the (a)-block rows (psd cone of order p) and the (c) row
    # ((c) row may be absent if structurally zero; then only t matters)
    off = 0
    for cone, sl in prog.segments():
        if cone.kind == "psd" and cone.dim == p:
            # Mtilde + s = b  ->  Mtilde - sum t_i E_ii + s' = b
            for t_idx, leaf in enumerate(normalization.initial_leaves):
                E = np.zeros((p, p))
                E[leaf, leaf] = 1.0
                A[sl, n0 + t_idx] = -svec(E)
            break
    # (c) row: const <= w. Identify it via the varmap-free route: rebuild.
    # The descent assembly adds at most one nonneg "const" row per system;
    # rather than search, append a fresh row  const(x) - w <= 0  built from
    # the same system data (the existing (c) row, if present, stays and is
    # implied by w >= 0 only when w bounds it; so remove none, add one).
    sysd = base.systems
    M0, v0, c0 = sysd.eval(0, np.zeros((p, p)), _fixed_q(spec, sysd.nq))
    crow = np.zeros(n)
    ineq, eq = _constraint_split(model)
    sl0 = base.varmap["systems"][0]
    for i, (a_, b_, D, tag) in enumerate(ineq):
        crow[sl0["lam"].start + i] = -a_
    for j, (a_, b_, D, tag) in enumerate(eq):
        crow[sl0["nu"].start + j] = -a_
    crow_v = _const_influences(base, spec)
    crow[: n0] += crow_v
    crow[n0 + nt] = -1.0  # minus w
    A = np.vstack([A, crow])
    b = np.concatenate([b, [-c0]])
    cones = list(prog.cones) + [Cone("nonneg", 1)]
    # t >= 0, w >= 0
    sign = np.zeros((nt + 1, n))
    for i in range(nt + 1):
        sign[i, n0 + i] = -1.0
    A = np.vstack([A, sign])
    b = np.concatenate([b, np.zeros(nt + 1)])
    cones.append(Cone("nonneg", nt + 1))
    c = np.zeros(n)
    c[n0:] = 1.0  # minimize sum t + w
    program = ConicProgram(c, A, b, tuple(cones))
    varmap = dict(base.varmap)
    varmap["t"] = slice(n0, n0 + nt)
    varmap["w"] = n0 + nt
    return CertificateProblem(
        program, model, outcomes, spec, options, varmap, sysd
    )


def _fixed_q(spec: LyapunovSpec, nq: int) -> np.ndarray:
    q = np.zeros(nq)
    for j, v in spec.q_fixed.items():
        q[j] = v
    return q


def _const_influences(base: CertificateProblem, spec: LyapunovSpec) -> np.ndarray:
    """Column of d(const)/d(var) for the V-variables of system 0."""
    sysd = base.systems
    p = sysd.p
    n0 = base.program.n_var
    out = np.zeros(n0)
    q_fixed_vec = _fixed_q(spec, sysd.nq)
    _, _, c_base = sysd.eval(0, np.zeros((p, p)), q_fixed_vec)
    if spec.quad_templates is not None:
        for t_idx, B in enumerate(spec.quad_templates):
            _, _, cB = sysd.eval(0, np.asarray(B), q_fixed_vec)
            out[base.varmap["theta"].start + t_idx] = cB - c_base
    else:
        ns = len(spec.support)
        emb = np.zeros((p, ns))
        for i, leaf in enumerate(spec.support):
            emb[leaf, i] = 1.0
        for r in range(svec_dim(ns)):
            ev = np.zeros(svec_dim(ns))
            ev[r] = 1.0
            Qfull = emb @ smat(ev, ns) @ emb.T
            _, _, cQ = sysd.eval(0, Qfull, q_fixed_vec)
            out[base.varmap["Qs"].start + r] = cQ - c_base
    for pos, j in enumerate(base.varmap["q_free_idx"]):
        ej = q_fixed_vec.copy()
        ej[j] += 1.0
        _, _, cq = sysd.eval(0, np.zeros((p, p)), ej)
        out[base.varmap["q_free"].start + pos] = cq - c_base
    return out


# ---------------------------------------------------------------------------
# rate bisection


@dataclass
class BisectResult:
    rho: float | None
    feasible_at_hi: bool
    trace: list[tuple[float, bool]]
    certificate: Certificate | None


def bisect_rate(
    model: PepModel,
    outcomes: OutcomeSet,
    spec_template: LyapunovSpec,
    lo: float = 1e-4,
    hi: float = 0.9999,
    tol: float = 1e-3,
    options: AssemblyOptions | None = None,
    solve_opts: SolveOptions | None = None,
    verifier=None,
) -> BisectResult:
    """Smallest rho in [lo, hi] with a verified linear-rate certificate.

    ``verifier`` (certificate problem, certificate) -> bool can tighten
    the acceptance test beyond the solver's margin; inaccurate solves
    count as infeasible.
    """
    if not (0 < lo < hi <= 1):
        raise ValueError("need 0 < lo < hi <= 1")
    options = options or AssemblyOptions()
    trace: list[tuple[float, bool]] = []
    best_cert: Certificate | None = None

    def feasible(rho: float) -> bool:
        nonlocal best_cert
        spec = dataclasses.replace(spec_template, mode=Mode.LINEAR_RATE, rho=rho)
        cp = assemble(model, outcomes, spec, options)
        cert, report = solve_certificate(cp, solve_opts)
        if report.status == "Inaccurate":
            # near-degenerate instances can stall the long-step solver;
            # retry once with shorter, more conservative steps
            retry = dataclasses.replace(
                solve_opts or SolveOptions(), step_frac=0.9, max_iter=400
            )
            cert, report = solve_certificate(cp, retry)
        ok = (
            report.status == "Optimal"
            and cert.margin is not None
            and cert.margin <= options.feas_tol
        )
        if ok and verifier is not None:
            ok = bool(verifier(cp, cert))
        trace.append((rho, ok))
        if ok:
            best_cert = cert
        return ok

    if not feasible(hi):
        return BisectResult(None, False, trace, None)
    lo_, hi_ = lo, hi
    while hi_ - lo_ > tol:
        mid = (lo_ + hi_) / 2
        if feasible(mid):
            hi_ = mid
        else:
            lo_ = mid
    # monotonicity sanity: no feasible point below an infeasible one
    feas_rhos = sorted(r for r, ok in trace if ok)
    infeas_rhos = sorted(r for r, ok in trace if not ok)
    if feas_rhos and infeas_rhos and feas_rhos[0] < infeas_rhos[-1]:
        raise RuntimeError(
            "bisection monotonicity violated: "
            f"feasible at {feas_rhos[0]}, infeasible at {infeas_rhos[-1]}"
        )
    return BisectResult(hi_, True, trace, best_cert)
