"""Embedded conic solver for desk-scale certificate problems.

A dense primal-dual interior-point method on the homogeneous self-dual
embedding of the pair

    (P) min c@x  s.t. A@x + s = b, s in K
    (D) max -b@y s.t. A.T@y + c = 0, y in K*

with Nesterov-Todd scaling and a Mehrotra predictor-corrector step.
The embedding tracks (x, y, s, tau, kappa) with residuals

    r_p = A@x + s - b*tau
    r_d = A.T@y + c*tau
    r_g = c@x + b@y + kappa

and recovers either an optimal pair (tau -> positive) or an
infeasibility certificate (kappa -> positive).  All linear algebra is
dense NumPy; determinism follows from the absence of randomization.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .conic import Cone, ConicProgram, smat, svec, svec_dim, svec_identity

__all__ = ["SolveOptions", "SolveReport", "solve", "certify_residuals", "presolve"]


@dataclass(frozen=True)
class SolveOptions:
    eps: float = 1e-8
    accept_eps: float = 1e-6
    max_iter: int = 200
    step_frac: float = 0.99
    verbose: bool = False


@dataclass
class SolveReport:
    status: str  # Optimal | PrimalInfeasible | DualInfeasible | Inaccurate | IterLimit
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    obj_primal: float
    obj_dual: float
    res_primal: float
    res_dual: float
    res_gap: float
    iterations: int
    wall_time: float

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "x": self.x.tolist(),
            "y": self.y.tolist(),
            "s": self.s.tolist(),
            "obj_primal": self.obj_primal,
            "obj_dual": self.obj_dual,
            "residuals": {
                "primal": self.res_primal,
                "dual": self.res_dual,
                "gap": self.res_gap,
            },
            "iterations": self.iterations,
            "wall_time": self.wall_time,
        }


def certify_residuals(
    prog: ConicProgram, x: np.ndarray, y: np.ndarray, s: np.ndarray
) -> tuple[float, float, float]:
    """Recompute normalized primal/dual/gap residuals from returned vectors."""
    if prog.n_slack == 0:
        return 0.0, float(np.linalg.norm(prog.c) / (1 + np.linalg.norm(prog.c))), 0.0
    rp = np.linalg.norm(prog.A @ x + s - prog.b) / (1 + np.linalg.norm(prog.b))
    rd = np.linalg.norm(prog.A.T @ y + prog.c) / (1 + np.linalg.norm(prog.c))
    po = float(prog.c @ x)
    do = float(-prog.b @ y)
    rg = abs(po - do) / (1 + abs(po) + abs(do))
    return float(rp), float(rd), float(rg)


# ---------------------------------------------------------------------------
# presolve


def presolve(prog: ConicProgram) -> tuple[ConicProgram, list[int], str | None]:
    """Drop rows of A that are identically zero (zero/nonneg segments only).

    Returns (reduced program, kept row indices, early status or None).
    A zero row in a Zero segment with b != 0, or in a NonNeg segment with
    b < 0, proves primal infeasibility outright.
    """
    keep: list[int] = []
    new_cones: list[Cone] = []
    for cone, sl in prog.segments():
        idx = range(sl.start, sl.stop)
        if cone.kind == "psd":
            keep.extend(idx)
            new_cones.append(cone)
            continue
        kept_here = []
        for i in idx:
            if np.any(prog.A[i] != 0.0):
                kept_here.append(i)
            else:
                if cone.kind == "zero" and prog.b[i] != 0.0:
                    return prog, list(range(prog.n_slack)), "PrimalInfeasible"
                if cone.kind == "nonneg" and prog.b[i] < 0.0:
                    return prog, list(range(prog.n_slack)), "PrimalInfeasible"
        if kept_here:
            keep.extend(kept_here)
            new_cones.append(Cone(cone.kind, len(kept_here)))
    if len(keep) == prog.n_slack:
        return prog, keep, None
    red = ConicProgram(prog.c, prog.A[keep], prog.b[keep], tuple(new_cones))
    return red, keep, None


# ---------------------------------------------------------------------------
# cone layout helpers


class _Layout:
    """Index bookkeeping: zero rows, nonneg rows, PSD blocks."""

    def __init__(self, prog: ConicProgram):
        self.zero_idx: list[int] = []
        self.nonneg_idx: list[int] = []
        self.psd: list[tuple[int, slice]] = []  # (k, slack slice)
        for cone, sl in prog.segments():
            if cone.kind == "zero":
                self.zero_idx.extend(range(sl.start, sl.stop))
            elif cone.kind == "nonneg":
                self.nonneg_idx.extend(range(sl.start, sl.stop))
            else:
                self.psd.append((cone.dim, sl))
        self.zero_idx = list(self.zero_idx)
        self.cone_idx = self.nonneg_idx + [
            i for _, sl in self.psd for i in range(sl.start, sl.stop)
        ]
        # positions of nonneg entries / psd blocks inside the cone-row order
        self.nl = len(self.nonneg_idx)
        self.psd_pos: list[tuple[int, slice]] = []
        off = self.nl
        for k, _ in self.psd:
            d = svec_dim(k)
            self.psd_pos.append((k, slice(off, off + d)))
            off += d
        self.mc = off  # total cone rows
        self.barrier_degree = self.nl + sum(k for k, _ in self.psd)

    def init_point(self) -> np.ndarray:
        """Identity element of the cone (in cone-row order)."""
        e = np.zeros(self.mc)
        e[: self.nl] = 1.0
        for k, sl in self.psd_pos:
            e[sl] = svec_identity(k)
        return e

    def max_step(self, v: np.ndarray, dv: np.ndarray) -> float:
        """Largest alpha with v + alpha*dv in the cone (v strictly inside)."""
        alpha = np.inf
        if self.nl:
            vv, dd = v[: self.nl], dv[: self.nl]
            neg = dd < 0
            if np.any(neg):
                alpha = min(alpha, float(np.min(-vv[neg] / dd[neg])))
        for k, sl in self.psd_pos:
            V = smat(v[sl], k)
            D = smat(dv[sl], k)
            try:
                L = np.linalg.cholesky(V)
            except np.linalg.LinAlgError:
                # v slightly off the cone interior; fall back to eigenvalues
                w, U = np.linalg.eigh(V)
                w = np.maximum(w, 1e-14)
                L = U * np.sqrt(w)
            Li = np.linalg.inv(L)
            T = Li @ D @ Li.T
            lam_min = float(np.linalg.eigvalsh((T + T.T) / 2)[0])
            if lam_min < 0:
                alpha = min(alpha, -1.0 / lam_min)
        return alpha


class _Scaling:
    """Nesterov-Todd scaling for the current strictly feasible (s, y)."""

    def __init__(self, lay: _Layout, s: np.ndarray, y: np.ndarray):
        self.lay = lay
        nl = lay.nl
        self.w = np.sqrt(s[:nl] / y[:nl]) if nl else np.zeros(0)
        self.lam_l = np.sqrt(s[:nl] * y[:nl]) if nl else np.zeros(0)
        self.R: list[np.ndarray] = []
        self.Rinv: list[np.ndarray] = []
        self.lam_p: list[np.ndarray] = []  # eigenvalues of scaled point
        for k, sl in lay.psd_pos:
            S = smat(s[sl], k)
            Y = smat(y[sl], k)
            Ls = _chol(S)
            Ly = _chol(Y)
            U, sv, Vt = np.linalg.svd(Ly.T @ Ls)
            sv = np.maximum(sv, 1e-150)
            R = Ls @ Vt.T / np.sqrt(sv)
            self.R.append(R)
            self.Rinv.append(np.linalg.inv(R))
            self.lam_p.append(sv)

    # scaled complementarity vector lambda (s-scaled == y-scaled)
    def lam_vec(self) -> np.ndarray:
        out = np.zeros(self.lay.mc)
        out[: self.lay.nl] = self.lam_l
        for (k, sl), lam in zip(self.lay.psd_pos, self.lam_p):
            out[sl] = svec(np.diag(lam))
        return out

    def scale_s(self, ds: np.ndarray) -> np.ndarray:
        """Apply W_s: ds -> scaled space (lambda = W_s(s))."""
        out = np.zeros_like(ds)
        nl = self.lay.nl
        if nl:
            out[:nl] = ds[:nl] / self.w
        for (k, sl), Ri in zip(self.lay.psd_pos, self.Rinv):
            D = smat(ds[sl], k)
            out[sl] = svec(Ri @ D @ Ri.T)
        return out

    def scale_y(self, dy: np.ndarray) -> np.ndarray:
        """Apply W_y: dy -> scaled space (lambda = W_y(y))."""
        out = np.zeros_like(dy)
        nl = self.lay.nl
        if nl:
            out[:nl] = dy[:nl] * self.w
        for (k, sl), R in zip(self.lay.psd_pos, self.R):
            D = smat(dy[sl], k)
            out[sl] = svec(R.T @ D @ R)
        return out

    def unscale_s(self, g: np.ndarray) -> np.ndarray:
        """Apply W_s^{-1}."""
        out = np.zeros_like(g)
        nl = self.lay.nl
        if nl:
            out[:nl] = g[:nl] * self.w
        for (k, sl), R in zip(self.lay.psd_pos, self.R):
            G = smat(g[sl], k)
            out[sl] = svec(R @ G @ R.T)
        return out

    def lam_div(self, d: np.ndarray) -> np.ndarray:
        """Solve lambda o u = d for u (o = symmetrized product)."""
        out = np.zeros_like(d)
        nl = self.lay.nl
        if nl:
            out[:nl] = d[:nl] / self.lam_l
        for (k, sl), lam in zip(self.lay.psd_pos, self.lam_p):
            D = smat(d[sl], k)
            U = 2.0 * D / np.add.outer(lam, lam)
            out[sl] = svec(U)
        return out

    def lam_prod(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Symmetrized product u o v in scaled space."""
        out = np.zeros_like(u)
        nl = self.lay.nl
        if nl:
            out[:nl] = u[:nl] * v[:nl]
        for k, sl in self.lay.psd_pos:
            U = smat(u[sl], k)
            V = smat(v[sl], k)
            out[sl] = svec((U @ V + V @ U) / 2.0)
        return out

    def apply_Hinv(self, M: np.ndarray) -> np.ndarray:
        """Apply H^{-1} = (W_s^{-1} W_y)^{-1} columnwise to a matrix of
        cone-row vectors (shape (mc, n))."""
        out = np.zeros_like(M)
        nl = self.lay.nl
        if nl:
            out[:nl] = M[:nl] / (self.w**2)[:, None]
        for (k, sl), Ri in zip(self.lay.psd_pos, self.Rinv):
            Wmi = Ri.T @ Ri
            X = smat(M[sl].T, k)  # batch over columns
            out[sl] = svec(Wmi @ X @ Wmi).T
        return out

    def apply_H(self, v: np.ndarray) -> np.ndarray:
        """Apply H = W_s^{-1} W_y to one cone-row vector."""
        out = np.zeros_like(v)
        nl = self.lay.nl
        if nl:
            out[:nl] = v[:nl] * self.w**2
        for (k, sl), R in zip(self.lay.psd_pos, self.R):
            Wm = R @ R.T
            X = smat(v[sl], k)
            out[sl] = svec(Wm @ X @ Wm)
        return out


def _chol(M: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        w, U = np.linalg.eigh((M + M.T) / 2)
        w = np.maximum(w, 1e-14 * max(1.0, float(w.max(initial=1.0))))
        return np.linalg.cholesky((U * w) @ U.T)


# ---------------------------------------------------------------------------
# main solver


def solve(prog: ConicProgram, opts: SolveOptions | None = None) -> SolveReport:
    opts = opts or SolveOptions()
    t0 = time.perf_counter()

    red, keep, early = presolve(prog)
    if early is not None:
        zero = SolveReport(
            early,
            np.zeros(prog.n_var),
            np.zeros(prog.n_slack),
            np.zeros(prog.n_slack),
            np.nan,
            np.nan,
            np.inf,
            np.inf,
            np.inf,
            0,
            time.perf_counter() - t0,
        )
        return zero
    rep = _solve_core(red, opts, t0)
    if len(keep) != prog.n_slack:
        y = np.zeros(prog.n_slack)
        s = np.zeros(prog.n_slack)
        y[keep] = rep.y
        s[keep] = rep.s
        # dropped rows: slack is b_i (feasible by presolve), dual 0
        dropped = sorted(set(range(prog.n_slack)) - set(keep))
        s[dropped] = prog.b[dropped]
        rep = SolveReport(
            rep.status,
            rep.x,
            y,
            s,
            rep.obj_primal,
            rep.obj_dual,
            rep.res_primal,
            rep.res_dual,
            rep.res_gap,
            rep.iterations,
            time.perf_counter() - t0,
        )
    return rep


def _solve_core(prog: ConicProgram, opts: SolveOptions, t0: float) -> SolveReport:
    n = prog.n_var
    m = prog.n_slack
    lay = _Layout(prog)

    if m == 0:
        status = "Optimal" if np.all(prog.c == 0.0) else "DualInfeasible"
        return SolveReport(
            status,
            np.zeros(n),
            np.zeros(0),
            np.zeros(0),
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0,
            time.perf_counter() - t0,
        )
    if lay.barrier_degree == 0:
        return _solve_equality_only(prog, opts, t0)

    A = prog.A
    b = prog.b
    c = prog.c
    zi = np.asarray(lay.zero_idx, dtype=int)
    ci = np.asarray(lay.cone_idx, dtype=int)
    A_E = A[zi] if zi.size else np.zeros((0, n))
    A_C = A[ci]
    b_E = b[zi] if zi.size else np.zeros(0)
    b_C = b[ci]

    # state: cone parts stored in cone-row order (nonneg then psd blocks)
    x = np.zeros(n)
    y_E = np.zeros(zi.size)
    y_C = lay.init_point()
    s_C = lay.init_point()
    tau, kappa = 1.0, 1.0
    nu = lay.barrier_degree

    def full_y() -> np.ndarray:
        y = np.zeros(m)
        if zi.size:
            y[zi] = y_E
        y[ci] = y_C
        return y

    def full_s() -> np.ndarray:
        s = np.zeros(m)
        s[ci] = s_C
        return s

    norm_b = 1 + np.linalg.norm(b)
    norm_c = 1 + np.linalg.norm(c)

    best = None  # (score, report fields)
    status = "IterLimit"
    it = 0
    stall = 0

    for it in range(1, opts.max_iter + 1):
        y = full_y()
        s = full_s()
        r_p = A @ x + s - b * tau
        r_d = A.T @ y + c * tau
        r_g = float(c @ x + b @ y + kappa)
        mu = (float(s_C @ y_C) + tau * kappa) / (nu + 1)

        # --- convergence / infeasibility tests (on the de-homogenized point)
        xx, yy, ss = x / tau, y / tau, s / tau
        pres = np.linalg.norm(A @ xx + ss - b) / norm_b
        dres = np.linalg.norm(A.T @ yy + c) / norm_c
        po = float(c @ xx)
        do = float(-b @ yy)
        gres = abs(po - do) / (1 + abs(po) + abs(do))
        score = max(pres, dres, gres)
        if best is None or score < best[0]:
            best = (score, xx.copy(), yy.copy(), ss.copy(), po, do, pres, dres, gres, it)
            stall = 0
        else:
            stall += 1
        if score <= opts.eps:
            status = "Optimal"
            break
        if stall >= 8 or mu <= 1e-14:
            status = "Stalled"
            break

        by = float(b @ y)
        cx = float(c @ x)
        if by < 0:
            pinf = np.linalg.norm(A.T @ y) / (-by) / norm_c
            if pinf <= opts.eps and mu <= opts.eps * 1e2:
                status = "PrimalInfeasible"
                y_cert = y / (-by)
                return SolveReport(
                    status,
                    np.full(n, np.nan),
                    y_cert,
                    np.full(m, np.nan),
                    np.nan,
                    np.nan,
                    np.inf,
                    float(pinf),
                    np.inf,
                    it,
                    time.perf_counter() - t0,
                )
        if cx < 0:
            dinf = np.linalg.norm(A @ x + s) / (-cx) / norm_b
            if dinf <= opts.eps and mu <= opts.eps * 1e2:
                status = "DualInfeasible"
                scale = -cx
                return SolveReport(
                    status,
                    x / scale,
                    np.full(m, np.nan),
                    s / scale,
                    np.nan,
                    np.nan,
                    float(dinf),
                    np.inf,
                    np.inf,
                    it,
                    time.perf_counter() - t0,
                )

        # --- NT scaling and KKT factorization
        W = _Scaling(lay, s_C, y_C)
        lam = W.lam_vec()
        HiA = W.apply_Hinv(A_C)
        Hib = W.apply_Hinv(b_C[:, None])[:, 0]
        nE = zi.size
        K2 = np.zeros((n + nE, n + nE))
        K2[:n, :n] = A_C.T @ HiA
        if nE:
            K2[:n, n:] = A_E.T
            K2[n:, :n] = A_E
        reg = 1e-12 * (1 + np.abs(K2).max())
        K2[:n, :n] += reg * np.eye(n)
        if nE:
            K2[n:, n:] -= reg * np.eye(nE)

        try:
            lu_solve = _make_lu_solver(K2)
        except np.linalg.LinAlgError:
            status = "Inaccurate"
            break

        def k_solve(u_top: np.ndarray, u_botE: np.ndarray, u_botC: np.ndarray):
            """Solve K [dx; dy] = [u_top; u_bot] with H on cone rows."""
            rhs = np.concatenate(
                [u_top + A_C.T @ W.apply_Hinv(u_botC[:, None])[:, 0], u_botE]
            )
            sol = lu_solve(rhs)
            dx = sol[:n]
            dyE = sol[n:]
            dyC = W.apply_Hinv((A_C @ dx - u_botC)[:, None])[:, 0]
            return dx, dyE, dyC

        # shared system: K [x1; y1] = [-c; b]
        x1, y1E, y1C = k_solve(-c, b_E, b_C)
        denom = float(c @ x1 + b_E @ y1E + b_C @ y1C - kappa / tau)

        def direction_raw(
            rd_rhs: np.ndarray,
            rpE: np.ndarray,
            rpC: np.ndarray,
            rg0: float,
            d_C: np.ndarray,
            d_t: float,
        ):
            ghat = W.unscale_s(W.lam_div(d_C))
            x2, y2E, y2C = k_solve(rd_rhs, rpE, rpC - ghat)
            numer = rg0 - d_t / tau - float(c @ x2 + b_E @ y2E + b_C @ y2C)
            dtau = numer / denom
            dx = x2 + dtau * x1
            dyE = y2E + dtau * y1E
            dyC = y2C + dtau * y1C
            dsC = ghat - W.apply_H(dyC)
            dkappa = (d_t - kappa * dtau) / tau
            return [dx, dyE, dyC, dsC, dtau, dkappa]

        def direction(
            rd_rhs: np.ndarray,
            rpE: np.ndarray,
            rpC: np.ndarray,
            rg0: float,
            d_C: np.ndarray,
            d_t: float,
            refine: int = 2,
        ):
            d = direction_raw(rd_rhs, rpE, rpC, rg0, d_C, d_t)
            for _ in range(refine):
                dx, dyE, dyC, dsC, dtau, dkappa = d
                dy = np.zeros(m)
                if nE:
                    dy[zi] = dyE
                dy[ci] = dyC
                ds = np.zeros(m)
                ds[ci] = dsC
                e2 = A.T @ dy + c * dtau - rd_rhs
                e1 = A @ dx + ds - b * dtau
                e1[zi] -= rpE
                e1[ci] -= rpC
                e3 = float(c @ dx + b @ dy + dkappa) - rg0
                e4 = (
                    W.lam_prod(lam, W.scale_y(dyC) + W.scale_s(dsC)) - d_C
                )
                e5 = tau * dkappa + kappa * dtau - d_t
                err = max(
                    np.abs(e1).max(initial=0),
                    np.abs(e2).max(initial=0),
                    abs(e3),
                    np.abs(e4).max(initial=0),
                    abs(e5),
                )
                if err <= 1e-13 * (1 + abs(d_t) + float(np.abs(d_C).max(initial=0))):
                    break
                corr = direction_raw(
                    -e2,
                    -e1[zi] if nE else np.zeros(0),
                    -e1[ci],
                    -e3,
                    -e4,
                    -e5,
                )
                d = [a + b_ for a, b_ in zip(d, corr)]
            return d

        # affine (predictor) direction
        d_aff = -W.lam_prod(lam, lam)
        rpE0 = -r_p[zi] if nE else np.zeros(0)
        dxa, dyEa, dyCa, dsCa, dtaua, dkappaa = direction(
            -r_d, rpE0, -r_p[ci], -r_g, d_aff, -tau * kappa
        )

        a_s = lay.max_step(s_C, dsCa)
        a_y = lay.max_step(y_C, dyCa)
        a_t = np.inf if dtaua >= 0 else -tau / dtaua
        a_k = np.inf if dkappaa >= 0 else -kappa / dkappaa
        alpha_aff = min(1.0, a_s, a_y, a_t, a_k)
        mu_aff = (
            float((s_C + alpha_aff * dsCa) @ (y_C + alpha_aff * dyCa))
            + (tau + alpha_aff * dtaua) * (kappa + alpha_aff * dkappaa)
        ) / (nu + 1)
        sigma = float(np.clip((max(mu_aff, 0.0) / mu) ** 3, 0.0, 1.0))

        # combined (corrector) direction
        corr = W.lam_prod(W.scale_s(dsCa), W.scale_y(dyCa))
        d_comb = -W.lam_prod(lam, lam) + sigma * mu * _cone_identity(lay) - corr
        dt_comb = -tau * kappa + sigma * mu - dtaua * dkappaa
        eta = 1.0 - sigma
        dx, dyE, dyC, dsC, dtau, dkappa = direction(
            -eta * r_d, eta * rpE0, -eta * r_p[ci], -eta * r_g, d_comb, dt_comb
        )

        a_s = lay.max_step(s_C, dsC)
        a_y = lay.max_step(y_C, dyC)
        a_t = np.inf if dtau >= 0 else -tau / dtau
        a_k = np.inf if dkappa >= 0 else -kappa / dkappa
        alpha = opts.step_frac * min(a_s, a_y, a_t, a_k)
        alpha = min(1.0, alpha)
        if not np.isfinite(alpha) or alpha <= 1e-14:
            status = "Inaccurate"
            break

        x = x + alpha * dx
        y_E = y_E + alpha * dyE
        y_C = y_C + alpha * dyC
        s_C = s_C + alpha * dsC
        tau = tau + alpha * dtau
        kappa = kappa + alpha * dkappa

        if opts.verbose:
            print(
                f"iter {it:3d}  mu={mu:9.2e}  pres={pres:9.2e} "
                f"dres={dres:9.2e} gap={gres:9.2e} step={alpha:6.3f} sigma={sigma:5.3f}"
            )

        if tau <= 1e-12 and kappa <= 1e-12:
            status = "Inaccurate"
            break

    # wrap up from the best iterate seen
    assert best is not None
    _, bx, by_, bs, po, do, pres, dres, gres = best[:9]
    if status != "Optimal":
        score = max(pres, dres, gres)
        if score <= opts.accept_eps:
            status = "Optimal"
        elif score <= 1e-3:
            status = "Inaccurate"
        else:
            status = "IterLimit"
    return SolveReport(
        status,
        bx,
        by_,
        bs,
        float(po),
        float(do),
        float(pres),
        float(dres),
        float(gres),
        it,
        time.perf_counter() - t0,
    )


def _cone_identity(lay: _Layout) -> np.ndarray:
    return lay.init_point()


def _make_lu_solver(K: np.ndarray):
    """Factor once, solve many: plain LU via numpy (deterministic)."""
    # numpy exposes no reusable LU; emulate with a single inverse at this
    # scale (a few hundred rows), plus one step of iterative refinement.
    Kinv = np.linalg.inv(K)

    def solve_one(rhs: np.ndarray) -> np.ndarray:
        sol = Kinv @ rhs
        sol += Kinv @ (rhs - K @ sol)
        return sol

    return solve_one


def _solve_equality_only(
    prog: ConicProgram, opts: SolveOptions, t0: float
) -> SolveReport:
    """All cones are Zero: a linearly constrained linear objective."""
    A, b, c = prog.A, prog.b, prog.c
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.linalg.norm(A @ x - b) / (1 + np.linalg.norm(b)) > opts.accept_eps:
        # b not in range(A); the least-squares residual r = b - A x is
        # orthogonal to range(A), so y = -r/||r||^2 has A.T y = 0, b@y = -1
        r = b - A @ x
        y = -r / float(r @ r)
        return SolveReport(
            "PrimalInfeasible",
            np.full(prog.n_var, np.nan),
            y,
            np.full(prog.n_slack, np.nan),
            np.nan,
            np.nan,
            np.inf,
            0.0,
            np.inf,
            0,
            time.perf_counter() - t0,
        )
    y, *_ = np.linalg.lstsq(A.T, -c, rcond=None)
    if np.linalg.norm(A.T @ y + c) / (1 + np.linalg.norm(c)) > opts.accept_eps:
        # c not in range(A^T): objective unbounded on the feasible affine set
        return SolveReport(
            "DualInfeasible",
            x,
            np.full(prog.n_slack, np.nan),
            np.zeros(prog.n_slack),
            np.nan,
            np.nan,
            0.0,
            np.inf,
            np.inf,
            0,
            time.perf_counter() - t0,
        )
    s = np.zeros(prog.n_slack)
    rp, rd, rg = certify_residuals(prog, x, y, s)
    status = "Optimal" if max(rp, rd, rg) <= opts.accept_eps else "Inaccurate"
    return SolveReport(
        status,
        x,
        y,
        s,
        float(c @ x),
        float(-b @ y),
        rp,
        rd,
        rg,
        0,
        time.perf_counter() - t0,
    )
