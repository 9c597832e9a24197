"""Function classes and operators: constraint counts and sampled
soundness (emitted inequalities must hold on true class members)."""

import numpy as np
import pytest

from lyacert.classes import (
    BlockSmoothConvex,
    Convex,
    FunctionHandle,
    OperatorHandle,
    SmoothConvex,
    SmoothStronglyConvex,
)
from lyacert.symbolic import PepModel, Sense

TOL = 1e-9


def _check_model(model, X, fv, tol=TOL):
    """Evaluate every constraint/LMI on the leaf assignment X, values fv."""
    for a, b, D, sense, tag in model.constraint_data():
        G = X.T @ X
        val = a + float(b @ fv) + float(np.sum(D * G))
        if sense == Sense.LEQ0:
            assert val <= tol, f"{tag}: {val}"
        else:
            assert abs(val) <= tol, f"{tag}: {val}"
    for arr in model.lmi_data():
        k = arr.shape[0]
        B = np.array(
            [[np.sum(arr[i, j] * (X.T @ X)) for j in range(k)]
             for i in range(k)]
        )
        assert np.linalg.eigvalsh(B).min() >= -tol


def _quadratic(rng, dim, lo, hi):
    U, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    eigs = rng.uniform(lo, hi, dim)
    return (U * eigs) @ U.T


def test_pair_constraint_count():
    m = PepModel()
    f = FunctionHandle(m, SmoothConvex(1.0))
    f.stationary_point()
    for _ in range(3):
        f.oracle(m.new_leaf())
    ids = f.emit_class_constraints()
    assert len(ids) == 4 * 3  # k (k - 1) ordered pairs


@pytest.mark.parametrize(
    "spec,lo",
    [(Convex(), 0.0), (SmoothConvex(2.0), 0.0),
     (SmoothStronglyConvex(0.3, 2.0), 0.3)],
)
def test_interpolation_sound_on_quadratics(spec, lo):
    hi = getattr(spec, "L", 5.0)
    dim = 4
    for seed in range(20):
        rng = np.random.default_rng(seed)
        H = _quadratic(rng, dim, lo, hi)
        m = PepModel()
        f = FunctionHandle(m, spec)
        f.stationary_point()
        pts = [m.new_leaf() for _ in range(2)]
        for pt in pts:
            f.oracle(pt)
        f.emit_class_constraints()
        m.freeze()
        xs = [rng.standard_normal(dim) for _ in pts]
        X = np.zeros((dim, m.leaf_count))
        fv = np.zeros(m.f_count)
        for i, x in enumerate(xs):
            X[:, i] = x
            X[:, len(xs) + i] = H @ x
            fv[i + 1] = 0.5 * float(x @ H @ x)
        _check_model(m, X, fv)


def test_prox_point_sound_on_quadratics():
    dim, step = 3, 0.7
    for seed in range(20):
        rng = np.random.default_rng(100 + seed)
        H = _quadratic(rng, dim, 0.0, 3.0)
        m = PepModel()
        f = FunctionHandle(m, Convex())
        f.stationary_point()
        v = m.new_leaf()
        xp, gp, _ = f.prox(v, step)
        f.emit_class_constraints()
        m.freeze()
        v_num = rng.standard_normal(dim)
        xp_num = np.linalg.solve(np.eye(dim) + step * H, v_num)
        X = np.column_stack([v_num, H @ xp_num])
        fv = np.array([0.0, 0.5 * float(xp_num @ H @ xp_num)])
        np.testing.assert_allclose(
            X @ xp.vector(m.leaf_count), xp_num, atol=1e-10
        )
        _check_model(m, X, fv)


def test_block_smooth_sound():
    d = 3
    L = (1.0, 2.0, 0.5)
    for seed in range(20):
        rng = np.random.default_rng(200 + seed)
        # 1-D blocks: A_ii <= L_i makes block gradients L_i-Lipschitz
        B = rng.standard_normal((d, d)) / np.sqrt(d)
        A = B.T @ B
        A *= rng.uniform(0.3, 1.0) / max(A[i, i] / L[i] for i in range(d))
        m = PepModel()
        f = FunctionHandle(m, BlockSmoothConvex(L))
        _, _, _ = f.stationary_point()
        xblk = [m.new_leaf() for _ in range(d)]
        gblk = [m.new_leaf() for _ in range(d)]
        x0 = xblk[0]
        for xb in xblk[1:]:
            x0 = x0 + xb
        f0 = m.new_f_symbol()
        f.register_block_triple(x0, gblk, f0)
        f.emit_class_constraints()
        f1 = []
        for i in range(d):
            x1 = x0 - (1.0 / L[i]) * gblk[i]
            f.emit_block_smooth_constraints(x0, x1, i)
            f1.append(f.value(x1))
        m.freeze()
        x = rng.standard_normal(d)
        g = A @ x
        X = np.zeros((d, m.leaf_count))
        fv = np.zeros(m.f_count)
        for i in range(d):
            X[i, xblk[i].max_leaf()] = x[i]
            X[i, gblk[i].max_leaf()] = g[i]
        fv[f0.id] = 0.5 * float(x @ A @ x)
        for i, sym in enumerate(f1):
            xi = x.copy()
            xi[i] -= g[i] / L[i]
            fv[sym.id] = 0.5 * float(xi @ A @ xi)
        _check_model(m, X, fv)


def test_operator_constraints_sound():
    dim = 4
    for seed in range(20):
        rng = np.random.default_rng(300 + seed)
        M = rng.standard_normal((dim, dim))
        M /= np.linalg.norm(M, 2) * rng.uniform(1.0, 2.0)
        m = PepModel()
        op = OperatorHandle(m, norm_bound=1.0)
        u = m.new_leaf()
        w = m.new_leaf()
        mu = op.apply(u)
        mw = op.apply_adjoint(w)
        eq_ids, lmi_ids = op.emit_operator_constraints()
        assert len(eq_ids) == 1 and len(lmi_ids) == 2
        m.freeze()
        u_num = rng.standard_normal(dim)
        w_num = rng.standard_normal(dim)
        X = np.column_stack([u_num, w_num, M @ u_num, M.T @ w_num])
        _check_model(m, X, np.zeros(0))
