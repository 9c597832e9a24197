"""Symbolic layer: point/scalar algebra, evaluation, serialization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lyacert.symbolic import (
    FSymbol,
    PepModel,
    PointExpr,
    ScalarExpr,
    Sense,
    combine,
    dot,
    f_value,
)

coeff = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def point(n_leaves=4):
    return st.lists(coeff, min_size=n_leaves, max_size=n_leaves).map(
        lambda cs: PointExpr({i: c for i, c in enumerate(cs)})
    )


def rng_data(seed, n_leaves=4, dim=3, n_f=3):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((dim, n_leaves)), rng.standard_normal(n_f)


@given(point(), point(), coeff)
def test_point_algebra_linearity(p, q, t):
    n = 4
    lhs = (p * t + q).vector(n)
    np.testing.assert_allclose(lhs, t * p.vector(n) + q.vector(n), atol=1e-12)
    np.testing.assert_allclose((-p).vector(n), -p.vector(n), atol=1e-12)
    np.testing.assert_allclose((p - q).vector(n), p.vector(n) - q.vector(n),
                               atol=1e-12)


@given(point(), point(), st.integers(0, 1000))
def test_dot_symmetric_and_matches_numeric(p, q, seed):
    X, fv = rng_data(seed)
    expr_pq = dot(p, q)
    expr_qp = dot(q, p)
    want = float((X @ p.vector(4)) @ (X @ q.vector(4)))
    assert expr_pq.evaluate(X, fv) == pytest.approx(want, abs=1e-9)
    assert expr_qp.evaluate(X, fv) == pytest.approx(want, abs=1e-9)


@given(point(), point(), point(), coeff, st.integers(0, 1000))
def test_dot_bilinear(p, q, r, t, seed):
    X, fv = rng_data(seed)
    lhs = dot(p * t + q, r).evaluate(X, fv)
    rhs = t * dot(p, r).evaluate(X, fv) + dot(q, r).evaluate(X, fv)
    assert lhs == pytest.approx(rhs, abs=1e-7)


def test_combine_matches_weighted_sum():
    pts = [PointExpr.leaf(i) for i in range(3)]
    w = [0.5, -1.0, 2.0]
    np.testing.assert_allclose(
        combine(pts, w).vector(3), np.array(w), atol=1e-14
    )


@settings(max_examples=30)
@given(st.lists(coeff, min_size=3, max_size=3), st.integers(0, 1000))
def test_scalar_affine_evaluate(cs, seed):
    X, fv = rng_data(seed)
    expr = cs[0] * f_value(FSymbol(0)) + cs[1] * f_value(FSymbol(2)) + cs[2]
    want = cs[0] * fv[0] + cs[1] * fv[2] + cs[2]
    assert expr.evaluate(X, fv) == pytest.approx(want, abs=1e-9)


def test_scalar_from_dense_round_trip():
    rng = np.random.default_rng(3)
    Q = rng.standard_normal((4, 4))
    Q = (Q + Q.T) / 2
    b = rng.standard_normal(3)
    expr = ScalarExpr.from_dense(1.25, b, Q)
    np.testing.assert_allclose(expr.quad_matrix(4), Q, atol=1e-14)
    np.testing.assert_allclose(expr.lin_vector(3), b, atol=1e-14)
    assert expr.const == 1.25
    X, fv = rng_data(11)
    want = 1.25 + b @ fv + float(np.sum(Q * (X.T @ X).T))
    assert expr.evaluate(X, fv) == pytest.approx(want, rel=1e-12)


def test_scalar_json_round_trip():
    rng = np.random.default_rng(5)
    Q = rng.standard_normal((3, 3))
    expr = ScalarExpr.from_dense(-0.5, rng.standard_normal(2), (Q + Q.T) / 2)
    back = ScalarExpr.from_json_dict(expr.to_json_dict())
    X, fv = rng_data(7)
    assert back.evaluate(X, fv) == pytest.approx(expr.evaluate(X, fv),
                                                 rel=1e-14)


def test_model_json_round_trip():
    m = PepModel()
    x = m.new_leaf("x")
    y = m.new_leaf("y")
    s = m.new_f_symbol("f")
    m.add_constraint(dot(x, y) - f_value(s) + 1.0, Sense.LEQ0, "c0")
    m.add_constraint(dot(x, x) - 2.0, Sense.EQ0, "c1")
    m.add_lmi_block([[dot(x, x), dot(x, y)], [dot(x, y), dot(y, y)]])
    m.freeze()
    back = PepModel.from_json(m.to_json())
    assert back.leaf_count == 2 and back.f_count == 1
    for (a1, b1, D1, s1, t1), (a2, b2, D2, s2, t2) in zip(
        m.constraint_data(), back.constraint_data()
    ):
        assert a1 == a2 and s1 == s2 and t1 == t2
        np.testing.assert_allclose(b1, b2, atol=1e-14)
        np.testing.assert_allclose(D1, D2, atol=1e-14)
    for B1, B2 in zip(m.lmi_data(), back.lmi_data()):
        np.testing.assert_allclose(B1, B2, atol=1e-14)


def test_frozen_model_rejects_mutation():
    m = PepModel()
    x = m.new_leaf()
    m.freeze()
    with pytest.raises(RuntimeError):
        m.new_leaf()
    with pytest.raises(RuntimeError):
        m.add_constraint(dot(x, x), Sense.LEQ0, "late")


def test_constraint_bounds_checked():
    m = PepModel()
    m.new_leaf()
    with pytest.raises(ValueError):
        m.add_constraint(dot(PointExpr.leaf(5), PointExpr.leaf(5)),
                         Sense.LEQ0, "oob")
    with pytest.raises(ValueError):
        m.add_constraint(f_value(FSymbol(2)), Sense.LEQ0, "oob-f")
