"""Iteration maps: transition extraction, transport, expectation."""

import numpy as np
import pytest

from lyacert.algorithm import (
    IterationMap,
    OutcomeSet,
    TransitionPair,
    build_sigma,
    expect,
    transport,
)
from lyacert.scenarios.gd import build_gd
from lyacert.symbolic import FSymbol, PointExpr, ScalarExpr, f_value


def _random_expr(rng, p, f):
    Q = rng.standard_normal((p, p))
    return ScalarExpr.from_dense(
        rng.standard_normal(), rng.standard_normal(f), (Q + Q.T) / 2
    )


def _random_transition(rng, p, f):
    return TransitionPair(
        rng.standard_normal((p, p)),
        rng.standard_normal((f, f)),
        rng.standard_normal(f),
    )


def _post_state(X, fv, t):
    return X @ t.sigma, t.sigma_f.T @ fv + t.sigma_f_const


def test_gd_transition_is_exact():
    gamma = 0.8
    m, outcomes, _ = build_gd(gamma)
    (prob, t), = outcomes.outcomes
    assert prob == 1.0
    want = np.array([[1.0, 0.0, 0.0], [-gamma, 0.0, 0.0], [0.0, 1.0, 0.0]])
    np.testing.assert_allclose(t.sigma, want, atol=1e-14)
    # untracked leaves (the fresh gradient) contribute nothing post-step
    rng = np.random.default_rng(0)
    G = rng.standard_normal((3, 3))
    G = G @ G.T
    G_post = t.sigma.T @ G @ t.sigma
    np.testing.assert_allclose(G_post[2, :], 0.0, atol=1e-14)
    np.testing.assert_allclose(G_post[:, 2], 0.0, atol=1e-14)


def test_transport_matches_post_iteration_evaluation():
    p, f, dim = 4, 3, 5
    rng = np.random.default_rng(1)
    for _ in range(20):
        expr = _random_expr(rng, p, f)
        t = _random_transition(rng, p, f)
        X = rng.standard_normal((dim, p))
        fv = rng.standard_normal(f)
        Xp, fvp = _post_state(X, fv, t)
        assert transport(expr, t).evaluate(X, fv) == pytest.approx(
            expr.evaluate(Xp, fvp), rel=1e-9, abs=1e-9
        )


def test_transport_linear():
    p, f, dim = 3, 2, 4
    rng = np.random.default_rng(2)
    e1 = _random_expr(rng, p, f)
    e2 = _random_expr(rng, p, f)
    t = _random_transition(rng, p, f)
    X = rng.standard_normal((dim, p))
    fv = rng.standard_normal(f)
    lhs = transport(e1 * 2.5 + e2, t).evaluate(X, fv)
    rhs = 2.5 * transport(e1, t).evaluate(X, fv) + transport(e2, t).evaluate(
        X, fv
    )
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_expectation_is_probability_weighted():
    p, f, dim = 3, 2, 4
    rng = np.random.default_rng(3)
    expr = _random_expr(rng, p, f)
    ts = [_random_transition(rng, p, f) for _ in range(3)]
    probs = [0.5, 0.3, 0.2]
    outcomes = OutcomeSet(list(zip(probs, ts)))
    X = rng.standard_normal((dim, p))
    fv = rng.standard_normal(f)
    want = sum(
        pr * expr.evaluate(*_post_state(X, fv, t)) for pr, t in zip(probs, ts)
    )
    assert expect(outcomes, expr).evaluate(X, fv) == pytest.approx(
        want, rel=1e-9
    )


def test_identity_transition_fixes_everything():
    t = TransitionPair.identity(3, 2)
    rng = np.random.default_rng(4)
    expr = _random_expr(rng, 3, 2)
    X = rng.standard_normal((4, 3))
    fv = rng.standard_normal(2)
    assert transport(expr, t).evaluate(X, fv) == pytest.approx(
        expr.evaluate(X, fv), rel=1e-12
    )


def test_iteration_map_validation():
    with pytest.raises(ValueError):  # duplicate pre-iteration leaf
        IterationMap(
            point_pairs=[(0, PointExpr.leaf(0)), (0, PointExpr.leaf(1))],
            f_pairs=[],
            lyapunov_support=(),
        )
    with pytest.raises(ValueError):  # support must be tracked
        IterationMap(
            point_pairs=[],
            f_pairs=[(FSymbol(0), f_value(FSymbol(0)))],
            lyapunov_support=(3,),
        )


def test_outcome_probabilities_validated():
    t = TransitionPair.identity(2, 1)
    with pytest.raises(ValueError):
        OutcomeSet([(0.5, t), (0.4, t)])
    with pytest.raises(ValueError):
        OutcomeSet([])
