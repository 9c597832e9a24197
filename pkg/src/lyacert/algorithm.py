"""One algorithm iteration as a linear map on the leaf and F bases.

An :class:`IterationMap` lists, for each tracked pre-iteration leaf, the
leaf-basis representation of its post-iteration image, and similarly for
tracked function-value symbols (whose images may be affine in F).  From
it :func:`build_sigma` extracts the transition matrices: column ``i`` of
``sigma`` holds the representation of the image of leaf ``i`` (zero for
untracked leaves), so the post-iteration Gram matrix is
``sigma.T @ G @ sigma`` and a quadratic form transports as
``quad -> sigma @ quad @ sigma.T``.  (This column orientation is the
transpose of part of the older performance-estimation literature; it is
fixed here once and used everywhere.)

Randomized algorithms enumerate their finitely many outcomes with
probabilities; expectations are exact averages over the outcome list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .symbolic import FSymbol, PepModel, PointExpr, ScalarExpr

__all__ = [
    "IterationMap",
    "TransitionPair",
    "OutcomeSet",
    "build_sigma",
    "transport",
    "expect",
]

_PROB_TOL = 1e-12


@dataclass
class IterationMap:
    """Tracked leaf and F-symbol images for one iteration."""

    point_pairs: list[tuple[int, PointExpr]]
    f_pairs: list[tuple[FSymbol, ScalarExpr]]
    lyapunov_support: tuple[int, ...]

    def __post_init__(self) -> None:
        pres = [i for i, _ in self.point_pairs]
        if len(set(pres)) != len(pres):
            raise ValueError("pre-iteration leaf indices must be distinct")
        fpres = [s.id for s, _ in self.f_pairs]
        if len(set(fpres)) != len(fpres):
            raise ValueError("pre-iteration F symbols must be distinct")
        for _, post in self.f_pairs:
            if not post.is_affine_in_f():
                raise ValueError("F-symbol images must be affine in F")
        if not set(self.lyapunov_support) <= set(pres):
            raise ValueError("lyapunov_support must be tracked leaves")


@dataclass
class TransitionPair:
    """Transition matrices: column i = representation of the image of i."""

    sigma: np.ndarray  # (p_bar, p_bar)
    sigma_f: np.ndarray  # (f_bar, f_bar)
    sigma_f_const: np.ndarray  # (f_bar,) affine offsets of F images

    def __post_init__(self) -> None:
        self.sigma = np.asarray(self.sigma, dtype=float)
        self.sigma_f = np.asarray(self.sigma_f, dtype=float)
        self.sigma_f_const = np.asarray(self.sigma_f_const, dtype=float)

    @staticmethod
    def identity(p: int, f: int) -> "TransitionPair":
        return TransitionPair(np.eye(p), np.eye(f), np.zeros(f))

    def to_json_dict(self) -> dict:
        return {
            "sigma": self.sigma.tolist(),
            "sigma_f": self.sigma_f.tolist(),
            "sigma_f_const": self.sigma_f_const.tolist(),
        }


@dataclass
class OutcomeSet:
    """Probability-weighted list of transitions (probabilities sum to 1)."""

    outcomes: list[tuple[float, TransitionPair]]

    def __post_init__(self) -> None:
        if not self.outcomes:
            raise ValueError("need at least one outcome")
        total = sum(p for p, _ in self.outcomes)
        if any(not (0 < p <= 1) for p, _ in self.outcomes):
            raise ValueError("probabilities must lie in (0, 1]")
        if abs(total - 1.0) > _PROB_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @staticmethod
    def deterministic(t: TransitionPair) -> "OutcomeSet":
        return OutcomeSet([(1.0, t)])

    def to_json_dict(self) -> dict:
        return {
            "outcomes": [
                {"prob": p, **t.to_json_dict()} for p, t in self.outcomes
            ]
        }


def build_sigma(model: PepModel, imap: IterationMap) -> TransitionPair:
    """Extract (sigma, sigma_f) from an iteration map on a frozen model."""
    p = model.leaf_count
    f = model.f_count
    sigma = np.zeros((p, p))
    for pre, post in imap.point_pairs:
        if pre >= p:
            raise ValueError("tracked leaf outside the model")
        sigma[:, pre] = post.vector(p)
    sigma_f = np.zeros((f, f))
    sigma_f_const = np.zeros(f)
    for pre, post in imap.f_pairs:
        if pre.id >= f:
            raise ValueError("tracked F symbol outside the model")
        sigma_f[:, pre.id] = post.lin_vector(f)
        sigma_f_const[pre.id] = post.const
    return TransitionPair(sigma, sigma_f, sigma_f_const)


def transport(expr: ScalarExpr, t: TransitionPair) -> ScalarExpr:
    """Pre-iteration expression equal to ``expr`` evaluated post-iteration.

    quad -> sigma @ quad @ sigma.T  (so <quad, G_post> = <transported, G>),
    lin  -> sigma_f @ lin (+ affine offsets into the constant).
    """
    p = t.sigma.shape[0]
    f = t.sigma_f.shape[0]
    quad = expr.quad_matrix(p)
    lin = expr.lin_vector(f)
    new_quad = t.sigma @ quad @ t.sigma.T
    new_lin = t.sigma_f @ lin
    new_const = expr.const + float(t.sigma_f_const @ lin)
    return ScalarExpr.from_dense(new_const, new_lin, new_quad)


def expect(outcomes: OutcomeSet, expr: ScalarExpr) -> ScalarExpr:
    """Exact expectation of the transported expression over all outcomes."""
    out = ScalarExpr()
    for prob, t in outcomes.outcomes:
        out = out + prob * transport(expr, t)
    return out
