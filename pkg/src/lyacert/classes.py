"""Function classes, oracles, prox steps, and interpolation constraints.

A :class:`FunctionHandle` tracks (point, gradient, value) triples obtained
from oracle calls and emits the interpolation inequalities of its class
over all registered triples.  The emitted constraints are necessary
conditions for class membership (for pairwise classes they are also
sufficient); certificates derived from them remain valid for the true
class because relaxing the constraint set only enlarges the inner
worst case.

Linear operators are encoded by adjoint-consistency equalities together
with Gram-domination LMI blocks bounding the operator norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .symbolic import (
    FSymbol,
    PepModel,
    PointExpr,
    ScalarExpr,
    Sense,
    dot,
    f_value,
)

__all__ = [
    "Convex",
    "SmoothConvex",
    "SmoothStronglyConvex",
    "BlockSmoothConvex",
    "FunctionHandle",
    "OperatorHandle",
]


@dataclass(frozen=True)
class Convex:
    """Closed convex (subdifferentiable) functions."""


@dataclass(frozen=True)
class SmoothConvex:
    """Convex with L-Lipschitz gradient."""

    L: float

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise ValueError("L must be positive")


@dataclass(frozen=True)
class SmoothStronglyConvex:
    """mu-strongly convex with L-Lipschitz gradient, 0 <= mu < L."""

    mu: float
    L: float

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise ValueError("L must be positive")
        if not 0 <= self.mu < self.L:
            raise ValueError("need 0 <= mu < L")


@dataclass(frozen=True)
class BlockSmoothConvex:
    """Convex, i-th block partial gradient L_i-Lipschitz.

    With d blocks the full gradient is d-Lipschitz from the L-weighted
    norm to its dual, which yields the weighted-smoothness pair
    inequalities emitted alongside plain convexity.
    """

    L: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "L", tuple(float(v) for v in self.L))
        if len(self.L) < 1 or any(v <= 0 for v in self.L):
            raise ValueError("block constants must be positive")

    @property
    def d(self) -> int:
        return len(self.L)


ClassSpec = Convex | SmoothConvex | SmoothStronglyConvex | BlockSmoothConvex


@dataclass
class Triple:
    point: PointExpr
    grad: PointExpr
    value: FSymbol
    grad_blocks: tuple[PointExpr, ...] | None = None  # block decomposition


class FunctionHandle:
    """A declared function of a given class with registered oracle triples."""

    def __init__(self, model: PepModel, class_spec: ClassSpec, name: str = "f"):
        self.model = model
        self.class_spec = class_spec
        self.name = name
        self.triples: list[Triple] = []
        self._oracle_cache: dict[PointExpr, tuple[PointExpr, FSymbol]] = {}
        self._value_cache: dict[PointExpr, FSymbol] = {}

    # --- oracles --------------------------------------------------------
    def oracle(self, point: PointExpr) -> tuple[PointExpr, FSymbol]:
        """Gradient leaf + value symbol at ``point`` (idempotent per point)."""
        cached = self._oracle_cache.get(point)
        if cached is not None:
            return cached
        grad = self.model.new_leaf(f"grad_{self.name}_{len(self.triples)}")
        value = self.model.new_f_symbol(f"{self.name}_{len(self.triples)}")
        self.triples.append(Triple(point, grad, value))
        self._oracle_cache[point] = (grad, value)
        self._value_cache[point] = value
        return grad, value

    def stationary_point(self) -> tuple[PointExpr, PointExpr, FSymbol]:
        """Register the optimum x* = 0 with zero (sub)gradient; no new leaf."""
        zero = PointExpr.zero()
        cached = self._oracle_cache.get(zero)
        if cached is not None:
            return zero, cached[0], cached[1]
        value = self.model.new_f_symbol(f"{self.name}_star")
        blocks = None
        if isinstance(self.class_spec, BlockSmoothConvex):
            blocks = tuple(PointExpr.zero() for _ in self.class_spec.L)
        self.triples.append(Triple(zero, zero, value, blocks))
        self._oracle_cache[zero] = (zero, value)
        self._value_cache[zero] = value
        return zero, zero, value

    def value(self, point: PointExpr) -> FSymbol:
        """Value-only symbol for a point (no gradient information)."""
        cached = self._value_cache.get(point)
        if cached is not None:
            return cached
        value = self.model.new_f_symbol(f"{self.name}_val_{self.model.f_count}")
        self._value_cache[point] = value
        return value

    def prox(
        self, anchor: PointExpr, step: float
    ) -> tuple[PointExpr, PointExpr, FSymbol]:
        """Proximal point of ``anchor`` encoded via its optimality condition.

        Creates the subgradient leaf g and value symbol v, returns the
        point ``anchor - step*g`` with the triple registered so the class
        constraints bind the subgradient at the prox output.
        """
        if step <= 0:
            raise ValueError("prox step must be positive")
        grad = self.model.new_leaf(f"proxgrad_{self.name}_{len(self.triples)}")
        value = self.model.new_f_symbol(f"{self.name}_prox_{len(self.triples)}")
        point = anchor - float(step) * grad
        self.triples.append(Triple(point, grad, value))
        self._oracle_cache[point] = (grad, value)
        self._value_cache[point] = value
        return point, grad, value

    def register_block_triple(
        self,
        point: PointExpr,
        grad_blocks: Sequence[PointExpr],
        value: FSymbol,
    ) -> None:
        """Register a triple whose gradient is given blockwise."""
        if not isinstance(self.class_spec, BlockSmoothConvex):
            raise ValueError("block triples require a BlockSmoothConvex class")
        if len(grad_blocks) != self.class_spec.d:
            raise ValueError("wrong number of gradient blocks")
        grad = PointExpr.zero()
        for g in grad_blocks:
            grad = grad + g
        self.triples.append(Triple(point, grad, value, tuple(grad_blocks)))
        self._oracle_cache[point] = (grad, value)
        self._value_cache[point] = value

    # --- constraint emission -------------------------------------------
    def _pair_constraint(self, ti: Triple, tj: Triple) -> ScalarExpr:
        """f_i - f_j + <g_i, x_j - x_i> (+ class curvature terms) <= 0."""
        fi = f_value(ti.value)
        fj = f_value(tj.value)
        base = fi - fj + dot(ti.grad, tj.point - ti.point)
        spec = self.class_spec
        if isinstance(spec, Convex):
            return base
        if isinstance(spec, SmoothConvex):
            g = ti.grad - tj.grad
            return base + (1.0 / (2 * spec.L)) * dot(g, g)
        if isinstance(spec, SmoothStronglyConvex):
            mu, L = spec.mu, spec.L
            g = ti.grad - tj.grad
            xd = ti.point - tj.point
            coef = 1.0 / (2 * (1 - mu / L))
            return base + coef * (
                (1.0 / L) * dot(g, g)
                + mu * dot(xd, xd)
                - (2 * mu / L) * dot(tj.grad - ti.grad, tj.point - ti.point)
            )
        if isinstance(spec, BlockSmoothConvex):
            d = spec.d
            bi = ti.grad_blocks
            bj = tj.grad_blocks
            if bi is None or bj is None:
                return base  # no block data: plain convexity only
            extra = ScalarExpr()
            for b in range(d):
                g = bi[b] - bj[b]
                extra = extra + (1.0 / (2 * d * spec.L[b])) * dot(g, g)
            return base + extra
        raise TypeError(f"unknown class spec {spec!r}")

    def emit_class_constraints(self) -> list[int]:
        """Interpolation inequalities for every ordered pair of triples."""
        ids = []
        for a, ti in enumerate(self.triples):
            for b, tj in enumerate(self.triples):
                if a == b:
                    continue
                ids.append(
                    self.model.add_constraint(
                        self._pair_constraint(ti, tj),
                        Sense.LEQ0,
                        f"{self.name}:interp:{a}->{b}",
                    )
                )
        return ids

    def emit_block_smooth_constraints(
        self, pre: PointExpr, post: PointExpr, block: int
    ) -> list[int]:
        """Block descent lemma for a step supported on one block.

        ``post - pre`` must be supported on block ``block`` (the modeler's
        responsibility; gradients of unknown support make a symbolic check
        impossible).  Emits f(post) <= f(pre) + <grad f(pre), post - pre>
        + (L_block/2) ||post - pre||^2.
        """
        spec = self.class_spec
        if not isinstance(spec, BlockSmoothConvex):
            raise ValueError("block descent requires a BlockSmoothConvex class")
        if not 0 <= block < spec.d:
            raise ValueError(f"unknown block index {block}")
        pre_entry = self._oracle_cache.get(pre)
        if pre_entry is None:
            raise ValueError("pre point has no registered gradient triple")
        grad_pre, value_pre = pre_entry
        value_post = self.value(post)
        delta = post - pre
        expr = (
            f_value(value_post)
            - f_value(value_pre)
            - dot(grad_pre, delta)
            - (spec.L[block] / 2.0) * dot(delta, delta)
        )
        cid = self.model.add_constraint(
            expr, Sense.LEQ0, f"{self.name}:block_descent:{block}"
        )
        return [cid]


class OperatorHandle:
    """A linear operator with bounded norm, encoded relationally."""

    def __init__(self, model: PepModel, norm_bound: float, name: str = "M"):
        if not (norm_bound > 0 and norm_bound < float("inf")):
            raise ValueError("operator norm bound must be positive and finite")
        self.model = model
        self.norm_bound = float(norm_bound)
        self.name = name
        self.applications: list[tuple[PointExpr, PointExpr]] = []
        self.adjoint_applications: list[tuple[PointExpr, PointExpr]] = []
        self._cache: dict[PointExpr, PointExpr] = {}
        self._adj_cache: dict[PointExpr, PointExpr] = {}

    def apply(self, point: PointExpr) -> PointExpr:
        cached = self._cache.get(point)
        if cached is not None:
            return cached
        out = self.model.new_leaf(f"{self.name}_apply_{len(self.applications)}")
        self.applications.append((point, out))
        self._cache[point] = out
        return out

    def apply_adjoint(self, point: PointExpr) -> PointExpr:
        cached = self._adj_cache.get(point)
        if cached is not None:
            return cached
        out = self.model.new_leaf(
            f"{self.name}_adj_{len(self.adjoint_applications)}"
        )
        self.adjoint_applications.append((point, out))
        self._adj_cache[point] = out
        return out

    def register_application(self, point: PointExpr, image: PointExpr) -> None:
        """Record that ``image`` equals the operator applied to ``point``
        when the image is already expressible (no new leaf)."""
        self.applications.append((point, image))
        self._cache[point] = image

    def register_adjoint_application(
        self, point: PointExpr, image: PointExpr
    ) -> None:
        self.adjoint_applications.append((point, image))
        self._adj_cache[point] = image

    def emit_operator_constraints(self) -> tuple[list[int], list[int]]:
        """Adjoint equalities plus norm-domination LMI blocks."""
        eq_ids = []
        for u, mu in self.applications:
            for w, mw in self.adjoint_applications:
                expr = dot(mu, w) - dot(u, mw)
                eq_ids.append(
                    self.model.add_constraint(
                        expr, Sense.EQ0, f"{self.name}:adjoint"
                    )
                )
        lmi_ids = []
        L2 = self.norm_bound**2
        for apps, label in (
            (self.applications, "fwd"),
            (self.adjoint_applications, "adj"),
        ):
            if not apps:
                continue
            k = len(apps)
            block = [
                [
                    L2 * dot(apps[i][0], apps[j][0]) - dot(apps[i][1], apps[j][1])
                    for j in range(k)
                ]
                for i in range(k)
            ]
            lmi_ids.append(self.model.add_lmi_block(block))
        return eq_ids, lmi_ids
