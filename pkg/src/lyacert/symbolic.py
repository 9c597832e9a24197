"""Symbolic layer for Gram-matrix performance estimation models.

Points live in an abstract inner-product space and are linear combinations
of *leaf points* (independent symbolic vectors, one basis slot each).
Scalar quantities are affine in function-value symbols (the F basis) and
quadratic in leaf points; they are represented exactly by the triple
(const, lin, quad) so that evaluating against an explicit assignment
(leaf vectors ``X``, values ``F``) gives ``const + lin@F + <quad, X^T X>``.

A :class:`PepModel` is an append-only registry of leaf points, F-symbols,
scalar constraints, and PSD matrix (LMI) blocks.  Once frozen it is
immutable and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Sense",
    "FSymbol",
    "PointExpr",
    "ScalarExpr",
    "Constraint",
    "PepModel",
    "combine",
    "dot",
    "f_value",
]

_COEF_TOL = 0.0  # coefficients are kept exactly; zeros are pruned


class Sense(str, Enum):
    """Orientation of a scalar constraint."""

    LEQ0 = "leq0"  # expr <= 0
    EQ0 = "eq0"  # expr == 0


@dataclass(frozen=True, order=True)
class FSymbol:
    """A function-value symbol: one slot in the F basis."""

    id: int

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError("FSymbol id must be nonnegative")


def _clean(d: dict, tol: float = _COEF_TOL) -> dict:
    return {k: float(v) for k, v in d.items() if v != 0.0}


class PointExpr:
    """A linear combination of leaf points, stored as a sparse coefficient map.

    The zero point (empty map) is valid and is used for the optimum
    ``x* = 0``; it consumes no leaf slot.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, float] | None = None):
        c = dict(coeffs) if coeffs else {}
        for k, v in c.items():
            if k < 0:
                raise ValueError("leaf index must be nonnegative")
            if not np.isfinite(v):
                raise ValueError("point coefficients must be finite")
        self.coeffs: dict[int, float] = _clean(c)

    @staticmethod
    def zero() -> "PointExpr":
        return PointExpr({})

    @staticmethod
    def leaf(index: int) -> "PointExpr":
        return PointExpr({index: 1.0})

    def max_leaf(self) -> int:
        """Largest leaf index referenced, or -1 for the zero point."""
        return max(self.coeffs, default=-1)

    def vector(self, n: int) -> np.ndarray:
        """Dense coefficient vector of length ``n``."""
        v = np.zeros(n)
        for k, c in self.coeffs.items():
            if k >= n:
                raise ValueError(f"leaf index {k} out of range for size {n}")
            v[k] = c
        return v

    def __add__(self, other: "PointExpr") -> "PointExpr":
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, 0.0) + v
        return PointExpr(c)

    def __sub__(self, other: "PointExpr") -> "PointExpr":
        return self + (-1.0) * other

    def __neg__(self) -> "PointExpr":
        return (-1.0) * self

    def __mul__(self, t: float) -> "PointExpr":
        t = float(t)
        return PointExpr({k: t * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PointExpr) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self) -> str:
        return f"PointExpr({self.coeffs!r})"


def combine(points: Sequence[PointExpr], weights: Sequence[float]) -> PointExpr:
    """Weighted linear combination of points; creates no new leaf."""
    if len(points) != len(weights) or not points:
        raise ValueError("combine needs equal-length, nonempty lists")
    out = PointExpr.zero()
    for p, w in zip(points, weights):
        out = out + float(w) * p
    return out


class ScalarExpr:
    """const + lin@F + <quad, G>, with ``quad`` exactly symmetric.

    ``quad`` is stored sparsely on the upper triangle: key ``(i, j)`` with
    ``i <= j`` holds the matrix entry ``Q[i, j]`` (equal to ``Q[j, i]``).
    """

    __slots__ = ("const", "lin", "quad")

    def __init__(
        self,
        const: float = 0.0,
        lin: Mapping[int, float] | None = None,
        quad: Mapping[tuple[int, int], float] | None = None,
    ):
        self.const = float(const)
        self.lin: dict[int, float] = _clean(dict(lin) if lin else {})
        q: dict[tuple[int, int], float] = {}
        if quad:
            for (i, j), v in quad.items():
                key = (i, j) if i <= j else (j, i)
                q[key] = q.get(key, 0.0) + float(v)
        self.quad = _clean(q)
        if not np.isfinite(self.const):
            raise ValueError("constant must be finite")

    # --- arithmetic -----------------------------------------------------
    def __add__(self, other: "ScalarExpr | float") -> "ScalarExpr":
        if isinstance(other, (int, float)):
            return ScalarExpr(self.const + other, self.lin, self.quad)
        lin = dict(self.lin)
        for k, v in other.lin.items():
            lin[k] = lin.get(k, 0.0) + v
        quad = dict(self.quad)
        for k, v in other.quad.items():
            quad[k] = quad.get(k, 0.0) + v
        return ScalarExpr(self.const + other.const, lin, quad)

    __radd__ = __add__

    def __sub__(self, other: "ScalarExpr | float") -> "ScalarExpr":
        if isinstance(other, (int, float)):
            return self + (-other)
        return self + (-1.0) * other

    def __rsub__(self, other: float) -> "ScalarExpr":
        return (-1.0) * self + other

    def __mul__(self, t: float) -> "ScalarExpr":
        t = float(t)
        return ScalarExpr(
            t * self.const,
            {k: t * v for k, v in self.lin.items()},
            {k: t * v for k, v in self.quad.items()},
        )

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarExpr":
        return (-1.0) * self

    # --- dense views ----------------------------------------------------
    def lin_vector(self, f_count: int) -> np.ndarray:
        v = np.zeros(f_count)
        for k, c in self.lin.items():
            if k >= f_count:
                raise ValueError(f"F index {k} out of range")
            v[k] = c
        return v

    def quad_matrix(self, leaf_count: int) -> np.ndarray:
        m = np.zeros((leaf_count, leaf_count))
        for (i, j), c in self.quad.items():
            if j >= leaf_count:
                raise ValueError(f"leaf index {j} out of range")
            m[i, j] = c
            m[j, i] = c
        return m

    @staticmethod
    def from_dense(
        const: float, lin: np.ndarray, quad: np.ndarray
    ) -> "ScalarExpr":
        quad = np.asarray(quad)
        if quad.size and not np.allclose(quad, quad.T, atol=0, rtol=0):
            quad = (quad + quad.T) / 2
        qd = {}
        for i, j in zip(*np.nonzero(quad)):
            if i <= j:
                qd[(int(i), int(j))] = float(quad[i, j])
        ld = {int(k): float(v) for k, v in enumerate(np.asarray(lin)) if v != 0.0}
        return ScalarExpr(const, ld, qd)

    def is_affine_in_f(self) -> bool:
        return not self.quad

    def is_pure_quad(self) -> bool:
        return self.const == 0.0 and not self.lin

    def evaluate(self, leaf_vectors: np.ndarray, f_values: np.ndarray) -> float:
        """Evaluate against explicit leaves (columns of ``leaf_vectors``)."""
        total = self.const
        for k, c in self.lin.items():
            total += c * f_values[k]
        for (i, j), c in self.quad.items():
            ip = float(leaf_vectors[:, i] @ leaf_vectors[:, j])
            total += c * ip * (1.0 if i == j else 2.0)
        return total

    # --- serialization --------------------------------------------------
    def to_json_dict(self) -> dict:
        return {
            "a": self.const,
            "b": [[k, v] for k, v in sorted(self.lin.items())],
            "D": [[i, j, v] for (i, j), v in sorted(self.quad.items())],
        }

    @staticmethod
    def from_json_dict(d: Mapping) -> "ScalarExpr":
        return ScalarExpr(
            d.get("a", 0.0),
            {int(k): float(v) for k, v in d.get("b", [])},
            {(int(i), int(j)): float(v) for i, j, v in d.get("D", [])},
        )

    def __repr__(self) -> str:
        return f"ScalarExpr(const={self.const!r}, lin={self.lin!r}, quad={self.quad!r})"


def dot(p: PointExpr, r: PointExpr) -> ScalarExpr:
    """Symbolic inner product <p, r> as a pure-quadratic scalar."""
    quad: dict[tuple[int, int], float] = {}
    for i, a in p.coeffs.items():
        for j, b in r.coeffs.items():
            key = (i, j) if i <= j else (j, i)
            # symmetrized outer product (p r^T + r p^T)/2
            quad[key] = quad.get(key, 0.0) + 0.5 * a * b
    # the double loop visits (i,i) once and contributes only half its value
    for i in set(p.coeffs) & set(r.coeffs):
        quad[(i, i)] = p.coeffs[i] * r.coeffs[i]
    return ScalarExpr(0.0, None, quad)


def f_value(symbol: FSymbol) -> ScalarExpr:
    """The scalar expression selecting one function-value symbol."""
    return ScalarExpr(0.0, {symbol.id: 1.0}, None)


@dataclass
class Constraint:
    """A scalar constraint ``expr {<=,==} 0`` with a provenance tag."""

    expr: ScalarExpr
    sense: Sense
    tag: str

    def __post_init__(self) -> None:
        if not self.tag:
            raise ValueError("constraint tag must be nonempty")


class PepModel:
    """Append-only registry of leaves, F-symbols, constraints, LMI blocks."""

    def __init__(self) -> None:
        self.leaf_count = 0
        self.f_count = 0
        self.constraints: list[Constraint] = []
        self.lmi_blocks: list[list[list[ScalarExpr]]] = []
        self.names: dict[str, object] = {}
        self._frozen = False

    # --- mutation -------------------------------------------------------
    def _check_mutable(self) -> None:
        if self._frozen:
            raise RuntimeError("model is frozen")

    def new_leaf(self, name: str | None = None) -> PointExpr:
        self._check_mutable()
        p = PointExpr.leaf(self.leaf_count)
        self.leaf_count += 1
        if name:
            self.names[name] = p
        return p

    def new_f_symbol(self, name: str | None = None) -> FSymbol:
        self._check_mutable()
        s = FSymbol(self.f_count)
        self.f_count += 1
        if name:
            self.names[name] = s
        return s

    def _check_expr(self, expr: ScalarExpr) -> None:
        if expr.lin and max(expr.lin) >= self.f_count:
            raise ValueError("expression references unknown F symbol")
        if expr.quad and max(j for _, j in expr.quad) >= self.leaf_count:
            raise ValueError("expression references unknown leaf")

    def add_constraint(self, expr: ScalarExpr, sense: Sense, tag: str) -> int:
        self._check_mutable()
        self._check_expr(expr)
        self.constraints.append(Constraint(expr, Sense(sense), tag))
        return len(self.constraints) - 1

    def add_lmi_block(self, matrix_expr: Sequence[Sequence[ScalarExpr]]) -> int:
        """Register a symmetric matrix of pure-quadratic entries, required PSD."""
        self._check_mutable()
        k = len(matrix_expr)
        for row in matrix_expr:
            if len(row) != k:
                raise ValueError("LMI block must be square")
        for i in range(k):
            for j in range(k):
                e = matrix_expr[i][j]
                if not e.is_pure_quad():
                    raise ValueError("LMI entries must be pure quadratic in G")
                self._check_expr(e)
                if matrix_expr[j][i].quad != e.quad:
                    raise ValueError("LMI block must be symmetric")
        self.lmi_blocks.append([list(row) for row in matrix_expr])
        return len(self.lmi_blocks) - 1

    def freeze(self) -> "PepModel":
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    # --- dense views ----------------------------------------------------
    def constraint_data(self) -> list[tuple[float, np.ndarray, np.ndarray, Sense, str]]:
        """Per constraint: (a, b, D, sense, tag) with dense b (f_count) and D (p x p)."""
        out = []
        for c in self.constraints:
            out.append(
                (
                    c.expr.const,
                    c.expr.lin_vector(self.f_count),
                    c.expr.quad_matrix(self.leaf_count),
                    c.sense,
                    c.tag,
                )
            )
        return out

    def lmi_data(self) -> list[np.ndarray]:
        """Each block as a (k, k, p, p) array of quad matrices."""
        out = []
        p = self.leaf_count
        for blk in self.lmi_blocks:
            k = len(blk)
            arr = np.zeros((k, k, p, p))
            for i in range(k):
                for j in range(k):
                    arr[i, j] = blk[i][j].quad_matrix(p)
            out.append(arr)
        return out

    # --- serialization --------------------------------------------------
    def to_json_dict(self) -> dict:
        expr_dict = ScalarExpr.to_json_dict

        return {
            "leaf_count": self.leaf_count,
            "f_count": self.f_count,
            "constraints": [
                {**expr_dict(c.expr), "sense": c.sense.value, "tag": c.tag}
                for c in self.constraints
            ],
            "lmi_blocks": [
                [[expr_dict(e)["D"] for e in row] for row in blk]
                for blk in self.lmi_blocks
            ],
            "names": {
                k: (
                    {"point": sorted(v.coeffs.items())}
                    if isinstance(v, PointExpr)
                    else {"fsymbol": v.id}
                )
                for k, v in self.names.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @staticmethod
    def from_json_dict(d: Mapping) -> "PepModel":
        m = PepModel()
        m.leaf_count = int(d["leaf_count"])
        m.f_count = int(d["f_count"])

        parse_expr = ScalarExpr.from_json_dict
        for cd in d.get("constraints", []):
            m.constraints.append(
                Constraint(parse_expr(cd), Sense(cd["sense"]), cd["tag"])
            )
        for blk in d.get("lmi_blocks", []):
            m.lmi_blocks.append(
                [
                    [
                        ScalarExpr(
                            0.0,
                            None,
                            {(int(i), int(j)): float(v) for i, j, v in ent},
                        )
                        for ent in row
                    ]
                    for row in blk
                ]
            )
        for name, v in d.get("names", {}).items():
            if "point" in v:
                m.names[name] = PointExpr({int(k): float(c) for k, c in v["point"]})
            else:
                m.names[name] = FSymbol(int(v["fsymbol"]))
        return m

    @staticmethod
    def from_json(text: str) -> "PepModel":
        return PepModel.from_json_dict(json.loads(text))
