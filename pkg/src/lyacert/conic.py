"""Standard-form conic programs over zero, nonnegative, and PSD cones.

The problem format is

    minimize    c @ x
    subject to  A @ x + s == b,   s in K,

where ``K`` is an ordered product of ``Zero(n)``, ``NonNeg(n)`` and
``Psd(k)`` segments partitioning the slack vector ``s``.  A ``Psd(k)``
segment holds the scaled upper triangle (svec) of a symmetric k-by-k
matrix: row-major upper-triangle order with off-diagonal entries
multiplied by sqrt(2), so that the Euclidean inner product of two svec
vectors equals the trace inner product of the matrices.

The dual problem is

    maximize    -b @ y
    subject to  A.T @ y + c == 0,   y in K*,

with ``K*`` free on Zero segments and self-dual elsewhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Cone",
    "ConicProgram",
    "svec",
    "smat",
    "svec_dim",
    "svec_identity",
]

_SQRT2 = float(np.sqrt(2.0))


@dataclass(frozen=True)
class Cone:
    """One cone segment: kind in {"zero", "nonneg", "psd"}.

    ``dim`` is the vector length for zero/nonneg and the matrix order k
    for psd (occupying k(k+1)/2 slack entries).
    """

    kind: str
    dim: int

    def __post_init__(self) -> None:
        if self.kind not in ("zero", "nonneg", "psd"):
            raise ValueError(f"unknown cone kind {self.kind!r}")
        if self.dim <= 0:
            raise ValueError("cone dimension must be positive")

    @property
    def size(self) -> int:
        """Number of slack entries occupied by this segment."""
        if self.kind == "psd":
            return self.dim * (self.dim + 1) // 2
        return self.dim


def svec_dim(k: int) -> int:
    return k * (k + 1) // 2


def _tri_cache(k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row-major upper-triangle indices and svec scaling weights."""
    cached = _TRI.get(k)
    if cached is None:
        iu, ju = np.triu_indices(k)
        w = np.where(iu == ju, 1.0, _SQRT2)
        cached = (iu, ju, w)
        _TRI[k] = cached
    return cached


_TRI: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def svec(M: np.ndarray) -> np.ndarray:
    """Scaled upper triangle of a symmetric matrix, row-major order.

    Accepts a single (k, k) matrix or a batch (..., k, k).
    """
    M = np.asarray(M, dtype=float)
    k = M.shape[-1]
    iu, ju, w = _tri_cache(k)
    return M[..., iu, ju] * w


def smat(v: np.ndarray, k: int | None = None) -> np.ndarray:
    """Inverse of :func:`svec`.  Accepts a batch (..., k(k+1)/2)."""
    v = np.asarray(v, dtype=float)
    if k is None:
        k = int(round((np.sqrt(8 * v.shape[-1] + 1) - 1) / 2))
    if svec_dim(k) != v.shape[-1]:
        raise ValueError("svec length does not match matrix order")
    iu, ju, w = _tri_cache(k)
    M = np.zeros(v.shape[:-1] + (k, k))
    vals = v / w
    M[..., iu, ju] = vals
    M[..., ju, iu] = vals
    return M


def svec_identity(k: int) -> np.ndarray:
    return svec(np.eye(k))


@dataclass
class ConicProgram:
    """Dense standard-form conic program."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    cones: tuple[Cone, ...]

    def __post_init__(self) -> None:
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.cones = tuple(self.cones)
        m = sum(cone.size for cone in self.cones)
        if self.A.shape != (m, self.c.size) and not (m == 0 and self.A.size == 0):
            raise ValueError(
                f"A has shape {self.A.shape}, expected ({m}, {self.c.size})"
            )
        if self.b.size != m:
            raise ValueError("b length does not match cone sizes")
        if not (
            np.all(np.isfinite(self.c))
            and np.all(np.isfinite(self.A))
            and np.all(np.isfinite(self.b))
        ):
            raise ValueError("program data must be finite")

    @property
    def n_var(self) -> int:
        return self.c.size

    @property
    def n_slack(self) -> int:
        return sum(cone.size for cone in self.cones)

    def segments(self) -> list[tuple[Cone, slice]]:
        """Cone segments with their slack-index slices, in order."""
        out = []
        start = 0
        for cone in self.cones:
            out.append((cone, slice(start, start + cone.size)))
            start += cone.size
        return out

    # --- serialization --------------------------------------------------
    def to_json_dict(self) -> dict:
        rows, cols = np.nonzero(self.A)
        return {
            "c": self.c.tolist(),
            "b": self.b.tolist(),
            "A": [
                [int(i), int(j), float(self.A[i, j])] for i, j in zip(rows, cols)
            ],
            "cones": [{"type": cone.kind, "dim": cone.dim} for cone in self.cones],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def from_json_dict(d: Mapping) -> "ConicProgram":
        try:
            cones = tuple(Cone(cd["type"], int(cd["dim"])) for cd in d["cones"])
            c = np.asarray(d["c"], dtype=float)
            b = np.asarray(d["b"], dtype=float)
            m = sum(cone.size for cone in cones)
            A = np.zeros((m, c.size))
            for i, j, v in d["A"]:
                A[int(i), int(j)] = float(v)
        except (KeyError, TypeError, ValueError, IndexError) as ex:
            raise SchemaError(f"malformed conic program JSON: {ex}") from ex
        return ConicProgram(c, A, b, cones)

    @staticmethod
    def from_json(text: str) -> "ConicProgram":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as ex:
            raise SchemaError(f"invalid JSON: {ex}") from ex
        if not isinstance(d, dict):
            raise SchemaError("conic program JSON must be an object")
        return ConicProgram.from_json_dict(d)


class SchemaError(ValueError):
    """Raised when an input file does not match the documented schema."""
