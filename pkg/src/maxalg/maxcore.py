"""Dense matrices over the max-times semiring (R+, max, *).

Zero is the additive identity and one the multiplicative identity, so the
usual nonnegative matrices are the carrier and no infinity sentinel is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, PreconditionError

EXACT_TOL = 1e-12
STRUCT_TOL = 1e-9


class MaxMatrix:
    """Immutable square nonnegative matrix.

    Supports ``a @ b`` for the max-times product, ``a | b`` for the entrywise
    max and ``a ** k`` for max-times powers.
    """

    __slots__ = ("_a",)

    def __init__(self, entries: Iterable[Iterable[float]] | np.ndarray):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"matrix must be square, got shape {a.shape}")
        if a.shape[0] < 1:
            raise DimensionError("matrix dimension must be at least 1")
        if not np.all(np.isfinite(a)):
            raise PreconditionError("matrix entries must be finite")
        if np.any(a < 0):
            i, j = np.argwhere(a < 0)[0]
            raise PreconditionError(f"negative entry {a[i, j]} at ({i}, {j})")
        a.setflags(write=False)
        self._a = a

    @classmethod
    def coerce(cls, m: "MaxMatrix | np.ndarray | Sequence") -> "MaxMatrix":
        return m if isinstance(m, MaxMatrix) else cls(m)

    @classmethod
    def identity(cls, n: int) -> "MaxMatrix":
        return cls(np.eye(n))

    @classmethod
    def zeros(cls, n: int) -> "MaxMatrix":
        return cls(np.zeros((n, n)))

    @property
    def n(self) -> int:
        return self._a.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Read-only view of the underlying array."""
        return self._a

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    def __getitem__(self, idx):
        return self._a[idx]

    def tolist(self) -> list[list[float]]:
        return self._a.tolist()

    def __matmul__(self, other: "MaxMatrix") -> "MaxMatrix":
        return max_mul(self, other)

    def __or__(self, other: "MaxMatrix") -> "MaxMatrix":
        return max_add(self, other)

    def __pow__(self, k: int) -> "MaxMatrix":
        return max_pow(self, k)

    def __repr__(self) -> str:
        return f"MaxMatrix({self._a.tolist()!r})"

    def allclose(self, other: "MaxMatrix | np.ndarray", tol: float = EXACT_TOL) -> bool:
        return allclose(self._a, np.asarray(other, dtype=float), tol)


def allclose(a: np.ndarray, b: np.ndarray, tol: float = EXACT_TOL) -> bool:
    """Entrywise ``|a - b| <= tol * max(1, |a|, |b|)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        return False
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return bool(np.all(np.abs(a - b) <= tol * scale))


def _raw_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a[:, :, None] * b[None, :, :]).max(axis=1)


def max_mul(a: MaxMatrix, b: MaxMatrix) -> MaxMatrix:
    a, b = MaxMatrix.coerce(a), MaxMatrix.coerce(b)
    if a.n != b.n:
        raise DimensionError(f"cannot multiply {a.n}x{a.n} by {b.n}x{b.n}")
    return MaxMatrix(_raw_mul(a.entries, b.entries))


def max_add(a: MaxMatrix, b: MaxMatrix) -> MaxMatrix:
    a, b = MaxMatrix.coerce(a), MaxMatrix.coerce(b)
    if a.n != b.n:
        raise DimensionError(f"cannot add {a.n}x{a.n} and {b.n}x{b.n}")
    return MaxMatrix(np.maximum(a.entries, b.entries))


def max_apply(a: MaxMatrix, x: Sequence[float] | np.ndarray) -> np.ndarray:
    """Max-times matrix-vector product ``a ⊗ x``."""
    a = MaxMatrix.coerce(a)
    x = np.asarray(x, dtype=float)
    if x.shape != (a.n,):
        raise DimensionError(f"vector of shape {x.shape} does not fit {a.n}x{a.n} matrix")
    return (a.entries * x[None, :]).max(axis=1)


def max_pow(a: MaxMatrix, k: int) -> MaxMatrix:
    a = MaxMatrix.coerce(a)
    if k < 0:
        raise PreconditionError("power must be nonnegative")
    if k == 0:
        return MaxMatrix.identity(a.n)
    x = a.entries
    if k <= a.n:
        r = x
        for _ in range(k - 1):
            r = _raw_mul(r, x)
        return MaxMatrix(r)
    r = None
    while k:
        if k & 1:
            r = x if r is None else _raw_mul(r, x)
        k >>= 1
        if k:
            x = _raw_mul(x, x)
    return MaxMatrix(r)


def kleene_star(a: MaxMatrix) -> MaxMatrix:
    """``I ⊕ a ⊕ a² ⊕ … ⊕ a^(n-1)``."""
    a = MaxMatrix.coerce(a)
    acc = np.eye(a.n)
    p = np.eye(a.n)
    for _ in range(a.n - 1):
        p = _raw_mul(p, a.entries)
        acc = np.maximum(acc, p)
    return MaxMatrix(acc)


@dataclass(frozen=True)
class BoolResidualSplit:
    boolean_part: MaxMatrix
    residual_part: MaxMatrix


def bool_residual_split(a: MaxMatrix) -> BoolResidualSplit:
    """Split a matrix bounded by the all-ones matrix into unit and sub-unit entries."""
    a = MaxMatrix.coerce(a)
    e = a.entries
    if np.any(e > 1.0):
        i, j = np.argwhere(e > 1.0)[0]
        raise PreconditionError(f"entry {e[i, j]} at ({i}, {j}) exceeds 1; scale the matrix first")
    unit = e == 1.0
    return BoolResidualSplit(
        boolean_part=MaxMatrix(unit.astype(float)),
        residual_part=MaxMatrix(np.where(unit, 0.0, e)),
    )


@dataclass(frozen=True)
class DiagNilpotentSplit:
    """Block-diagonal and strictly block-upper parts of a permuted matrix."""

    diagonal_part: MaxMatrix
    nilpotent_part: MaxMatrix


def _block_labels(order: Sequence[int], classes: Sequence[Sequence[int]]) -> np.ndarray:
    pos = {v: k for k, v in enumerate(order)}
    labels = np.empty(len(order), dtype=int)
    for c, members in enumerate(classes):
        for v in members:
            labels[pos[v]] = c
    return labels


def diag_nilpotent_split(a: MaxMatrix, form) -> DiagNilpotentSplit:
    """Split ``P A Pᵀ`` along the blocks of a Frobenius form.

    ``form`` needs ``order`` (position -> original vertex) and ``classes``
    (lists of original vertices, in block order).
    """
    a = MaxMatrix.coerce(a)
    order = list(form.order)
    if len(order) != a.n or sorted(order) != list(range(a.n)):
        raise DimensionError(f"form describes {len(order)} vertices, matrix has {a.n}")
    if sum(len(c) for c in form.classes) != a.n:
        raise DimensionError("form classes do not partition the matrix vertices")
    p = a.entries[np.ix_(order, order)]
    labels = _block_labels(order, form.classes)
    same = labels[:, None] == labels[None, :]
    above = labels[:, None] < labels[None, :]
    if np.any(p[labels[:, None] > labels[None, :]] > 0):
        raise PreconditionError("form is not a Frobenius form of this matrix")
    return DiagNilpotentSplit(
        diagonal_part=MaxMatrix(np.where(same, p, 0.0)),
        nilpotent_part=MaxMatrix(np.where(above, p, 0.0)),
    )
