"""Brute-force reference computations used to cross-check the fast paths."""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .maxcore import MaxMatrix


def simple_circuits(a: MaxMatrix) -> Iterator[list[int]]:
    """Every simple circuit once, as a vertex list starting at its smallest vertex."""
    e = MaxMatrix.coerce(a).entries
    n = e.shape[0]
    for s in range(n):
        stack = [(s, [s])]
        while stack:
            v, path = stack.pop()
            for w in range(s, n):
                if e[v, w] <= 0:
                    continue
                if w == s:
                    yield path
                elif w not in path:
                    stack.append((w, path + [w]))


def circuit_mean(a: MaxMatrix, cycle: list[int]) -> float:
    e = MaxMatrix.coerce(a).entries
    closed = cycle + [cycle[0]]
    prod = 1.0
    for u, v in zip(closed, closed[1:]):
        prod *= e[u, v]
    return prod ** (1.0 / len(cycle))


def brute_mu(a: MaxMatrix) -> float:
    return max((circuit_mean(a, c) for c in simple_circuits(a)), default=0.0)


def brute_critical_edges(a: MaxMatrix, tol: float = 1e-9) -> set[tuple[int, int]]:
    best = brute_mu(a)
    edges = set()
    for c in simple_circuits(a):
        if abs(circuit_mean(a, c) - best) <= tol * max(1.0, best):
            closed = c + [c[0]]
            edges.update(zip(closed, closed[1:]))
    return edges


def naive_mul(a: MaxMatrix, b: MaxMatrix) -> np.ndarray:
    a, b = MaxMatrix.coerce(a).entries, MaxMatrix.coerce(b).entries
    n = a.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            best = 0.0
            for k in range(n):
                best = max(best, a[i, k] * b[k, j])
            out[i, j] = best
    return out
