"""Weighted digraph of a matrix, communication classes and the Frobenius normal form."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionError
from .maxcore import MaxMatrix

IRREDUCIBLE = "irreducible"
NULL_1X1 = "null_1x1"


class Edge(NamedTuple):
    src: int
    dst: int
    weight: float


@dataclass(frozen=True)
class Digraph:
    n: int
    edges: tuple[Edge, ...]

    def successors(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for e in self.edges:
            out[e.src].append(e.dst)
        return out


@dataclass(frozen=True)
class FrobeniusForm:
    """Block ordering that makes ``P A Pᵀ`` block upper-triangular.

    ``order[k]`` is the original vertex placed at position ``k``; ``classes``
    lists each block's original vertices (sorted), in block order. ``access``
    is the reflexive-transitive class reachability relation, indexed by block.
    """

    order: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    block_kind: tuple[str, ...]
    access: np.ndarray

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def m(self) -> int:
        return len(self.classes)

    def class_of(self) -> np.ndarray:
        """Block index of every original vertex."""
        lab = np.empty(self.n, dtype=int)
        for c, members in enumerate(self.classes):
            lab[list(members)] = c
        return lab

    def upstream(self, c: int) -> list[int]:
        """Blocks that have access to block ``c`` (including ``c``)."""
        return [i for i in range(self.m) if self.access[i, c]]


def to_digraph(a: MaxMatrix) -> Digraph:
    a = MaxMatrix.coerce(a)
    idx = np.argwhere(a.entries > 0)
    return Digraph(a.n, tuple(Edge(int(i), int(j), float(a.entries[i, j])) for i, j in idx))


def _tarjan(n: int, succ: list[list[int]]) -> list[list[int]]:
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recursed = False
            while i < len(succ[v]):
                w = succ[v][i]
                i += 1
                if index[w] == -1:
                    work.append((v, i))
                    work.append((w, 0))
                    recursed = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recursed:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def strongly_connected_components(g: Digraph) -> list[list[int]]:
    return _tarjan(g.n, g.successors())


def communication_classes(g: Digraph) -> FrobeniusForm:
    comps = strongly_connected_components(g)
    label = [0] * g.n
    for c, members in enumerate(comps):
        for v in members:
            label[v] = c
    m = len(comps)
    children: list[set[int]] = [set() for _ in range(m)]
    indeg = [0] * m
    loops = set()
    for e in g.edges:
        cs, cd = label[e.src], label[e.dst]
        if e.src == e.dst:
            loops.add(e.src)
        if cs != cd and cd not in children[cs]:
            children[cs].add(cd)
            indeg[cd] += 1

    # Kahn's algorithm, ties broken by smallest original vertex.
    heap = [(comps[c][0], c) for c in range(m) if indeg[c] == 0]
    heapq.heapify(heap)
    topo: list[int] = []
    while heap:
        _, c = heapq.heappop(heap)
        topo.append(c)
        for d in children[c]:
            indeg[d] -= 1
            if indeg[d] == 0:
                heapq.heappush(heap, (comps[d][0], d))

    pos = {c: k for k, c in enumerate(topo)}
    access = np.eye(m, dtype=bool)
    for c in reversed(topo):
        for d in children[c]:
            access[pos[c]] |= access[pos[d]]

    classes = tuple(tuple(comps[c]) for c in topo)
    kinds = tuple(
        NULL_1X1 if len(cl) == 1 and cl[0] not in loops else IRREDUCIBLE for cl in classes
    )
    order = tuple(v for cl in classes for v in cl)
    access.setflags(write=False)
    return FrobeniusForm(order=order, classes=classes, block_kind=kinds, access=access)


def frobenius_form(a: MaxMatrix) -> FrobeniusForm:
    return communication_classes(to_digraph(a))


def is_irreducible(a: MaxMatrix) -> bool:
    form = frobenius_form(a)
    return form.m == 1 and form.block_kind[0] == IRREDUCIBLE


def apply_permutation(a: MaxMatrix, form: FrobeniusForm) -> MaxMatrix:
    """Return ``P A Pᵀ`` for the ordering in ``form``."""
    a = MaxMatrix.coerce(a)
    if form.n != a.n:
        raise DimensionError(f"form describes {form.n} vertices, matrix has {a.n}")
    order = list(form.order)
    return MaxMatrix(a.entries[np.ix_(order, order)])


def block(a: MaxMatrix, form: FrobeniusForm, c: int) -> MaxMatrix:
    """Diagonal block of class ``c`` (principal submatrix on its vertices)."""
    a = MaxMatrix.coerce(a)
    members = list(form.classes[c])
    return MaxMatrix(a.entries[np.ix_(members, members)])


def is_block_upper_triangular(p: MaxMatrix, sizes: list[int]) -> bool:
    labels = np.repeat(np.arange(len(sizes)), sizes)
    below = labels[:, None] > labels[None, :]
    return not np.any(MaxMatrix.coerce(p).entries[below] > 0)
