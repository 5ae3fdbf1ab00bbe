"""Maximum circuit geometric mean, critical graphs, max eigenvalues and scaling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .graphstruct import (
    IRREDUCIBLE,
    FrobeniusForm,
    block,
    frobenius_form,
    is_irreducible,
    strongly_connected_components,
    to_digraph,
)
from .maxcore import (
    EXACT_TOL,
    STRUCT_TOL,
    MaxMatrix,
    _raw_mul,
    allclose,
    kleene_star,
    max_add,
    max_apply,
    max_mul,
)


def _karp_log_mean(w: np.ndarray) -> float:
    """Max mean cycle of a strongly connected graph given log-weights (-inf = no edge)."""
    k = w.shape[0]
    d = np.full((k + 1, k), -np.inf)
    d[0, 0] = 0.0
    for step in range(1, k + 1):
        d[step] = (d[step - 1][:, None] + w).max(axis=0)
    best = -np.inf
    for v in range(k):
        if d[k, v] == -np.inf:
            continue
        worst = np.inf
        for step in range(k):
            if d[step, v] == -np.inf:
                continue
            worst = min(worst, (d[k, v] - d[step, v]) / (k - step))
        best = max(best, worst)
    return float(best)


def mu(a: MaxMatrix) -> float:
    """Maximum geometric mean over all circuits; 0 for an acyclic graph."""
    a = MaxMatrix.coerce(a)
    e = a.entries
    best = 0.0
    for comp in strongly_connected_components(to_digraph(a)):
        sub = e[np.ix_(comp, comp)]
        if len(comp) == 1 and sub[0, 0] == 0:
            continue
        with np.errstate(divide="ignore"):
            logs = np.where(sub > 0, np.log(np.where(sub > 0, sub, 1.0)), -np.inf)
        best = max(best, _refine(sub, _karp_log_mean(logs)))
    return float(best)


def _refine(sub: np.ndarray, log_mean: float) -> float:
    """Geometric mean of one optimal circuit, avoiding exp/log drift."""
    b = sub / math.exp(log_mean)
    plus = _raw_mul(b, kleene_star(MaxMatrix(b)).entries)
    crit = (b > 0) & (b * plus.T >= 1.0 - STRUCT_TOL)
    start = int(np.argwhere(crit)[0][0])
    path, seen = [start], {start: 0}
    while True:
        nxt = int(np.flatnonzero(crit[path[-1]])[0])
        if nxt in seen:
            cyc = path[seen[nxt]:] + [nxt]
            break
        seen[nxt] = len(path)
        path.append(nxt)
    w = [sub[u, v] for u, v in zip(cyc, cyc[1:])]
    gm = float(math.prod(w)) ** (1.0 / len(w))
    if abs(math.log(gm) - log_mean) > STRUCT_TOL:
        return math.exp(log_mean)
    return gm


def mu_bounds(a: MaxMatrix) -> tuple[float, float]:
    e = MaxMatrix.coerce(a).entries
    return float(e.max(axis=1).min()), float(e.max())


@dataclass(frozen=True)
class CriticalGraph:
    mu: float
    critical_vertices: tuple[int, ...]
    critical_edges: tuple[tuple[int, int], ...]
    critical_matrix: MaxMatrix


def critical_graph(a: MaxMatrix, tol: float = STRUCT_TOL) -> CriticalGraph:
    """Edges lying on circuits whose geometric mean attains ``mu(a)``.

    With ``b = a / mu``, edge (i, j) is critical iff ``b_ij * b⁺_ji == 1``.
    """
    a = MaxMatrix.coerce(a)
    m = mu(a)
    if m <= 0:
        raise PreconditionError("matrix is acyclic; no critical circuits")
    b = a.entries / m
    plus = _raw_mul(b, kleene_star(MaxMatrix(b)).entries)
    closing = b * plus.T
    crit = (b > 0) & (closing >= 1.0 - tol)
    edges = tuple((int(i), int(j)) for i, j in np.argwhere(crit))
    verts = tuple(sorted({v for ij in edges for v in ij}))
    return CriticalGraph(
        mu=m,
        critical_vertices=verts,
        critical_edges=edges,
        critical_matrix=MaxMatrix(np.where(crit, a.entries, 0.0)),
    )


@dataclass(frozen=True)
class Eigenvalue:
    value: float
    admissible: bool
    witness_class: int


@dataclass(frozen=True)
class SpectralReport:
    mu: float
    form: FrobeniusForm
    class_mu: tuple[float, ...]
    eigenvalues: tuple[Eigenvalue, ...]
    eigenvectors: dict[float, np.ndarray] = field(default_factory=dict)

    @property
    def admissible_values(self) -> list[float]:
        return sorted({ev.value for ev in self.eigenvalues if ev.admissible})


def _same(x: float, y: float, tol: float = STRUCT_TOL) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def is_eigenpair(a: MaxMatrix, lam: float, v: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    v = np.asarray(v, dtype=float)
    return bool(np.any(v > 0)) and allclose(max_apply(a, v), lam * v, tol)


def _witness(a: MaxMatrix, form: FrobeniusForm, c: int, lam: float) -> np.ndarray | None:
    e = a.entries
    ups = form.upstream(c)
    verts = sorted(v for i in ups for v in form.classes[i])
    v = np.zeros(a.n)
    if lam == 0:
        # Any upstream vertex without predecessors carries a null eigenvector.
        for s in verts:
            if not np.any(e[:, s] > 0):
                v[s] = 1.0
                return v
        return None
    sub = MaxMatrix(e[np.ix_(verts, verts)] / lam)
    crit = critical_graph(block(a, form, c))
    k = verts.index(form.classes[c][crit.critical_vertices[0]])
    v[verts] = kleene_star(sub).entries[:, k]
    return v / v.max()


def spectrum(a: MaxMatrix) -> SpectralReport:
    """Max eigenvalues with nonnegative eigenvectors, per Frobenius class.

    ``mu(A_cc)`` is an eigenvalue iff no class with a strictly larger circuit
    mean has access to class ``c``. Each admissible value gets one witness,
    built from a Kleene-star column at a critical vertex and then verified.
    """
    a = MaxMatrix.coerce(a)
    form = frobenius_form(a)
    cmu = tuple(
        mu(block(a, form, c)) if form.block_kind[c] == IRREDUCIBLE else 0.0
        for c in range(form.m)
    )
    eigs = []
    vecs: dict[float, np.ndarray] = {}
    for c in range(form.m):
        lam = cmu[c]
        ok = all(not (cmu[j] > lam and not _same(cmu[j], lam)) for j in form.upstream(c))
        eigs.append(Eigenvalue(lam, ok, c))
        if ok and not any(_same(lam, known) for known in vecs):
            v = _witness(a, form, c, lam)
            if v is not None and is_eigenpair(a, lam, v):
                vecs[lam] = v
    return SpectralReport(
        mu=max(cmu), form=form, class_mu=cmu, eigenvalues=tuple(eigs), eigenvectors=vecs
    )


def principal_eigenvector(a: MaxMatrix) -> np.ndarray:
    """Positive eigenvector for ``mu(a)`` of an irreducible matrix, max component 1."""
    a = MaxMatrix.coerce(a)
    if not is_irreducible(a):
        raise PreconditionError("matrix is reducible; use spectrum() for its eigenvectors")
    rep = spectrum(a)
    return rep.eigenvectors[rep.eigenvalues[0].value]


def dad_scale(
    a: MaxMatrix, seed: np.ndarray | None = None, snap: float = STRUCT_TOL
) -> tuple[np.ndarray, MaxMatrix]:
    """Diagonal similarity ``D⁻¹ A D`` bounded by the all-ones matrix.

    ``d = a* ⊗ seed``. Scaled entries within ``snap`` of 1 are set to exactly
    1 so that unit entries survive float roundoff.
    """
    a = MaxMatrix.coerce(a)
    if not is_irreducible(a):
        raise PreconditionError("DAD scaling needs an irreducible matrix")
    m = mu(a)
    if m > 1 + STRUCT_TOL:
        raise PreconditionError(f"mu = {m} exceeds 1; no bounding diagonal scaling exists")
    seed = np.ones(a.n) if seed is None else np.asarray(seed, dtype=float)
    if seed.shape != (a.n,) or np.any(seed < 0) or not np.any(seed > 0):
        raise PreconditionError("seed must be a nonnegative, nonzero vector of length n")
    d = max_apply(kleene_star(a), seed)
    s = a.entries * d[None, :] / d[:, None]
    s = np.where(np.abs(s - 1.0) <= snap, 1.0, s)
    return d, MaxMatrix(s)


@dataclass(frozen=True)
class CommutingReport:
    mu_product: float
    mu_a_times_mu_b: float
    mu_sum: float
    max_mu: float
    both_irreducible: bool

    def product_ok(self, tol: float = STRUCT_TOL) -> bool:
        return self.mu_product <= self.mu_a_times_mu_b + tol * max(1.0, self.mu_a_times_mu_b)

    def sum_ok(self, tol: float = STRUCT_TOL) -> bool:
        return self.mu_sum <= self.max_mu + tol * max(1.0, self.max_mu)

    def product_equal(self, tol: float = STRUCT_TOL) -> bool:
        return _same(self.mu_product, self.mu_a_times_mu_b, tol)

    def sum_equal(self, tol: float = STRUCT_TOL) -> bool:
        return _same(self.mu_sum, self.max_mu, tol)


def check_commuting_mu(a: MaxMatrix, b: MaxMatrix, tol: float = EXACT_TOL) -> CommutingReport:
    a, b = MaxMatrix.coerce(a), MaxMatrix.coerce(b)
    ab, ba = max_mul(a, b), max_mul(b, a)
    scale = np.maximum(1.0, np.maximum(ab.entries, ba.entries))
    bad = np.argwhere(np.abs(ab.entries - ba.entries) > tol * scale)
    if len(bad):
        i, j = bad[0]
        raise PreconditionError(
            f"matrices do not commute: (AB)[{i},{j}] = {ab[i, j]} but (BA)[{i},{j}] = {ba[i, j]}"
        )
    ma, mb = mu(a), mu(b)
    rep = CommutingReport(
        mu_product=mu(ab),
        mu_a_times_mu_b=ma * mb,
        mu_sum=mu(max_add(a, b)),
        max_mu=max(ma, mb),
        both_irreducible=is_irreducible(a) and is_irreducible(b),
    )
    if not (rep.product_ok() and rep.sum_ok()):
        raise AssertionError(f"commuting-pair inequality violated: {rep}")
    return rep
