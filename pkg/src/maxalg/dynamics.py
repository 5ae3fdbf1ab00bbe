"""Periods, transients and limits of max-times power sequences and word products."""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionError,
    InconclusiveError,
    IterationCancelled,
    PreconditionError,
)
from .graphstruct import IRREDUCIBLE, block, frobenius_form, is_irreducible, to_digraph, strongly_connected_components
from .maxcore import (
    EXACT_TOL,
    STRUCT_TOL,
    MaxMatrix,
    _raw_mul,
    allclose,
    bool_residual_split,
    max_apply,
    max_mul,
    max_pow,
)
from .spectral import check_commuting_mu, dad_scale, mu, spectrum

ZERO_TOL = 1e-9
MAX_SQUARINGS = 200

Progress = Callable[[int], "bool | None"]


def step_cap(n: int, q: int = 1) -> int:
    """Iteration cap, ``10·n·q + 100`` unless ``MAXALG_MAX_STEPS`` is set."""
    env = os.environ.get("MAXALG_MAX_STEPS")
    if env:
        return int(env)
    return 10 * n * q + 100


def _tick(progress: Progress | None, step: int) -> None:
    if progress is not None and progress(step) is False:
        raise IterationCancelled(f"cancelled at step {step}")


def _lcm(values: Sequence[int]) -> int:
    return reduce(math.lcm, values, 1)


def _divisors(q: int) -> list[int]:
    return [d for d in range(1, q + 1) if q % d == 0]


def _clamp(x: np.ndarray, zero_tol: float = ZERO_TOL) -> np.ndarray:
    return np.where(x < zero_tol, 0.0, x)


@dataclass(frozen=True)
class PeriodReport:
    q: int
    t0: int
    method: str


@dataclass(frozen=True)
class PowerLimit:
    """Limits ``limits[j-1] = lim_k A^(kq+j)`` for ``j = 1..q``.

    ``t0`` is the index from which the powers agree with the limit cycle on
    every entry where the limit is nonzero (other entries only decay). It is
    ``None`` when that did not settle inside the step cap.
    """

    q: int
    t0: int | None
    limits: tuple[MaxMatrix, ...]

    def limit(self, j: int) -> MaxMatrix:
        """Limit along exponents congruent to ``j`` mod ``q`` (any integer ``j``)."""
        return self.limits[(j - 1) % self.q]

    @property
    def cycle_period(self) -> int:
        """Smallest shift under which the sequence of limits repeats."""
        for d in _divisors(self.q):
            if all(self.limits[j].allclose(self.limits[(j + d) % self.q]) for j in range(self.q)):
                return d
        return self.q


def check_coherence(a: MaxMatrix, lim: PowerLimit, tol: float = EXACT_TOL) -> bool:
    """``A ⊗ L(j) = L(j+1)`` and ``A^q ⊗ L(j) = L(j)`` for every ``j``."""
    a = MaxMatrix.coerce(a)
    aq = max_pow(a, lim.q)
    for j in range(1, lim.q + 1):
        lj = lim.limit(j)
        if not max_mul(a, lj).allclose(lim.limit(j + 1), tol):
            return False
        if not max_mul(aq, lj).allclose(lj, tol):
            return False
    return True


# --------------------------------------------------------------------------- oracle


@dataclass
class OracleTrace:
    """Powers ``A^0 .. A^m`` and the first exact repeat found among them.

    ``status`` is ``"periodic"`` when a repeat ``A^t0 = A^(t0+q)`` was found,
    ``"vanishing"`` when the powers drop below the zero threshold without
    repeating exactly, and ``"inconclusive"`` otherwise.
    """

    powers: list[np.ndarray]
    t0: int | None
    q: int | None
    status: str

    def power(self, t: int) -> np.ndarray:
        """``A^t`` for any ``t``, extended through the detected cycle."""
        if t < len(self.powers):
            return self.powers[t]
        if self.q is None:
            raise IndexError(f"power {t} beyond trace and no cycle detected")
        return self.powers[self.t0 + (t - self.t0) % self.q]


def oracle_iterate(
    a: MaxMatrix,
    max_steps: int,
    zero_tol: float = 0.0,
    tol: float = EXACT_TOL,
    progress: Progress | None = None,
) -> OracleTrace:
    """Brute-force power iteration with repeat detection against all history.

    With ``zero_tol > 0`` entries below it are set to 0 after every step, which
    turns asymptotically periodic sequences into exactly periodic ones.
    """
    a = MaxMatrix.coerce(a)
    if max_steps < 1:
        raise PreconditionError("max_steps must be at least 1")
    e = a.entries
    powers = [np.eye(a.n)]
    buckets: dict[bytes, list[int]] = {}

    def key(x: np.ndarray) -> bytes:
        # Coarse key: tolerance-equal matrices share it except near rounding boundaries,
        # so a linear scan backs it up.
        return np.round(x, 6).tobytes()

    buckets.setdefault(key(powers[0]), []).append(0)
    for t in range(1, max_steps + 1):
        _tick(progress, t)
        p = _raw_mul(e, powers[-1])
        if zero_tol > 0:
            p = _clamp(p, zero_tol)
        candidates = buckets.get(key(p), [])
        hit = next((s for s in candidates if allclose(powers[s], p, tol)), None)
        if hit is None:
            hit = next((s for s in range(t) if allclose(powers[s], p, tol)), None)
        powers.append(p)
        if hit is not None:
            if p.max() < ZERO_TOL and not np.array_equal(powers[hit], p):
                # Matched only because everything is tiny: the sequence is decaying.
                return OracleTrace(powers, None, None, "vanishing")
            return OracleTrace(powers, hit, t - hit, "periodic")
        buckets.setdefault(key(p), []).append(t)
    status = "vanishing" if powers[-1].max() < ZERO_TOL else "inconclusive"
    return OracleTrace(powers, None, None, status)


# --------------------------------------------------------------------------- periods


def _cyclicity(n: int, succ: list[list[int]], comp: list[int]) -> int | None:
    """gcd of circuit lengths in one strongly connected component (None if it has none)."""
    inside = set(comp)
    root = comp[0]
    level = {root: 0}
    queue = deque([root])
    g = 0
    while queue:
        u = queue.popleft()
        for v in succ[u]:
            if v not in inside:
                continue
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                g = math.gcd(g, level[u] + 1 - level[v])
    return g or None


def _exact_t0(p_of: Callable[[int], np.ndarray], q: int, cap: int, tol: float) -> int | None:
    for t in range(cap + 1):
        if allclose(p_of(t), p_of(t + q), tol):
            return t
    return None


class _Powers:
    """Lazily extended list of powers ``A^0, A^1, ...``."""

    def __init__(self, e: np.ndarray, progress: Progress | None = None):
        self.e = e
        self.progress = progress
        self.items = [np.eye(e.shape[0])]

    def __call__(self, t: int) -> np.ndarray:
        while len(self.items) <= t:
            _tick(self.progress, len(self.items))
            self.items.append(_raw_mul(self.e, self.items[-1]))
        return self.items[t]


def boolean_period(b: MaxMatrix, max_steps: int | None = None) -> PeriodReport:
    """Period of a 0/1 matrix: lcm over cyclic components of their circuit-length gcd."""
    b = MaxMatrix.coerce(b)
    if not np.all((b.entries == 0) | (b.entries == 1)):
        raise PreconditionError("boolean_period needs a matrix with entries in {0, 1}")
    g = to_digraph(b)
    succ = g.successors()
    gcds = [c for comp in strongly_connected_components(g) if (c := _cyclicity(b.n, succ, comp))]
    q = _lcm(gcds)
    cap = max_steps if max_steps is not None else step_cap(b.n, q)
    pw = _Powers(b.entries)
    t0 = _exact_t0(pw, q, cap, 0.0)
    if t0 is None:
        raise InconclusiveError(f"no transient found within {cap} steps for q = {q}")
    return PeriodReport(q=q, t0=t0, method="boolean_gcd")


def elsner_period(
    a: MaxMatrix,
    max_steps: int | None = None,
    tol: float = EXACT_TOL,
    progress: Progress | None = None,
) -> PeriodReport:
    """Exact period and transient of an irreducible matrix with ``mu = 1``.

    The candidate period comes from the unit-entry pattern of the DAD-scaled
    matrix; the transient and the minimality of the period are then settled
    by iterating powers.
    """
    a = MaxMatrix.coerce(a)
    if not is_irreducible(a):
        raise PreconditionError("elsner_period needs an irreducible matrix")
    m = mu(a)
    if abs(m - 1.0) > STRUCT_TOL:
        raise PreconditionError(f"elsner_period needs mu = 1, got {m}")
    _, scaled = dad_scale(a)
    qb = boolean_period(bool_residual_split(scaled).boolean_part).q
    cap = max_steps if max_steps is not None else step_cap(a.n, qb)
    pw = _Powers(a.entries, progress)
    t0 = _exact_t0(pw, qb, cap, tol)
    if t0 is None:
        raise InconclusiveError(f"powers not periodic within {cap} steps (candidate q = {qb})")
    q = next(d for d in _divisors(qb) if allclose(pw(t0), pw(t0 + d), tol))
    if q != qb:
        raise AssertionError(f"iterated period {q} disagrees with Boolean period {qb}")
    return PeriodReport(q=q, t0=t0, method="iteration_oracle")


# --------------------------------------------------------------------------- limits


def _block_period(a: MaxMatrix) -> int:
    try:
        return elsner_period(dad_scale(a)[1]).q
    except InconclusiveError:
        return boolean_period(bool_residual_split(dad_scale(a)[1]).boolean_part).q


def _limit_of_powers(b: np.ndarray, tol: float) -> np.ndarray:
    """``lim b^k`` along ``k = 2^m`` (valid when ``b^k`` converges)."""
    x = b
    stable = 0
    for _ in range(MAX_SQUARINGS):
        y = _raw_mul(x, x)
        if allclose(_clamp(x), _clamp(y), tol):
            stable += 1
            if stable >= 2:
                return _clamp(y)
        else:
            stable = 0
        x = y
    raise InconclusiveError("power subsequence did not converge")


def _support_t0(
    pw: Callable[[int], np.ndarray], limits: Sequence[np.ndarray], q: int, cap: int, tol: float
) -> int | None:
    last_bad = -1
    for t in range(cap + 1):
        lim = limits[(t - 1) % q]
        support = lim > 0
        if not allclose(pw(t)[support], lim[support], tol):
            last_bad = t
    t0 = last_bad + 1
    return t0 if t0 + 2 * q <= cap else None


def power_limit(
    a: MaxMatrix,
    tol: float = EXACT_TOL,
    max_steps: int | None = None,
    progress: Progress | None = None,
) -> PowerLimit:
    """Asymptotic period and limit matrices of ``A^k`` for ``mu(A) <= 1``.

    Candidate period is the lcm of the exact periods of the Frobenius blocks
    with ``mu = 1``; blocks with ``mu < 1`` vanish and contribute 1. The
    smallest divisor of the candidate under which the limits repeat is returned.
    """
    a = MaxMatrix.coerce(a)
    m = mu(a)
    if m > 1 + STRUCT_TOL:
        raise PreconditionError(f"mu = {m} exceeds 1; powers diverge")
    form = frobenius_form(a)
    periods = []
    for c in range(form.m):
        if form.block_kind[c] != IRREDUCIBLE:
            continue
        blk = block(a, form, c)
        if abs(mu(blk) - 1.0) <= STRUCT_TOL:
            periods.append(_block_period(blk))
    big_q = _lcm(periods)

    lq = _limit_of_powers(max_pow(a, big_q).entries, tol)
    aq = max_pow(a, big_q).entries
    if not allclose(_raw_mul(aq, lq), lq, tol):
        raise InconclusiveError(f"candidate period {big_q} is not an asymptotic period")
    cands = []
    p = np.eye(a.n)
    for _ in range(1, big_q):
        p = _raw_mul(a.entries, p)
        cands.append(_clamp(_raw_mul(p, lq)))
    cands.append(lq)

    q = next(
        d for d in _divisors(big_q)
        if all(allclose(cands[j], cands[(j + d) % big_q], tol) for j in range(big_q))
    )
    limits = cands[:q]
    cap = max_steps if max_steps is not None else step_cap(a.n, q)
    t0 = _support_t0(_Powers(a.entries, progress), limits, q, cap, tol)
    lim = PowerLimit(q=q, t0=t0, limits=tuple(MaxMatrix(x) for x in limits))
    if not check_coherence(a, lim, tol):
        raise AssertionError("limit matrices are not coherent under multiplication")
    return lim


@dataclass(frozen=True)
class PeriodicPoint:
    vector: np.ndarray
    period: int


def periodic_point(
    a: MaxMatrix, x: Sequence[float], limit: PowerLimit, j: int, tol: float = EXACT_TOL
) -> PeriodicPoint:
    """``ξ = L(j) ⊗ x`` and its exact period (a divisor of ``limit.q``)."""
    a = MaxMatrix.coerce(a)
    if not 1 <= j <= limit.q:
        raise PreconditionError(f"j must lie in 1..{limit.q}, got {j}")
    x = np.asarray(x, dtype=float)
    if x.shape != (a.n,) or np.any(x < 0):
        raise PreconditionError("x must be a nonnegative vector of length n")
    xi = max_apply(limit.limit(j), x)
    if not allclose(max_apply(max_pow(a, limit.q), xi), xi, tol):
        raise AssertionError("limit vector is not fixed by A^q")
    period = next(d for d in _divisors(limit.q) if allclose(max_apply(max_pow(a, d), xi), xi, tol))
    return PeriodicPoint(xi, period)


# --------------------------------------------------------------------------- words


@dataclass(frozen=True)
class Word:
    """Letters ``1..N``; the product applies the first letter first."""

    letters: tuple[int, ...]

    def __post_init__(self):
        if not self.letters:
            raise PreconditionError("a word needs at least one letter")
        if any(int(c) != c or c < 1 for c in self.letters):
            raise PreconditionError(f"letters must be positive integers: {self.letters}")

    @classmethod
    def parse(cls, text: str) -> "Word":
        try:
            return cls(tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok))
        except ValueError as exc:
            raise PreconditionError(f"bad word {text!r}: {exc}") from None

    def counts(self, n_letters: int | None = None) -> list[int]:
        top = n_letters if n_letters is not None else max(self.letters)
        out = [0] * top
        for c in self.letters:
            out[c - 1] += 1
        return out

    def __len__(self) -> int:
        return len(self.letters)


def _check_family(mats: Sequence[MaxMatrix], w: Word) -> list[MaxMatrix]:
    mats = [MaxMatrix.coerce(m) for m in mats]
    if not mats:
        raise PreconditionError("need at least one matrix")
    if len({m.n for m in mats}) != 1:
        raise DimensionError("all matrices must have the same dimension")
    if max(w.letters) > len(mats):
        raise PreconditionError(f"letter {max(w.letters)} out of range 1..{len(mats)}")
    return mats


def word_product(mats: Sequence[MaxMatrix], w: Word) -> MaxMatrix:
    mats = _check_family(mats, w)
    r = np.eye(mats[0].n)
    for c in w.letters:
        r = _raw_mul(mats[c - 1].entries, r)
    return MaxMatrix(r)


def _check_pairwise_commuting(mats: Sequence[MaxMatrix], letters: Sequence[int]) -> None:
    for x, i in enumerate(letters):
        for k in letters[x + 1:]:
            try:
                check_commuting_mu(mats[i - 1], mats[k - 1])
            except PreconditionError as exc:
                raise PreconditionError(f"matrices {i} and {k}: {exc}") from None


def commuting_word_limit(
    mats: Sequence[MaxMatrix], w: Word, tol: float = EXACT_TOL
) -> PowerLimit:
    """Limits of ``A_w^(kq+j)`` for pairwise commuting matrices with ``mu <= 1``.

    ``q`` is the lcm of the asymptotic periods of the letters present in ``w``,
    and each limit is the product of the per-letter limits raised to the letter
    counts. The result is cross-checked against the direct power limit of ``A_w``.
    """
    mats = _check_family(mats, w)
    present = sorted(set(w.letters))
    _check_pairwise_commuting(mats, present)
    per = {}
    for i in present:
        m = mu(mats[i - 1])
        if m > 1 + STRUCT_TOL:
            raise PreconditionError(f"matrix {i} has mu = {m} > 1")
        per[i] = power_limit(mats[i - 1], tol)
    q = _lcm([per[i].q for i in present])
    counts = w.counts(len(mats))
    n = mats[0].n
    limits = []
    for j in range(1, q + 1):
        acc = np.eye(n)
        for i in present:
            acc = _raw_mul(acc, max_pow(per[i].limit(j), counts[i - 1]).entries)
        limits.append(_clamp(acc))

    aw = word_product(mats, w)
    direct = power_limit(aw, tol)
    for j in range(1, q + 1):
        if not allclose(limits[j - 1], direct.limit(j).entries, tol):
            raise AssertionError(f"word limit {j} disagrees with the direct power limit")
    cap = step_cap(n, q)
    t0 = _support_t0(_Powers(aw.entries), limits, q, cap, tol)
    return PowerLimit(q=q, t0=t0, limits=tuple(MaxMatrix(x) for x in limits))


@dataclass(frozen=True)
class TwoMatrixLimit:
    """Limit cycle of a two-letter commuting word with 0/1 spectra.

    ``candidates[s]`` is ``A1^(p1 t) ⊗ A2^(p2 t)`` for ``t = t0 + s``, and
    ``membership[j-1]`` is the ``t`` whose candidate equals ``L(j)``.
    """

    t0: int
    q: int
    limit: PowerLimit
    candidates: tuple[MaxMatrix, ...]
    membership: tuple[int, ...]


def _full_match(x: np.ndarray, lim: np.ndarray, tol: float) -> bool:
    support = lim > 0
    return allclose(x[support], lim[support], tol) and bool(np.all(x[~support] < ZERO_TOL))


def two_matrix_boolean_limit(
    a1: MaxMatrix, a2: MaxMatrix, w: Word, tol: float = EXACT_TOL, max_steps: int | None = None
) -> TwoMatrixLimit:
    a1, a2 = MaxMatrix.coerce(a1), MaxMatrix.coerce(a2)
    for idx, m in ((1, a1), (2, a2)):
        for ev in spectrum(m).eigenvalues:
            if ev.admissible and STRUCT_TOL < ev.value < 1 - STRUCT_TOL:
                raise PreconditionError(f"matrix {idx} has eigenvalue {ev.value} strictly inside (0, 1)")
            if ev.admissible and ev.value > 1 + STRUCT_TOL:
                raise PreconditionError(f"matrix {idx} has eigenvalue {ev.value} > 1")
    _check_family([a1, a2], w)
    _check_pairwise_commuting([a1, a2], [1, 2])
    lim = commuting_word_limit([a1, a2], w, tol)
    q = lim.q
    aw = word_product([a1, a2], w)
    pw = _Powers(aw.entries)
    cap = max_steps if max_steps is not None else step_cap(aw.n, q)
    t0 = next((t for t in range(cap + 1) if _full_match(pw(t), lim.limit(t).entries, tol)), None)
    if t0 is None:
        raise InconclusiveError(f"word powers did not enter the limit cycle within {cap} steps")
    p1, p2 = w.counts(2)
    cands = tuple(
        max_mul(max_pow(a1, p1 * t), max_pow(a2, p2 * t)) for t in range(t0, t0 + q)
    )
    membership = []
    for j in range(1, q + 1):
        hit = next(
            (t0 + s for s, c in enumerate(cands) if _full_match(c.entries, lim.limit(j).entries, tol)),
            None,
        )
        if hit is None:
            raise AssertionError(f"limit {j} is not among the candidate products")
        membership.append(hit)
    return TwoMatrixLimit(t0=t0, q=q, limit=lim, candidates=cands, membership=tuple(membership))


# --------------------------------------------------------------------------- common eigenvectors


@dataclass(frozen=True)
class CommonEigenbasis:
    """Accepted common eigenvectors and their eigenvalues.

    ``eigenvalues[i][j]`` is the eigenvalue of matrix ``i`` on ``vectors[j]``.
    ``rejected`` holds indices (into the candidate list) that failed the
    eigen-equation for some matrix.
    """

    vectors: tuple[np.ndarray, ...]
    eigenvalues: tuple[tuple[float, ...], ...]
    persistent: tuple[int, ...]
    rejected: tuple[int, ...] = field(default=())

    @property
    def transient(self) -> tuple[int, ...]:
        return tuple(j for j in range(len(self.vectors)) if j not in self.persistent)


def _eigenvalue_of(a: MaxMatrix, v: np.ndarray, tol: float) -> float | None:
    av = max_apply(a, v)
    support = v > 0
    lam = float((av[support] / v[support]).max())
    return lam if allclose(av, lam * v, tol) else None


def common_eigenbasis(
    mats: Sequence[MaxMatrix], candidates: Sequence[Sequence[float]], tol: float = STRUCT_TOL
) -> CommonEigenbasis:
    mats = [MaxMatrix.coerce(m) for m in mats]
    if not candidates:
        raise PreconditionError("need at least one candidate vector")
    vecs, lams, rejected = [], [], []
    for k, cand in enumerate(candidates):
        v = np.asarray(cand, dtype=float)
        if v.shape != (mats[0].n,) or np.any(v < 0) or not np.any(v > 0):
            raise PreconditionError(f"candidate {k} must be nonnegative, nonzero, length n")
        row = [_eigenvalue_of(m, v, tol) for m in mats]
        if any(lam is None for lam in row):
            rejected.append(k)
            continue
        if any(lam > 1 + tol for lam in row):
            raise PreconditionError(f"candidate {k} has eigenvalue {max(row)} > 1")
        vecs.append(v)
        lams.append(row)
    per_matrix = tuple(tuple(lams[j][i] for j in range(len(vecs))) for i in range(len(mats)))
    persistent = tuple(j for j in range(len(vecs)) if all(abs(l - 1.0) <= tol for l in lams[j]))
    return CommonEigenbasis(tuple(vecs), per_matrix, persistent, tuple(rejected))


def lc_limit(
    mats: Sequence[MaxMatrix],
    basis: CommonEigenbasis,
    coeffs: Sequence[float],
    w: Word,
    tol: float = EXACT_TOL,
    max_steps: int = 100_000,
) -> np.ndarray:
    """Limit of ``A_w^k ⊗ x`` for ``x = ⊕ coeffs[j]·v_j``: the persistent part of ``x``."""
    mats = _check_family(mats, w)
    missing = set(range(1, len(mats) + 1)) - set(w.letters)
    if missing:
        raise PreconditionError(f"word must use every letter; missing {sorted(missing)}")
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (len(basis.vectors),) or np.any(coeffs < 0):
        raise PreconditionError("need one nonnegative coefficient per basis vector")
    n = mats[0].n
    x = np.zeros(n)
    xi = np.zeros(n)
    for j, (c, v) in enumerate(zip(coeffs, basis.vectors)):
        x = np.maximum(x, c * v)
        if j in basis.persistent:
            xi = np.maximum(xi, c * v)
    for m in mats:
        if not allclose(max_apply(m, xi), xi, tol):
            raise AssertionError("limit vector is not a common fixed point")

    aw = word_product(mats, w)
    y = x
    for _ in range(max_steps):
        z = max_apply(aw, y)
        if allclose(_clamp(z), _clamp(y), tol):
            y = z
            break
        y = z
    else:
        raise InconclusiveError("word iteration did not converge")
    if not allclose(_clamp(y), xi, tol):
        raise AssertionError("direct iteration disagrees with the persistent combination")
    return xi
