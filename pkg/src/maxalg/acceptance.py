"""Exit criteria for the library, runnable from tests and from the CLI.

Each criterion is a list of named checks; a criterion passes when all of its
checks do. Power limits produced along the way are collected so the
coherence criterion can re-verify every one of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fixtures as fx
from .dynamics import (
    PowerLimit,
    Word,
    check_coherence,
    commuting_word_limit,
    common_eigenbasis,
    elsner_period,
    lc_limit,
    oracle_iterate,
    periodic_point,
    power_limit,
    step_cap,
    boolean_period,
    two_matrix_boolean_limit,
)
from .graphstruct import is_irreducible
from .maxcore import EXACT_TOL, STRUCT_TOL, MaxMatrix, allclose, bool_residual_split, max_add, max_apply, max_mul, max_pow
from .oracles import brute_critical_edges, brute_mu
from .spectral import check_commuting_mu, critical_graph, is_eigenpair, mu, mu_bounds, spectrum

SEED = 20240611


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append((name, bool(ok), detail))
        return bool(ok)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.title}"


def _proportional(v: np.ndarray, target: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    v, target = np.asarray(v, float), np.asarray(target, float)
    k = np.argmax(target)
    if v[k] <= 0:
        return False
    return allclose(v / v[k], target / target[k], tol)


class AcceptanceRun:
    def __init__(self, seed: int = SEED):
        self.rng = np.random.default_rng(seed)
        self.limits: list[tuple[MaxMatrix, PowerLimit]] = []

    def _keep(self, a: MaxMatrix, lim: PowerLimit) -> PowerLimit:
        self.limits.append((a, lim))
        return lim

    def _guard(self, res: CriterionResult, name: str, fn: Callable[[], None]) -> None:
        try:
            fn()
        except Exception as exc:  # a crash is a failed check, not an aborted run
            res.check(name, False, f"{type(exc).__name__}: {exc}")

    # 1 ---------------------------------------------------------------------
    def two_cycle_limit(self) -> CriterionResult:
        res = CriterionResult(1, "2x2 two-cycle power limit and periodic points")

        def body():
            a = fx.SWAP_HALF
            lim = self._keep(a, power_limit(a))
            res.check("q = 2", lim.q == 2, f"q = {lim.q}")
            res.check("first limit is A", lim.limit(1).allclose(fx.SWAP_HALF, EXACT_TOL))
            res.check("second limit is A^2", lim.limit(2).allclose(fx.SWAP_HALF_SQUARED, EXACT_TOL))
            for j in (1, 2):
                px = periodic_point(a, [1, 1], lim, j)
                py = periodic_point(a, [1, 0], lim, j)
                res.check(f"x=(1,1) j={j} has period 1", px.period == 1, f"period {px.period}")
                res.check(f"y=(1,0) j={j} has period 2", py.period == 2, f"period {py.period}")

        self._guard(res, "run", body)
        return res

    # 2 ---------------------------------------------------------------------
    def small_spectra(self) -> CriterionResult:
        res = CriterionResult(2, "2x2 diagonal/triangular spectra")

        def eig_ok(m, rep):
            return all(is_eigenpair(m, lam, v, STRUCT_TOL) for lam, v in rep.eigenvectors.items())

        def body():
            ra = spectrum(fx.DIAG_4_5)
            res.check("diag: eigenvalues {4,5}", ra.admissible_values == [4.0, 5.0], str(ra.admissible_values))
            res.check("diag: (1,0) for 4", _proportional(ra.eigenvectors.get(4.0, np.zeros(2)), [1, 0]))
            res.check("diag: (0,1) for 5", _proportional(ra.eigenvectors.get(5.0, np.zeros(2)), [0, 1]))
            res.check("diag: eigen-equations", eig_ok(fx.DIAG_4_5, ra))

            rb = spectrum(fx.UPPER_4_5)
            res.check("upper45: eigenvalues {4,5}", rb.admissible_values == [4.0, 5.0], str(rb.admissible_values))
            res.check("upper45: eigen-equations", eig_ok(fx.UPPER_4_5, rb))
            v5 = rb.eigenvectors.get(5.0, np.zeros(2))
            res.check(
                "upper45: eigenvector for 5 proportional to (8,5)",
                _proportional(v5, [8, 5]),
                f"got {v5.tolist()}; A⊗(8,5) = {max_apply(fx.UPPER_4_5, [8, 5]).tolist()} vs 5·(8,5) = [40.0, 25.0]",
            )

            rc = spectrum(fx.UPPER_5_4)
            res.check("upper54: only eigenvalue 5", rc.admissible_values == [5.0], str(rc.admissible_values))
            res.check("upper54: eigen-equations", eig_ok(fx.UPPER_5_4, rc))

        self._guard(res, "run", body)
        return res

    # 3 ---------------------------------------------------------------------
    def two_block_limit(self) -> CriterionResult:
        res = CriterionResult(3, "reducible 3x3: mu, critical edges, limits, periodic points")

        def body():
            a = fx.TWO_BLOCK
            res.check("mu = 1", abs(mu(a) - 1.0) <= EXACT_TOL, f"mu = {mu(a)}")
            edges = set(critical_graph(a).critical_edges)
            res.check("critical edges {(1,2),(2,1)}", edges == {(0, 1), (1, 0)}, str(sorted(edges)))
            lim = self._keep(a, power_limit(a))
            res.check("q = 2", lim.q == 2, f"q = {lim.q}")
            res.check("odd limit", lim.limit(1).allclose(fx.TWO_BLOCK_ODD_LIMIT, EXACT_TOL))
            res.check("even limit", lim.limit(2).allclose(fx.TWO_BLOCK_EVEN_LIMIT, EXACT_TOL))
            ok = True
            for _ in range(10):
                x1, x2, x3 = self.rng.uniform(0, 10, 3)
                odd = [max(0.5 * x1, x2, 5.4 * x3), max(x1, 0.5 * x2, 6 * x3), 0.0]
                even = [max(x1, 0.5 * x2, 6 * x3), max(0.5 * x1, x2, 5.4 * x3), 0.0]
                ok &= allclose(periodic_point(a, [x1, x2, x3], lim, 1).vector, odd, EXACT_TOL)
                ok &= allclose(periodic_point(a, [x1, x2, x3], lim, 2).vector, even, EXACT_TOL)
            res.check("periodic points match formula on 10 random x", ok)

        self._guard(res, "run", body)
        return res

    # 4 ---------------------------------------------------------------------
    def commuting_family(self) -> CriterionResult:
        res = CriterionResult(4, "commuting 5x5 family: periods and word limits")

        def matches_oracle(aw: MaxMatrix, lim: PowerLimit) -> bool:
            tr = oracle_iterate(aw, step_cap(aw.n, lim.q))
            if tr.status != "periodic":
                return False
            base = tr.t0 + lim.q
            return all(
                allclose(tr.power(t), lim.limit(t).entries, EXACT_TOL)
                for t in range(base, base + 2 * lim.q)
            )

        def body():
            mats = fx.COMMUTING_FAMILY
            qs = []
            for m in mats:
                lim = self._keep(m, power_limit(m))
                qs.append(lim.q)
                res.check(f"per-matrix limit vs oracle (q={lim.q})", matches_oracle(m, lim))
            res.check("periods (3,3,2)", tuple(qs) == (3, 3, 2), str(qs))

            a1, a2, a3 = mats
            w12 = Word((1, 2))
            lim = commuting_word_limit(mats, w12)
            aw = max_mul(a1, a2)
            self._keep(aw, lim)
            res.check("(i) q_w = 3", lim.q == 3, f"q = {lim.q}")
            res.check("(i) cycle period 1", lim.cycle_period == 1)
            res.check("(i) limit = A1⊗A2", all(lim.limit(j).allclose(aw, EXACT_TOL) for j in range(1, 4)))
            res.check("(i) vs oracle", matches_oracle(aw, lim))

            lim = commuting_word_limit(mats, Word((2, 3)))
            aw = max_mul(a2, a3)
            self._keep(aw, lim)
            cands = [max_mul(max_pow(a2, t), max_pow(a3, t)) for t in (1, 2, 3)]
            res.check("(ii) q_w = 6", lim.q == 6, f"q = {lim.q}")
            res.check("(ii) cycle period 3", lim.cycle_period == 3, f"{lim.cycle_period}")
            res.check(
                "(ii) cycle = {A2^t⊗A3^t : t=1,2,3}",
                all(any(lim.limit(j).allclose(c, EXACT_TOL) for c in cands) for j in range(1, 7))
                and all(any(lim.limit(j).allclose(c, EXACT_TOL) for j in range(1, 7)) for c in cands),
            )
            res.check("(ii) vs oracle", matches_oracle(aw, lim))

            tm = two_matrix_boolean_limit(a1, a3, Word((1, 2)))
            aw = max_mul(a1, a3)
            self._keep(aw, tm.limit)
            res.check("(iii) q_w = 6", tm.q == 6, f"q = {tm.q}")
            res.check("(iii) cycle period 6", tm.limit.cycle_period == 6)
            cands = [max_mul(max_pow(a1, t), max_pow(a3, t)) for t in range(tm.t0, tm.t0 + 6)]
            res.check(
                f"(iii) cycle = {{A1^t⊗A3^t : t={tm.t0}..{tm.t0 + 5}}}",
                all(any(tm.limit.limit(j).allclose(c, EXACT_TOL) for c in cands) for j in range(1, 7))
                and all(any(tm.limit.limit(j).allclose(c, EXACT_TOL) for j in range(1, 7)) for c in cands),
            )
            res.check("(iii) vs oracle", matches_oracle(aw, tm.limit))

        self._guard(res, "run", body)
        return res

    # 5 ---------------------------------------------------------------------
    def shared_eigenvectors(self) -> CriterionResult:
        res = CriterionResult(5, "non-commuting pair: common eigenvectors and LC limit")

        def body():
            mats = fx.SHARED_EIGVEC_PAIR
            cb = common_eigenbasis(mats, [fx.SHARED_U, fx.SHARED_V])
            res.check("both candidates accepted", len(cb.vectors) == 2 and not cb.rejected)
            res.check("u persistent, v transient", cb.persistent == (0,) and cb.transient == (1,))
            res.check("v: eigenvalue 0.9 for A1", abs(cb.eigenvalues[0][1] - 0.9) <= STRUCT_TOL)
            res.check("v: eigenvalue 1 for A2", abs(cb.eigenvalues[1][1] - 1.0) <= STRUCT_TOL)
            ok = True
            words = [Word((1, 2)), Word((2, 1, 1)), Word((1, 2, 2, 1, 2))]
            for k in range(10):
                alpha, beta = self.rng.uniform(0, 5, 2)
                xi = lc_limit(mats, cb, [alpha, beta], words[k % len(words)])
                ok &= allclose(xi, alpha * fx.SHARED_U, EXACT_TOL)
                for m in mats:
                    ok &= allclose(max_apply(m, xi), xi, EXACT_TOL)
            res.check("limit = αu and common fixed point, 10 random (α,β)", ok)

        self._guard(res, "run", body)
        return res

    # 6 ---------------------------------------------------------------------
    def mu_bounds_suite(self, count: int = 200) -> CriterionResult:
        res = CriterionResult(6, f"mu within row-max bounds on {count} random matrices")

        def body():
            bad = 0
            for _ in range(count):
                a = self._random(6, 2.0)
                lo, hi = mu_bounds(a)
                m = mu(a)
                bad += not (lo - 1e-9 <= m <= hi + 1e-9)
            res.check("all within bounds", bad == 0, f"{bad} violations")

        self._guard(res, "run", body)
        return res

    # 7 ---------------------------------------------------------------------
    def oracle_equivalence_suite(self, count: int = 100) -> CriterionResult:
        res = CriterionResult(7, f"period/transient vs oracle on {count} random irreducible mu=1 matrices")

        def body():
            mism_period = mism_pg = 0
            for _ in range(count):
                a = self._random_unit_irreducible(5)
                rep = elsner_period(a)
                tr = oracle_iterate(a, step_cap(a.n, rep.q))
                mism_period += not (tr.status == "periodic" and (tr.q, tr.t0) == (rep.q, rep.t0))
                lim = self._keep(a, power_limit(a))
                mism_pg += boolean_period(bool_residual_split(a).boolean_part).q != lim.q
            res.check("elsner_period (q,t0) = oracle cycle", mism_period == 0, f"{mism_period} mismatches")
            res.check("boolean period of unit part = asymptotic period", mism_pg == 0, f"{mism_pg} mismatches")

        self._guard(res, "run", body)
        return res

    # 8 ---------------------------------------------------------------------
    def exact_mu_suite(self, count: int = 100) -> CriterionResult:
        res = CriterionResult(8, f"mu vs exhaustive circuit enumeration on {count} random matrices")

        def body():
            bad = 0
            for _ in range(count):
                a = self._random(6, 2.0)
                bad += abs(mu(a) - brute_mu(a)) > 1e-9 * max(1.0, brute_mu(a))
            res.check("all agree within 1e-9", bad == 0, f"{bad} mismatches")

        self._guard(res, "run", body)
        return res

    # 9 ---------------------------------------------------------------------
    def coherence_suite(self) -> CriterionResult:
        res = CriterionResult(9, "coherence of every limit produced above")

        def body():
            bad = sum(not check_coherence(a, lim, EXACT_TOL) for a, lim in self.limits)
            res.check(f"{len(self.limits)} limits coherent", bad == 0 and len(self.limits) > 0, f"{bad} incoherent")

        self._guard(res, "run", body)
        return res

    # 10 --------------------------------------------------------------------
    def commuting_pairs_suite(self, count: int = 50) -> CriterionResult:
        res = CriterionResult(10, f"commuting-pair mu inequalities on {count} random polynomial pairs")

        def body():
            bad_ineq = bad_eq = n_irred = 0
            for _ in range(count):
                a, b = self._random_commuting_pair(5)
                rep = check_commuting_mu(a, b)
                bad_ineq += not (rep.product_ok() and rep.sum_ok())
                if rep.both_irreducible:
                    n_irred += 1
                    bad_eq += not (rep.product_equal() and rep.sum_equal())
            res.check("inequalities hold", bad_ineq == 0, f"{bad_ineq} violations")
            res.check(f"equality for {n_irred} irreducible pairs", bad_eq == 0, f"{bad_eq} violations")

        self._guard(res, "run", body)
        return res

    # generators --------------------------------------------------------------
    def _random(self, nmax: int, top: float, density: float = 0.6) -> MaxMatrix:
        n = int(self.rng.integers(1, nmax + 1))
        e = self.rng.uniform(0, top, (n, n)) * (self.rng.random((n, n)) < density)
        return MaxMatrix(e)

    def _random_unit_irreducible(self, nmax: int) -> MaxMatrix:
        while True:
            n = int(self.rng.integers(1, nmax + 1))
            e = self.rng.choice([0.0, 0.5, 1.0], size=(n, n), p=[0.45, 0.3, 0.25])
            a = MaxMatrix(e)
            if is_irreducible(a) and abs(mu(a) - 1.0) <= STRUCT_TOL:
                return a

    def _random_commuting_pair(self, nmax: int) -> tuple[MaxMatrix, MaxMatrix]:
        m = self._random(nmax, 2.0)

        def poly() -> MaxMatrix:
            coeffs = self.rng.uniform(0, 1.5, 4) * (self.rng.random(4) < 0.7)
            if not coeffs.any():
                coeffs[1] = 1.0
            acc = MaxMatrix.zeros(m.n)
            for k, c in enumerate(coeffs):
                if c > 0:
                    acc = max_add(acc, MaxMatrix(c * max_pow(m, k).entries))
            return acc

        return poly(), poly()

    def run_all(self) -> list[CriterionResult]:
        return [
            self.two_cycle_limit(),
            self.small_spectra(),
            self.two_block_limit(),
            self.commuting_family(),
            self.shared_eigenvectors(),
            self.mu_bounds_suite(),
            self.oracle_equivalence_suite(),
            self.exact_mu_suite(),
            self.coherence_suite(),
            self.commuting_pairs_suite(),
        ]


def run_all(seed: int = SEED) -> list[CriterionResult]:
    return AcceptanceRun(seed).run_all()
