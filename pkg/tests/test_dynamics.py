import numpy as np
import pytest

from maxalg import (
    InconclusiveError,
    IterationCancelled,
    MaxMatrix,
    PreconditionError,
    Word,
    boolean_period,
    check_coherence,
    common_eigenbasis,
    commuting_word_limit,
    elsner_period,
    is_irreducible,
    lc_limit,
    max_apply,
    max_mul,
    max_pow,
    mu,
    oracle_iterate,
    periodic_point,
    power_limit,
    step_cap,
    two_matrix_boolean_limit,
    word_product,
)
from maxalg.fixtures import (
    COMMUTING_FAMILY,
    SHARED_EIGVEC_PAIR,
    SHARED_U,
    SHARED_V,
    SWAP_HALF,
    SWAP_HALF_SQUARED,
    TWO_BLOCK,
    TWO_BLOCK_EVEN_LIMIT,
    TWO_BLOCK_ODD_LIMIT,
)

SWAP = MaxMatrix([[0, 1], [1, 0]])
A1, A2, A3 = COMMUTING_FAMILY


class TestBooleanPeriod:
    def test_swap(self):
        assert boolean_period(SWAP).q == 2

    def test_identity(self):
        rep = boolean_period(MaxMatrix.identity(3))
        assert (rep.q, rep.t0) == (1, 0)

    def test_family_unit_parts(self):
        qs = [boolean_period(MaxMatrix((a.entries == 1).astype(float))).q for a in COMMUTING_FAMILY]
        assert qs == [3, 3, 2]

    def test_components_combine_by_lcm(self):
        b = np.zeros((5, 5))
        b[0, 1] = b[1, 0] = 1
        b[2, 3] = b[3, 4] = b[4, 2] = 1
        assert boolean_period(MaxMatrix(b)).q == 6

    def test_periodicity_window(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 6))
            b = MaxMatrix((rng.random((n, n)) < 0.35).astype(float))
            rep = boolean_period(b)
            for t in range(rep.t0, rep.t0 + 2 * rep.q + 1):
                assert np.array_equal(max_pow(b, t + rep.q).entries, max_pow(b, t).entries)
            for d in range(1, rep.q):
                if rep.q % d == 0:
                    assert not np.array_equal(
                        max_pow(b, rep.t0 + d).entries, max_pow(b, rep.t0).entries
                    ) or rep.q == 1

    def test_rejects_non_boolean(self):
        with pytest.raises(PreconditionError):
            boolean_period(SWAP_HALF)


class TestElsnerPeriod:
    def test_swap_half(self):
        rep = elsner_period(SWAP_HALF)
        assert (rep.q, rep.t0) == (2, 1)

    def test_all_ones(self):
        assert elsner_period(MaxMatrix(np.ones((2, 2)))).q == 1

    def test_leading_block(self):
        blk = MaxMatrix([[0.2, 1], [1, 0.5]])
        rep = elsner_period(blk)
        assert (rep.q, rep.t0) == (2, 2)
        assert max_pow(blk, 2).allclose(SWAP_HALF_SQUARED, 1e-12)
        assert max_pow(blk, 3).allclose(SWAP_HALF, 1e-12)

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            elsner_period(TWO_BLOCK)
        with pytest.raises(PreconditionError):
            elsner_period(MaxMatrix([[2.0]]))

    def test_step_cap_reached(self):
        with pytest.raises(InconclusiveError):
            elsner_period(MaxMatrix([[0.2, 1], [1, 0.5]]), max_steps=1)

    def test_cancellation(self):
        with pytest.raises(IterationCancelled):
            elsner_period(SWAP_HALF, progress=lambda step: False)


class TestPowerLimit:
    def test_swap_half(self):
        lim = power_limit(SWAP_HALF)
        assert lim.q == 2
        assert lim.limit(1).allclose(SWAP_HALF, 1e-12)
        assert lim.limit(2).allclose(SWAP_HALF_SQUARED, 1e-12)

    def test_two_block(self):
        lim = power_limit(TWO_BLOCK)
        assert lim.q == 2
        assert lim.limit(1).allclose(TWO_BLOCK_ODD_LIMIT, 1e-12)
        assert lim.limit(2).allclose(TWO_BLOCK_EVEN_LIMIT, 1e-12)
        assert check_coherence(TWO_BLOCK, lim)

    def test_nilpotent(self):
        lim = power_limit(MaxMatrix([[0, 2, 3], [0, 0, 4], [0, 0, 0]]))
        assert lim.q == 1
        assert lim.limit(1).allclose(MaxMatrix.zeros(3), 0)

    def test_family_periods(self):
        assert [power_limit(a).q for a in COMMUTING_FAMILY] == [3, 3, 2]

    def test_limit_index_wraps(self):
        lim = power_limit(SWAP_HALF)
        assert lim.limit(3) is lim.limit(1)
        assert lim.limit(0) is lim.limit(2)

    def test_random_coherence_and_oracle(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 5))
            a = MaxMatrix(rng.choice([0, 0.3, 0.5, 1.0], size=(n, n), p=[0.4, 0.2, 0.2, 0.2]))
            if mu(a) > 1:
                continue
            lim = power_limit(a)
            assert check_coherence(a, lim)
            tr = oracle_iterate(a, 2000, zero_tol=1e-9)
            if tr.status == "periodic":
                for t in range(tr.t0 + lim.q, tr.t0 + 3 * lim.q):
                    assert np.allclose(tr.power(t), lim.limit(t).entries, atol=1e-9)


class TestPeriodicPoint:
    def test_swap_half(self):
        lim = power_limit(SWAP_HALF)
        assert periodic_point(SWAP_HALF, [1, 1], lim, 1).period == 1
        p = periodic_point(SWAP_HALF, [1, 0], lim, 1)
        assert p.period == 2
        assert np.allclose(p.vector, [0.5, 1])

    def test_two_block_formula(self, rng):
        lim = power_limit(TWO_BLOCK)
        for _ in range(5):
            x1, x2, x3 = rng.uniform(0, 3, 3)
            p = periodic_point(TWO_BLOCK, [x1, x2, x3], lim, 1)
            assert np.allclose(p.vector, [max(0.5 * x1, x2, 5.4 * x3), max(x1, 0.5 * x2, 6 * x3), 0])

    def test_bad_index(self):
        with pytest.raises(PreconditionError):
            periodic_point(SWAP_HALF, [1, 1], power_limit(SWAP_HALF), 3)


class TestWords:
    def test_parse_and_counts(self):
        w = Word.parse("1,2,1")
        assert w.letters == (1, 2, 1)
        assert w.counts(3) == [2, 1, 0]
        assert sum(w.counts()) == len(w)

    def test_bad_words(self):
        with pytest.raises(PreconditionError):
            Word.parse("1,x")
        with pytest.raises(PreconditionError):
            Word(())
        with pytest.raises(PreconditionError):
            Word((0,))

    def test_single_letter(self):
        assert word_product(COMMUTING_FAMILY, Word((2,))).allclose(A2, 0)

    def test_first_letter_applied_first(self):
        assert word_product([A1, A2], Word((1, 2))).allclose(max_mul(A2, A1), 0)
        m1, m2 = MaxMatrix([[1, 2], [0, 1]]), MaxMatrix([[1, 0], [3, 1]])
        assert word_product([m1, m2], Word((1, 2))).allclose(max_mul(m2, m1), 0)

    def test_commuting_counts_form(self):
        w = Word((3, 1, 2, 1, 3, 3))
        expected = max_mul(max_mul(max_pow(A1, 2), A2), max_pow(A3, 3))
        assert word_product(COMMUTING_FAMILY, w).allclose(expected, 1e-12)

    def test_letter_out_of_range(self):
        with pytest.raises(PreconditionError):
            word_product([A1], Word((2,)))


class TestCommutingWordLimit:
    def test_case_one_two(self):
        lim = commuting_word_limit(COMMUTING_FAMILY, Word((1, 2)))
        assert lim.q == 3 and lim.cycle_period == 1
        assert lim.limit(1).allclose(max_mul(A1, A2), 1e-12)

    def test_case_two_three(self):
        lim = commuting_word_limit(COMMUTING_FAMILY, Word((2, 3)))
        assert lim.q == 6 and lim.cycle_period == 3
        cycle = [max_mul(max_pow(A2, t), max_pow(A3, t)) for t in (1, 2, 3)]
        for j in range(1, 7):
            assert any(lim.limit(j).allclose(c, 1e-12) for c in cycle)

    def test_single_letter_matches_power_limit(self):
        lim = commuting_word_limit(COMMUTING_FAMILY, Word((3,)))
        direct = power_limit(A3)
        assert lim.q == direct.q
        assert all(lim.limit(j).allclose(direct.limit(j), 1e-12) for j in range(1, lim.q + 1))

    def test_non_commuting_rejected(self):
        with pytest.raises(PreconditionError, match="matrices 1 and 2"):
            commuting_word_limit(SHARED_EIGVEC_PAIR, Word((1, 2)))


class TestTwoMatrixLimit:
    def test_identities(self):
        i2 = MaxMatrix.identity(2)
        tm = two_matrix_boolean_limit(i2, i2, Word((1, 2)))
        assert (tm.t0, tm.q) == (0, 1)
        assert tm.limit.limit(1).allclose(i2, 0)

    def test_swap_and_square(self):
        tm = two_matrix_boolean_limit(SWAP, max_pow(SWAP, 2), Word((1, 2)))
        assert tm.q == 2
        for j in (1, 2):
            assert any(tm.limit.limit(j).allclose(max_pow(SWAP, t), 0) for t in (1, 2))

    def test_family_one_three(self):
        tm = two_matrix_boolean_limit(A1, A3, Word((1, 2)))
        assert tm.q == 6 and tm.limit.cycle_period == 6
        assert tm.t0 == 2
        assert sorted(tm.membership) == list(range(tm.t0, tm.t0 + 6))
        for j, t in enumerate(tm.membership, start=1):
            assert tm.limit.limit(j).allclose(max_mul(max_pow(A1, t), max_pow(A3, t)), 1e-12)

    def test_interior_eigenvalue_rejected(self):
        with pytest.raises(PreconditionError, match="strictly inside"):
            two_matrix_boolean_limit(MaxMatrix([[0.5, 0], [0, 1]]), MaxMatrix.identity(2), Word((1, 2)))


class TestCommonEigenbasis:
    def test_shared_pair(self):
        cb = common_eigenbasis(SHARED_EIGVEC_PAIR, [SHARED_U, SHARED_V, [0, 0, 1, 0, 0]])
        assert cb.rejected == (2,)
        assert cb.persistent == (0,) and cb.transient == (1,)
        assert cb.eigenvalues[0][0] == pytest.approx(1.0)
        assert cb.eigenvalues[1][0] == pytest.approx(1.0)
        assert cb.eigenvalues[0][1] == pytest.approx(0.9)
        assert cb.eigenvalues[1][1] == pytest.approx(1.0)

    def test_lc_limit(self):
        cb = common_eigenbasis(SHARED_EIGVEC_PAIR, [SHARED_U, SHARED_V])
        xi = lc_limit(SHARED_EIGVEC_PAIR, cb, [0.7, 2.0], Word((1, 2)))
        assert np.allclose(xi, 0.7 * SHARED_U, rtol=0, atol=1e-12)
        for a in SHARED_EIGVEC_PAIR:
            assert np.allclose(max_apply(a, xi), xi, atol=1e-12)

    def test_lc_limit_trivial_cases(self):
        cb = common_eigenbasis(SHARED_EIGVEC_PAIR, [SHARED_U, SHARED_V])
        assert np.array_equal(lc_limit(SHARED_EIGVEC_PAIR, cb, [0, 0], Word((2, 1))), np.zeros(5))
        assert np.allclose(lc_limit(SHARED_EIGVEC_PAIR, cb, [1, 0], Word((2, 1))), SHARED_U)

    def test_word_must_use_every_letter(self):
        cb = common_eigenbasis(SHARED_EIGVEC_PAIR, [SHARED_U, SHARED_V])
        with pytest.raises(PreconditionError, match="missing"):
            lc_limit(SHARED_EIGVEC_PAIR, cb, [1, 1], Word((1, 1)))


class TestOracle:
    def test_identity(self):
        tr = oracle_iterate(MaxMatrix.identity(3), 5)
        assert (tr.status, tr.t0, tr.q) == ("periodic", 0, 1)

    def test_swap_half(self):
        tr = oracle_iterate(SWAP_HALF, 10)
        assert (tr.status, tr.t0, tr.q) == ("periodic", 1, 2)
        assert np.allclose(tr.power(101), SWAP_HALF.entries)

    def test_decaying(self):
        tr = oracle_iterate(MaxMatrix(0.5 * np.eye(2)), 500)
        assert tr.status == "vanishing" and tr.q is None

    def test_cap_reached(self):
        assert oracle_iterate(MaxMatrix(0.5 * np.eye(2)), 5).status == "inconclusive"

    def test_step_cap_env(self, monkeypatch):
        assert step_cap(3, 2) == 160
        monkeypatch.setenv("MAXALG_MAX_STEPS", "42")
        assert step_cap(3, 2) == 42

    def test_elsner_agrees_on_random_unit_matrices(self, rng):
        seen = 0
        while seen < 30:
            n = int(rng.integers(1, 6))
            a = MaxMatrix(rng.choice([0, 0.5, 1.0], size=(n, n)))
            if not is_irreducible(a) or abs(mu(a) - 1) > 1e-9:
                continue
            seen += 1
            rep = elsner_period(a)
            tr = oracle_iterate(a, step_cap(n, rep.q))
            assert (tr.q, tr.t0) == (rep.q, rep.t0)
