import numpy as np
import pytest

from maxalg import (
    MaxMatrix,
    PreconditionError,
    check_commuting_mu,
    critical_graph,
    dad_scale,
    is_eigenpair,
    max_pow,
    mu,
    mu_bounds,
    principal_eigenvector,
    spectrum,
)
from maxalg.fixtures import COMMUTING_FAMILY, DIAG_4_5, SWAP_HALF, TWO_BLOCK, UPPER_4_5, UPPER_5_4
from maxalg.oracles import brute_critical_edges, brute_mu
from conftest import random_matrix


def _unit(v):
    v = np.asarray(v, float)
    return v / v.max()


class TestMu:
    def test_two_block(self):
        assert mu(TWO_BLOCK) == 1.0

    def test_commuting_family(self):
        assert [mu(a) for a in COMMUTING_FAMILY] == [1.0, 1.0, 1.0]

    def test_acyclic(self):
        assert mu(MaxMatrix([[0, 3, 1], [0, 0, 2], [0, 0, 0]])) == 0.0

    def test_exact_on_integer_circuits(self):
        assert mu(DIAG_4_5) == 5.0
        assert mu(MaxMatrix([[0, 2], [8, 0]])) == 4.0

    def test_matches_circuit_enumeration(self, rng):
        for _ in range(40):
            a = MaxMatrix(rng.uniform(0.01, 1, (5, 5)) * (rng.random((5, 5)) < 0.5))
            assert abs(mu(a) - brute_mu(a)) <= 1e-9


class TestBounds:
    def test_two_block(self):
        # Row maxima are 4, 6 and 0.9.
        assert mu_bounds(TWO_BLOCK) == (0.9, 6.0)

    def test_all_ones_and_zero(self):
        assert mu_bounds(MaxMatrix(np.ones((3, 3)))) == (1.0, 1.0)
        assert mu_bounds(MaxMatrix.zeros(3)) == (0.0, 0.0)

    def test_bracket_mu(self, rng):
        for _ in range(50):
            a = random_matrix(rng, int(rng.integers(1, 7)))
            lo, hi = mu_bounds(a)
            assert lo - 1e-9 <= mu(a) <= hi + 1e-9


class TestCriticalGraph:
    def test_two_block(self):
        cg = critical_graph(TWO_BLOCK)
        assert set(cg.critical_edges) == {(0, 1), (1, 0)}
        assert cg.critical_vertices == (0, 1)
        assert cg.critical_matrix.allclose([[0, 1, 0], [1, 0, 0], [0, 0, 0]], 0)

    def test_swap_half(self):
        assert set(critical_graph(SWAP_HALF).critical_edges) == {(0, 1), (1, 0)}

    def test_identity(self):
        cg = critical_graph(MaxMatrix.identity(3))
        assert set(cg.critical_edges) == {(0, 0), (1, 1), (2, 2)}
        assert cg.critical_matrix.allclose(MaxMatrix.identity(3), 0)

    def test_acyclic_rejected(self):
        with pytest.raises(PreconditionError):
            critical_graph(MaxMatrix([[0, 1], [0, 0]]))

    def test_matches_enumeration(self, rng):
        for _ in range(40):
            a = random_matrix(rng, int(rng.integers(1, 6)))
            if mu(a) == 0:
                continue
            assert set(critical_graph(a).critical_edges) == brute_critical_edges(a)


class TestSpectrum:
    def test_diagonal(self):
        rep = spectrum(DIAG_4_5)
        assert rep.admissible_values == [4.0, 5.0]
        assert np.allclose(_unit(rep.eigenvectors[4.0]), [1, 0])
        assert np.allclose(_unit(rep.eigenvectors[5.0]), [0, 1])

    def test_upper_4_5(self):
        rep = spectrum(UPPER_4_5)
        assert rep.admissible_values == [4.0, 5.0]
        assert np.allclose(_unit(rep.eigenvectors[4.0]), [1, 0])
        for lam, v in rep.eigenvectors.items():
            assert is_eigenpair(UPPER_4_5, lam, v, 1e-9)

    def test_upper_4_5_eigenvector_for_5(self):
        # A⊗(x, 1) = 5(x, 1) forces max(4x, 2) = 5x, so x = 2/5.
        v = spectrum(UPPER_4_5).eigenvectors[5.0]
        assert np.allclose(v / v[1], [0.4, 1.0], atol=1e-12)

    def test_upper_5_4(self):
        rep = spectrum(UPPER_5_4)
        assert rep.admissible_values == [5.0]
        inadmissible = [ev for ev in rep.eigenvalues if not ev.admissible]
        assert [ev.value for ev in inadmissible] == [4.0]

    def test_mu_is_max_class_mu(self, rng):
        for _ in range(30):
            a = random_matrix(rng, int(rng.integers(1, 6)), density=0.35)
            rep = spectrum(a)
            assert abs(rep.mu - max(rep.class_mu)) <= 1e-12
            assert abs(rep.mu - mu(a)) <= 1e-9

    def test_every_eigenvector_verifies(self, rng):
        for _ in range(40):
            a = random_matrix(rng, int(rng.integers(1, 6)), density=0.35)
            rep = spectrum(a)
            for lam, v in rep.eigenvectors.items():
                assert is_eigenpair(a, lam, v, 1e-9)
            assert set(rep.eigenvectors) <= set(rep.admissible_values)
            assert rep.mu in rep.eigenvectors or rep.mu == 0


class TestPrincipalEigenvector:
    def test_swap_half(self):
        assert np.allclose(_unit(principal_eigenvector(SWAP_HALF)), [1, 1])

    def test_all_ones(self):
        assert np.allclose(_unit(principal_eigenvector(MaxMatrix(np.ones((2, 2))))), [1, 1])

    def test_two_block_leading_block(self):
        blk = MaxMatrix([[0.2, 1], [1, 0.5]])
        assert np.allclose(_unit(principal_eigenvector(blk)), [1, 1])

    def test_reducible_rejected(self):
        with pytest.raises(PreconditionError):
            principal_eigenvector(DIAG_4_5)


class TestScaling:
    def test_already_bounded(self):
        blk = MaxMatrix([[0.2, 1], [1, 0.5]])
        d, s = dad_scale(blk, np.ones(2))
        assert np.allclose(d, [1, 1])
        assert s.allclose(blk, 1e-12)

    def test_large_entry(self):
        a = MaxMatrix([[0, 4], [0.25, 0]])
        d, s = dad_scale(a)
        assert s.entries.max() <= 1 + 1e-12
        assert abs(mu(s) - mu(a)) <= 1e-12
        expected = a.entries * d[None, :] / d[:, None]
        assert np.allclose(s.entries, expected, atol=1e-9)

    def test_random_bounded(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 6))
            a = MaxMatrix(rng.uniform(0.1, 3, (n, n)))
            a = MaxMatrix(a.entries / mu(a))
            _, s = dad_scale(a, rng.uniform(0.1, 2, n))
            assert s.entries.max() <= 1.0
            assert abs(mu(s) - 1.0) <= 1e-9

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            dad_scale(DIAG_4_5)
        with pytest.raises(PreconditionError):
            dad_scale(MaxMatrix([[2.0]]))
        with pytest.raises(PreconditionError):
            dad_scale(SWAP_HALF, np.zeros(2))


class TestCommutingPairs:
    def test_identity(self):
        rep = check_commuting_mu(MaxMatrix.identity(2), MaxMatrix.identity(2))
        assert (rep.mu_product, rep.mu_a_times_mu_b, rep.mu_sum, rep.max_mu) == (1, 1, 1, 1)

    def test_family_pair(self):
        rep = check_commuting_mu(COMMUTING_FAMILY[0], COMMUTING_FAMILY[1])
        assert rep.mu_product <= 1 + 1e-12
        assert rep.product_ok() and rep.sum_ok()

    def test_power_pair(self):
        a = MaxMatrix([[0, 2], [0.5, 0]])
        b = max_pow(a, 2)
        rep = check_commuting_mu(a, b)
        assert rep.mu_product == pytest.approx(mu(max_pow(a, 3)))
        assert rep.mu_a_times_mu_b == pytest.approx(mu(a) * mu(b))
        assert rep.mu_sum == pytest.approx(mu(MaxMatrix(np.maximum(a.entries, b.entries))))
        assert rep.product_equal() and rep.sum_equal()

    def test_non_commuting_rejected(self):
        with pytest.raises(PreconditionError, match="do not commute"):
            check_commuting_mu(UPPER_4_5, UPPER_5_4)
