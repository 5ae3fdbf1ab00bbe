import numpy as np
from hypothesis import given, settings, strategies as st

from maxalg import (
    MaxMatrix,
    apply_permutation,
    communication_classes,
    frobenius_form,
    is_block_upper_triangular,
    is_irreducible,
    strongly_connected_components,
    to_digraph,
)
from maxalg.fixtures import DIAG_4_5, SWAP_HALF, TWO_BLOCK
from maxalg.graphstruct import IRREDUCIBLE, NULL_1X1


def _sizes(form):
    return [len(c) for c in form.classes]


def test_digraph_of_zero_matrix():
    g = to_digraph(MaxMatrix.zeros(4))
    assert g.n == 4 and g.edges == ()


def test_digraph_of_two_block():
    g = to_digraph(TWO_BLOCK)
    got = {(e.src, e.dst): e.weight for e in g.edges}
    assert got == {
        (0, 0): 0.2, (1, 1): 0.5, (2, 2): 0.9,
        (0, 1): 1.0, (1, 0): 1.0, (0, 2): 4.0, (1, 2): 6.0,
    }


def test_digraph_of_identity():
    g = to_digraph(MaxMatrix.identity(3))
    assert sorted((e.src, e.dst, e.weight) for e in g.edges) == [(0, 0, 1), (1, 1, 1), (2, 2, 1)]


def test_single_class():
    form = communication_classes(to_digraph(SWAP_HALF))
    assert form.classes == ((0, 1),)
    assert form.block_kind == (IRREDUCIBLE,)


def test_two_block_classes():
    form = frobenius_form(TWO_BLOCK)
    assert form.classes == ((0, 1), (2,))
    assert form.block_kind == (IRREDUCIBLE, IRREDUCIBLE)
    assert form.access[0, 1] and not form.access[1, 0]
    assert apply_permutation(TWO_BLOCK, form).allclose(TWO_BLOCK, 0)


def test_strictly_upper_gives_null_classes():
    a = MaxMatrix([[0, 1, 1], [0, 0, 1], [0, 0, 0]])
    form = frobenius_form(a)
    assert form.block_kind == (NULL_1X1,) * 3
    assert form.order == (0, 1, 2)


def test_irreducibility():
    assert is_irreducible(MaxMatrix([[0, 1], [1, 0]]))
    assert not is_irreducible(DIAG_4_5)
    assert not is_irreducible(MaxMatrix([[0.0]]))
    assert is_irreducible(MaxMatrix([[0.3]]))


def test_lower_triangular_is_reordered():
    a = MaxMatrix([[1, 0, 0], [2, 1, 0], [3, 4, 1]])
    form = frobenius_form(a)
    assert form.order == (2, 1, 0)
    p = apply_permutation(a, form)
    assert is_block_upper_triangular(p, _sizes(form))
    assert not is_block_upper_triangular(a, [1, 1, 1])


def test_deep_chain_does_not_recurse():
    n = 3000
    e = np.zeros((n, n))
    e[np.arange(n - 1), np.arange(1, n)] = 1.0
    e[n - 1, 0] = 1.0
    comps = strongly_connected_components(to_digraph(MaxMatrix(e)))
    assert len(comps) == 1 and len(comps[0]) == n


def _closure(e):
    reach = (e > 0) | np.eye(len(e), dtype=bool)
    for k in range(len(e)):
        reach |= reach[:, [k]] & reach[[k], :]
    return reach


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 7).flatmap(
    lambda n: st.lists(st.sampled_from([0.0, 0.0, 0.5, 1.0, 2.0]), min_size=n * n, max_size=n * n)
))
def test_normal_form_properties(flat):
    n = int(round(len(flat) ** 0.5))
    a = MaxMatrix(np.array(flat).reshape(n, n))
    form = frobenius_form(a)
    assert sorted(form.order) == list(range(n))
    p = apply_permutation(a, form)
    assert is_block_upper_triangular(p, _sizes(form))
    reach = _closure(a.entries)
    for c, members in enumerate(form.classes):
        for u in members:
            for v in members:
                assert reach[u, v] and reach[v, u]
        blk = a.entries[np.ix_(members, members)]
        if form.block_kind[c] == NULL_1X1:
            assert blk.shape == (1, 1) and blk[0, 0] == 0
        else:
            assert is_irreducible(MaxMatrix(blk))
    acc = form.access
    assert np.all(np.diag(acc))
    assert np.array_equal(acc, _closure(acc.astype(float)))
    for i, ci in enumerate(form.classes):
        for j, cj in enumerate(form.classes):
            assert acc[i, j] == reach[ci[0], cj[0]]
