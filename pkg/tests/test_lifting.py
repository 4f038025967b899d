import itertools
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from hyperturan.hypergraph import Hypergraph, HypergraphError, contains_any, path_graph, single_edge
from hyperturan.lifting import (
    LiftedFamilySpec, ListFamily, SearchBudgetError, build_sunflower, common_intersection, exact_ex,
    is_sunflower, lift_member, lifted_freeness_check, verify_lifting_identity, wrong_form_witness,
)

from oracles import brute_ex, brute_wrong_form

P3 = path_graph(3)
TWO_EDGES = Hypergraph(2, 4, ((0, 1), (2, 3)))


def all_graphs(k, n):
    cand = list(itertools.combinations(range(n), k))
    for mask in range(1 << len(cand)):
        yield Hypergraph(k, n, tuple(c for i, c in enumerate(cand) if mask >> i & 1))


def test_lift_adds_apex_to_every_edge():
    L = lift_member(P3, 3)
    assert L.k == 3 and L.n == 5
    assert L.edges == ((0, 1, 4), (1, 2, 4), (2, 3, 4))
    assert lift_member(P3, 4).edges[0] == (0, 1, 4, 5)
    with pytest.raises(HypergraphError):
        lift_member(P3, 2)


def test_spec_validation():
    with pytest.raises(HypergraphError):
        LiftedFamilySpec((P3,), 2, 2)
    with pytest.raises(HypergraphError):
        LiftedFamilySpec((path_graph(2),), 3, 2)
    with pytest.raises(HypergraphError):
        LiftedFamilySpec((single_edge(3),), 4, 2)
    assert LiftedFamilySpec([P3], 3, 2).lifted()[0] == lift_member(P3, 3)


def test_wrong_form_examples():
    # three edges through a common vertex are fine for k=3, l=2
    assert wrong_form_witness([(0, 1, 2), (0, 3, 4), (0, 5, 6)], 3, 2) is None
    w = wrong_form_witness([(0, 1, 2), (0, 3, 4), (1, 3, 5)], 3, 2)
    assert w is not None and len(common_intersection(w)) < 1
    assert wrong_form_witness([(0, 1, 2), (3, 4, 5)], 3, 2) is not None


@st.composite
def small_edge_sets(draw):
    k = draw(st.integers(3, 4))
    l = draw(st.integers(2, k - 1))
    n = draw(st.integers(k, 7))
    cand = list(itertools.combinations(range(n), k))
    edges = draw(st.lists(st.sampled_from(cand), unique=True, max_size=8))
    return edges, k, l


@given(small_edge_sets())
def test_wrong_form_search_matches_brute_force(case):
    edges, k, l = case
    w = wrong_form_witness(edges, k, l)
    assert (w is not None) == brute_wrong_form(edges, k, l)
    if w is not None:
        assert len(w) <= l + 2
        assert len(common_intersection(w)) < k - l
        assert {tuple(sorted(e)) for e in w} <= {tuple(sorted(e)) for e in edges}


def test_lifted_freeness_round_trip_for_paths():
    spec = LiftedFamilySpec((P3,), 3, 2)
    apex = 5
    for n in range(2, 6):
        for G in all_graphs(2, n):
            lifted = Hypergraph(3, apex + 1, tuple(e + (apex,) for e in G.edges))
            assert lifted_freeness_check(lifted, spec) == (not contains_any(G, [P3])[0])


def test_lifted_freeness_rejects_wrong_arity():
    with pytest.raises(HypergraphError):
        lifted_freeness_check(P3, LiftedFamilySpec((P3,), 3, 2))


def test_exact_ex_boundaries():
    for k in (2, 3):
        for n in range(k, k + 5):
            assert exact_ex(n, [single_edge(k)]).value == 0
    assert exact_ex(5, [], k=2).value == comb(5, 2)
    assert exact_ex(6, [P3]).value == 6
    with pytest.raises(HypergraphError):
        exact_ex(5, [])
    with pytest.raises(HypergraphError):
        ListFamily([Hypergraph(2, 2)])


def test_exact_ex_path_values():
    assert [exact_ex(n, [P3]).value for n in range(4, 8)] == [3, 4, 6, 6]


@settings(max_examples=15)
@given(st.integers(2, 6), st.sampled_from([P3, path_graph(2), TWO_EDGES]))
def test_exact_ex_matches_brute_force(n, F):
    is_free = lambda G: not contains_any(G, [F])[0]
    r = exact_ex(n, [F], mode="bnb")
    assert r.value == brute_ex(n, 2, is_free)
    W = Hypergraph(2, n, tuple(r.witness))
    assert W.n_edges == r.value and is_free(W)


def test_modes_agree():
    for n in range(3, 8):
        assert exact_ex(n, [P3], mode="exhaustive").value == exact_ex(n, [P3], mode="bnb").value
    with pytest.raises(HypergraphError):
        exact_ex(8, [P3], mode="exhaustive")
    with pytest.raises(ValueError):
        exact_ex(5, [P3], mode="fast")


def test_monotone_in_n_and_family():
    vals = [exact_ex(n, [P3]).value for n in range(3, 8)]
    assert vals == sorted(vals)
    for n in range(3, 7):
        assert exact_ex(n, [P3, path_graph(2)]).value <= exact_ex(n, [P3]).value


def test_budget_error_brackets_the_answer():
    with pytest.raises(SearchBudgetError) as info:
        exact_ex(7, [P3], mode="bnb", budget=20)
    err = info.value
    assert err.lower <= 6 <= err.upper


def test_lifted_ex_equals_base():
    r = verify_lifting_identity([P3], 3, 2, [4, 5])
    assert r["pass"]
    assert [row["ex_lifted"] for row in r["rows"]] == [3, 4]


def test_lifted_ex_for_two_disjoint_edges():
    r = verify_lifting_identity([TWO_EDGES], 3, 2, [4, 5])
    assert r["pass"]


def test_lifted_oracle_matches_brute_force():
    spec = LiftedFamilySpec((P3,), 3, 2)
    for n in (4, 5):
        assert exact_ex(n, spec).value == brute_ex(n, 3, lambda G: lifted_freeness_check(G, spec))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_sunflowers(k):
    for t in range(k):
        for n in range(k, k + 7):
            G = build_sunflower(k, t, n)
            assert is_sunflower(G, range(t))
            assert G.n_edges == (n - t) // (k - t)
    with pytest.raises(HypergraphError):
        build_sunflower(k, k, 10)
    with pytest.raises(HypergraphError):
        build_sunflower(k, 0, k - 1)


def test_sunflower_pigeonhole():
    # one more petal than fits would reuse a vertex outside the kernel
    G = build_sunflower(3, 1, 9)
    assert G.n_edges == 4
    extra = Hypergraph(3, 9, G.edges + ((0, 8, 1),))
    assert not is_sunflower(extra, [0])


def test_is_sunflower_negative():
    assert not is_sunflower(Hypergraph(2, 3, ((0, 1), (1, 2))), [0])
