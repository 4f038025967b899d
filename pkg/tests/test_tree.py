import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import naive_power
from hyperturan.hypergraph import Hypergraph, HypergraphError, SizeLimitError
from hyperturan.tree import (
    RootedGraph,
    TreeParamError,
    TreeParams,
    build_tree,
    check_balanced,
    check_build_order,
    check_edge_bound,
    enumerate_power,
    epsilon,
    exact_power,
    minimal_cover,
    proper_colorings,
    relabel_whites,
    root_window,
)


def valid_params():
    return st.integers(2, 4).flatmap(
        lambda k: st.integers(k - 1, k + 3).flatmap(
            lambda a: st.integers(max(a + 1, a - k + 3), a + 6).map(lambda b: (k, a, b))))


def brute_balanced(T):
    b, a = T.graph.n_edges, len(T.non_roots)
    for size in range(1, a + 1):
        for S in itertools.combinations(T.non_roots, size):
            eps = sum(1 for e in T.graph.edges if set(e) & set(S))
            if Fraction(eps, size) < Fraction(b, a):
                return False
    return True


# -- parameters -------------------------------------------------------------

@pytest.mark.parametrize("k,a,b,msg", [
    (1, 1, 2, "k >= 2"), (3, 1, 2, "a >= k-1"), (2, 3, 3, "b > a"),
])
def test_invalid_params_named(k, a, b, msg):
    with pytest.raises(TreeParamError, match=msg.replace("+", r"\+")):
        TreeParams(k, a, b)


def test_scaled_params():
    assert TreeParams.scaled(3, 1, 2) == TreeParams(3, 2, 4)
    assert TreeParams.scaled(2, 1, 2) == TreeParams(2, 1, 2)


# -- construction -----------------------------------------------------------

def test_tree_2_2_3():
    T = build_tree(TreeParams(2, 2, 3))
    r1, r2 = T.roots
    w1, w2 = T.whites
    assert set(T.graph.edges) == {tuple(sorted(e)) for e in [(w1, w2), (r1, w1), (r2, w2)]}
    assert len(T.roots) == 2


def test_tree_3_3_5_windows():
    p = TreeParams(3, 3, 5)
    assert [root_window(p, i) for i in range(1, 5)] == [1, 1, 2, 2]
    T = build_tree(p)
    w = T.whites
    assert tuple(sorted(w)) in T.graph.edges
    greens = [e for e in T.graph.edges if set(e) & set(T.roots)]
    assert len(greens) == 4


def test_tree_2_1_2_shares_single_white():
    T = build_tree(TreeParams(2, 1, 2))
    (w,) = T.whites
    assert set(T.graph.edges) == {(0, w), (1, w)}


@given(valid_params())
def test_shape_and_order(params):
    T = build_tree(TreeParams(*params))
    k, a, b = params
    assert T.graph.n_edges == b and T.graph.n == b + k - 1
    assert len(T.roots) == b - a + k - 1
    assert check_build_order(T)
    red = [e for e in T.graph.edges if not set(e) & set(T.roots)]
    assert len(red) == a - k + 1
    pos = {w: i for i, w in enumerate(T.whites)}
    for e in T.graph.edges:
        ws = sorted(pos[v] for v in e if v in pos)
        assert ws == list(range(ws[0], ws[0] + len(ws)))


def test_sidecar():
    T = build_tree(TreeParams(2, 2, 3))
    side = T.sidecar()
    assert side["roots"] == [0, 1] and side["whites"] == [2, 3]
    assert side["build_order"][0]["attach"] is None
    assert all(len(x["attach"]) == 1 for x in side["build_order"][1:])


def test_corrupt_build_order_detected():
    T = build_tree(TreeParams(2, 2, 3))
    bad = type(T)(T.graph, T.roots, T.whites, T.build_order[1:] + T.build_order[:1], T.params)
    assert not check_build_order(bad)


# -- epsilon and balance ----------------------------------------------------

def test_epsilon():
    T = build_tree(TreeParams(2, 2, 3))
    assert epsilon(T, []) == 0
    assert epsilon(T, T.whites) == 3
    assert epsilon(T, [T.whites[0]]) == 2
    with pytest.raises(HypergraphError):
        epsilon(T, [T.roots[0]])


def test_balanced_2_2_3():
    ok, S, ratio = check_balanced(build_tree(TreeParams(2, 2, 3)))
    assert ok and ratio == Fraction(3, 2) and set(S) == {2, 3}


def test_unbalanced_detected():
    # white 2 lies in one edge while b/a = 3/2
    G = Hypergraph(2, 4, ((0, 2), (0, 3), (1, 3)))
    ok, S, ratio = check_balanced(RootedGraph(G, (0, 1)))
    assert not ok and S == (2,) and ratio == 1


def test_balance_limit():
    T = build_tree(TreeParams(2, 3, 5))
    with pytest.raises(SizeLimitError):
        check_balanced(T, limit=2)


@given(valid_params())
def test_balanced_matches_brute_force(params):
    T = build_tree(TreeParams(*params))
    assert check_balanced(T)[0] is True
    assert brute_balanced(T)


# -- powers -----------------------------------------------------------------

def test_power_s1_is_tree():
    T = build_tree(TreeParams(2, 2, 3))
    (H,) = enumerate_power(T, 1)
    assert H.graph == T.graph and H.tag == 1


def test_power_2_1_2_s2():
    T = build_tree(TreeParams(2, 1, 2))
    members = enumerate_power(T, 2)
    assert sorted(H.graph.n_edges for H in members) == [2, 4]
    assert len(exact_power(T, 2)) == 1
    glued = next(H for H in members if H.graph.n_edges == 2)
    assert glued.tag == 1
    assert check_edge_bound(glued, T.params)


@pytest.mark.parametrize("params,counts", [
    ((2, 1, 2), [1, 2, 3]),
    ((2, 2, 3), [1, 6, 23]),
    ((3, 2, 4), [1, 3, 8]),
])
def test_power_counts_match_naive_gluing(params, counts):
    T = build_tree(TreeParams(*params))
    for s, expected in enumerate(counts, start=1):
        members = enumerate_power(T, s)
        assert len(members) == expected
        assert len(naive_power(T, s)) == expected


@pytest.mark.parametrize("params", [(2, 1, 2), (2, 2, 3), (3, 2, 4)])
def test_power_members_valid(params):
    p = TreeParams(*params)
    T = build_tree(p)
    for s in (1, 2, 3):
        for H in enumerate_power(T, s):
            assert H.graph.n_edges <= s * p.b
            assert H.graph.n <= s * p.a + p.n_roots
            assert check_edge_bound(H, p)
            assert minimal_cover(T, H) == H.tag
            assert H.tag <= s


def test_power_dedupe_flag():
    T = build_tree(TreeParams(2, 2, 3))
    raw = enumerate_power(T, 2, dedupe=False)
    ded = enumerate_power(T, 2)
    assert len(raw) >= len(ded)
    assert {H.canonical() for H in raw} == {H.canonical() for H in ded}
    assert len({H.canonical() for H in ded}) == len(ded)


@pytest.mark.parametrize("seed", range(4))
def test_power_order_independent(seed):
    T = build_tree(TreeParams(2, 2, 3))
    T2 = relabel_whites(T, random.Random(seed))
    for s in (2, 3):
        assert sorted(H.canonical() for H in enumerate_power(T, s)) == \
            sorted(H.canonical() for H in enumerate_power(T2, s))


def test_power_limit():
    T = build_tree(TreeParams(2, 5, 6))
    with pytest.raises(SizeLimitError):
        enumerate_power(T, 3)


def test_exact_power_not_isomorphic_to_lower():
    T = build_tree(TreeParams(2, 2, 3))
    lower = {H.canonical(8) for s in (1, 2) for H in enumerate_power(T, s, canon_limit=8)}
    for H in exact_power(T, 3):
        assert H.canonical(8) not in lower
        assert minimal_cover(T, H) == 3


# -- colourings -------------------------------------------------------------

def test_proper_colorings_of_tree():
    T = build_tree(TreeParams(2, 1, 2))
    cols = proper_colorings(T)
    # both roots share a colour opposite the white
    assert sorted(cols) == [(0, 0, 1), (1, 1, 0)]
    for c in proper_colorings(build_tree(TreeParams(3, 2, 4))):
        assert all(len({c[v] for v in e}) == 3 for e in build_tree(TreeParams(3, 2, 4)).graph.edges)
