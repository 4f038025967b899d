import itertools
import random
from fractions import Fraction

import pytest

from hyperturan.algebraic import (
    AlgebraicInstance,
    ConstructionError,
    ConstructionParams,
    build_instance,
    count_rooted_copies,
    derived_seed,
    edge_stats,
    exact_copy_expectation,
    freeness,
    instance_from_json,
    copy_gap_diagnostic,
    rooted_copy_mean,
    rooted_copy_means,
    nonempty_rate,
    copy_prediction,
    point_line_polynomial,
    sample_root_tuple,
    wilson_interval,
)
from hyperturan.field import FieldError, MultiPoly, evaluate
from hyperturan.hypergraph import Hypergraph, HypergraphError, enumerate_inj
from hyperturan.tree import RootedGraph, TreeParams, build_tree, enumerate_power


def params(q=5, seed=0, k=2, a=1, b=2, sampling="dense"):
    return ConstructionParams(k, a, b, q, seed, sampling)


def constant(q, nv, c):
    return MultiPoly.from_terms(q, nv, 0, {(0,) * nv: c})


# -- construction -----------------------------------------------------------

def test_params_constants_and_validation():
    p = params()
    assert (p.s, p.d) == (6, 11)
    with pytest.raises(FieldError):
        params(q=6)
    with pytest.raises(ConstructionError):
        params(sampling="sparse")


def test_nonzero_constant_gives_no_edges():
    inst = build_instance(params(q=3), [constant(3, 4, 2)])
    assert inst.graph.n_edges == 0
    assert inst.graph.n == 2 * 9


def test_zero_polynomial_gives_all_tuples():
    inst = build_instance(params(q=3), [MultiPoly.zero(3, 4)])
    assert inst.graph.n_edges == 3 ** 4


def test_no_constraints_complete():
    inst = build_instance(ConstructionParams(2, 0, 2, 3))
    assert inst.graph.n_edges == 3 ** 4
    assert nonempty_rate(2, 0, 2, 3, 100)["rate"] == 1.0


def test_edge_criterion_and_partition():
    inst = build_instance(params(q=3, seed=11))
    size = inst.part_size
    for u in range(size):
        for v in range(size, 2 * size):
            pu, xu = inst.decode(u)
            pv, xv = inst.decode(v)
            assert (pu, pv) == (0, 1)
            zero = all(evaluate(f, xu + xv) == 0 for f in inst.polys)
            assert inst.graph.has_edge((u, v)) == zero
    for e in inst.graph.edges:
        assert sorted(inst.part(v) for v in e) == [0, 1]


def test_decode_encode_round_trip():
    inst = build_instance(params(q=5, seed=1))
    for v in range(inst.graph.n):
        assert inst.encode(*inst.decode(v)) == v
    assert inst.decode(5 ** 2 + 7) == (1, (1, 2))


def test_deterministic_and_json_rebuild():
    a = build_instance(params(seed=9))
    b = build_instance(params(seed=9))
    assert a.graph.edges == b.graph.edges
    again = instance_from_json(a.to_json())
    assert again.graph.edges == a.graph.edges
    assert again.to_json() == a.to_json()


def test_reduced_sampling_is_deterministic():
    a = build_instance(params(q=3, seed=2, a=2, b=3, sampling="reduced"))
    b = build_instance(params(q=3, seed=2, a=2, b=3, sampling="reduced"))
    assert a.graph.edges == b.graph.edges


def test_enumeration_limit():
    with pytest.raises(ConstructionError, match=str(7 ** 6)):
        build_instance(params(q=7, a=2, b=3), limit=10_000)


def test_seed_derivation_is_counter_based():
    assert derived_seed(5, 3) == derived_seed(5, 3)
    assert len({derived_seed(5, i) for i in range(100)}) == 100


# -- rooted copies ----------------------------------------------------------

def hand_instance(joined: int, q=3):
    """Part 0 holds w1 = 0 and w2 = 1; the first ``joined`` part-1 vertices see both."""
    size = q ** 2
    edges = [(0, size + i) for i in range(joined)] + [(1, size + i) for i in range(joined)]
    edges += [(2, size + joined)]
    G = Hypergraph(2, 2 * size, tuple(edges), tuple([0] * size + [1] * size))
    return AlgebraicInstance(params(q=q), (), G)


def test_rooted_copies_hand_fixture():
    T = build_tree(TreeParams(2, 1, 2))
    inst = hand_instance(3)
    assert count_rooted_copies(inst, T, (0, 1)) == 3
    assert count_rooted_copies(inst, T, (0, 1)) == len(list(enumerate_inj(T.graph, inst.graph, {0: 0, 1: 1})))


def test_rooted_copies_edgeless():
    T = build_tree(TreeParams(2, 1, 2))
    assert count_rooted_copies(hand_instance(0), T, (0, 1)) == 0


def test_rooted_copies_wrong_parts():
    T = build_tree(TreeParams(2, 1, 2))
    inst = hand_instance(3)
    with pytest.raises(HypergraphError):
        count_rooted_copies(inst, T, (0, 10))


@pytest.mark.parametrize("seed", range(5))
def test_rooted_copies_stream_consistency(seed):
    inst = build_instance(params(q=5, seed=seed))
    T = build_tree(TreeParams(2, 1, 2))
    w = sample_root_tuple(T, 2, inst.part_size, random.Random(seed))
    stream = list(enumerate_inj(T.graph, inst.graph, dict(zip(T.roots, w))))
    assert count_rooted_copies(inst, T, w) == len(stream)


def test_root_sampling_parts():
    T = build_tree(TreeParams(2, 2, 3))
    rng = random.Random(0)
    for _ in range(50):
        w = sample_root_tuple(T, 2, 25, rng)
        assert len(set(w)) == len(w)
        # the two roots are joined by a path of three edges, so they sit in different parts
        assert len({v // 25 for v in w}) == 2


# -- expectations -----------------------------------------------------------

def test_prediction_values():
    T = build_tree(TreeParams(2, 1, 2))
    assert copy_prediction(T, 1, 2, 5) == 1
    green = RootedGraph(Hypergraph(2, 2, ((0, 1),)), (0,))
    assert copy_prediction(green, 1, 2, 5) == 5
    assert exact_copy_expectation(green, 2, 1, 2, 5, [0]) == 5
    empty = RootedGraph(Hypergraph(2, 2), (0, 1))
    assert copy_prediction(empty, 1, 2, 5) == 1
    assert exact_copy_expectation(empty, 2, 1, 2, 5, [0, 1]) == 1


def test_exact_expectation_counts_placements():
    # tree 2,1,2 with roots in part 0: the white ranges over the 25 part-1 vectors
    T = build_tree(TreeParams(2, 1, 2))
    assert exact_copy_expectation(T, 2, 1, 2, 5, [0, 0]) == Fraction(25, 25)
    assert exact_copy_expectation(T, 2, 1, 2, 5, [0, 1]) == 0


def test_rooted_copies_tree_q5():
    T = build_tree(TreeParams(2, 1, 2))
    r = rooted_copy_mean(2, 1, 2, T, 5, 500, seed=3)
    assert r["prediction"] == "1" and r["pass"]
    assert abs(r["mean"] - 1) <= 3 * r["stderr"]


def test_rooted_copies_single_green_edge():
    green = RootedGraph(Hypergraph(2, 2, ((0, 1),)), (0,))
    r = rooted_copy_mean(2, 1, 2, green, 5, 300, seed=1)
    assert r["prediction"] == "5" and r["exact_expectation"] == "5" and r["pass"]


def test_rooted_copies_empty_pattern():
    r = rooted_copy_mean(2, 1, 2, RootedGraph(Hypergraph(2, 2), (0, 1)), 5, 20)
    assert r["mean"] == 1 and r["stderr"] == 0 and r["pass"]


def test_rooted_copies_rejects_non_embeddable():
    odd = RootedGraph(Hypergraph(2, 3, ((0, 1), (1, 2), (0, 2))), (0,))
    with pytest.raises(HypergraphError):
        rooted_copy_mean(2, 1, 2, odd, 5, 10)


@pytest.mark.parametrize("kab,sampling", [((2, 1, 2), "dense"), ((2, 2, 3), "reduced")])
@pytest.mark.parametrize("q", [3, 5, 7])
def test_rooted_copies_grid_over_small_powers(kab, sampling, q):
    k, a, b = kab
    T = build_tree(TreeParams(k, a, b))
    members = [H for s in (1, 2) for H in enumerate_power(T, s)]
    r = rooted_copy_means(k, a, b, members, q, 300, seed=q, sampling=sampling)
    assert r["pass"], [p for p in r["patterns"] if p["pass"] is False]
    assert any(p["embeddable"] for p in r["patterns"])


@pytest.mark.slow
def test_rooted_copies_three_uniform_q3():
    T = build_tree(TreeParams(3, 2, 4))
    r = rooted_copy_mean(3, 2, 4, T, 3, 40, seed=0, sampling="reduced")
    assert r["prediction"] == "1" and r["pass"]


def test_three_uniform_dense_sampling_too_large():
    with pytest.raises(FieldError):
        build_instance(params(q=3, k=3, a=2, b=4))


# -- non-emptiness, edge counts, dichotomy ----------------------------------

def test_wilson_interval():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and abs((lo + hi) / 2 - 0.5) < 1e-12
    lo, hi = wilson_interval(100, 100)
    assert hi == pytest.approx(1.0) and lo > 0.95


@pytest.mark.parametrize("a,q", [(1, 3), (2, 3)])
def test_nonempty_rate_bound(a, q):
    b = a + 1
    r = nonempty_rate(2, a, b, q, 200, seed=4, sampling="reduced")
    assert r["pass"]
    assert r["lower_bound"] == str(Fraction(1, q ** a))


def test_nonempty_needs_100_seeds():
    with pytest.raises(ConstructionError):
        nonempty_rate(2, 1, 2, 3, 50)


def test_edge_stats_trend():
    r = edge_stats(2, 1, 2, [3, 5, 7, 11], 60, seed=1)
    for row in r["per_q"]:
        assert row["prediction"] == row["q"] ** 3
    assert 0.5 <= r["per_q"][1]["ratio"] <= 2.0
    assert 0.25 <= r["per_q"][-1]["ratio"] <= 4


def test_copy_gap_report_only():
    r = copy_gap_diagnostic(2, 1, 2, [5, 7], 40, p_config=3, seed=2)
    assert r["status"] == "REPORT-ONLY"
    for row in r["per_q"]:
        assert 0 <= row["gap_fraction"] <= 1
        assert sum(row["histogram"].values()) == 40


def test_dichotomy_extremes():
    T = build_tree(TreeParams(2, 1, 2))
    empty = build_instance(params(q=5), [constant(5, 4, 1)])
    full = build_instance(params(q=5), [MultiPoly.zero(5, 4)])
    assert count_rooted_copies(empty, T, (0, 1)) == 0
    # complete bipartite host: the white ranges over all of part 1
    assert count_rooted_copies(full, T, (0, 1)) == 25 >= 5 / 2


# -- concrete freeness ------------------------------------------------------

def test_point_line_instance():
    inst = build_instance(params(q=5), [point_line_polynomial(5, 11)])
    assert inst.graph.n_edges == 5 ** 3
    r = freeness(inst, TreeParams(2, 1, 2), 3)
    assert r["free"] and r["family_size"] == 1
    # every pair of points has at most one common line
    G = inst.graph
    nbrs = [set() for _ in range(G.n)]
    for u, v in G.edges:
        nbrs[u].add(v)
    assert max(len(nbrs[u] & nbrs[v]) for u, v in itertools.combinations(range(25), 2)) <= 1


def test_random_instance_usually_not_free():
    inst = build_instance(params(q=5, seed=3))
    r = freeness(inst, TreeParams(2, 1, 2), 3)
    assert not r["free"] and r["witness"] is not None


def test_parallel_matches_serial():
    T = build_tree(TreeParams(2, 1, 2))
    a = rooted_copy_mean(2, 1, 2, T, 3, 30, seed=7)
    b = rooted_copy_mean(2, 1, 2, T, 3, 30, seed=7, workers=2)
    assert a == b


def test_three_uniform_colourings_double_the_unrestricted_count():
    # the two whites of tree 3,2,4 may swap parts, so two colourings agree on the roots
    T = build_tree(TreeParams(3, 2, 4))
    parts = [2, 2, 2, 2]
    assert exact_copy_expectation(T, 3, 2, 4, 3, parts) == 2 * exact_copy_expectation(
        T, 3, 2, 4, 3, parts, coloring=(2, 2, 2, 2, 0, 1))
