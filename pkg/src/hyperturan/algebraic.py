"""Random algebraic k-partite hypergraphs over F_q^b and their diagnostics.

Part ``j`` of the host holds the vectors of ``F_q^b``; vertex ``j*q^b + i``
is the vector whose base-q digits (most significant first) are ``i``.  A
k-tuple with one vertex per part is an edge iff all ``a`` random polynomials
vanish at the concatenated coordinates.

The expected number of copies of a rooted H at a fixed root tuple is reported
against ``q^(b*m - a*e(H))`` with ``m = |H| - |R|``, the number of non-roots.
The formula with ``b*|H|`` in place of ``b*m`` counts the roots as free and is
off by ``q^(b*|R|)``; it is not what the copy count converges to.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist
from typing import Callable, Sequence

import numpy as np

from .field import (
    FieldError,
    MultiPoly,
    degree_threshold_warning,
    derive_constants,
    evaluate_grid,
    require_prime,
    sample_poly,
    sample_reduced,
)
from .hypergraph import Hypergraph, HypergraphError, contains_any, count_inj
from .tree import (
    RootedGraph,
    RootedTree,
    TreeParams,
    build_tree,
    exact_power,
    proper_colorings,
)

ENUMERATION_LIMIT = 10**7
SAMPLING_MODES = ("dense", "reduced")


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class ConstructionParams:
    k: int
    a: int
    b: int
    q: int
    seed: int = 0
    sampling: str = "dense"

    def __post_init__(self) -> None:
        require_prime(self.q)
        if self.k < 2 or self.b < 1 or self.a < 0:
            raise ConstructionError(f"need k >= 2, b >= 1, a >= 0 (got k={self.k}, a={self.a}, b={self.b})")
        if self.sampling not in SAMPLING_MODES:
            raise ConstructionError(f"sampling must be one of {SAMPLING_MODES}")

    @property
    def constants(self) -> tuple[int, int]:
        return derive_constants(self.k, self.a, self.b)

    @property
    def s(self) -> int:
        return self.constants[0]

    @property
    def d(self) -> int:
        return self.constants[1]

    @property
    def num_vars(self) -> int:
        return self.k * self.b

    @property
    def tree(self) -> TreeParams:
        return TreeParams(self.k, self.a, self.b)

    def to_json(self) -> dict:
        return {"k": self.k, "a": self.a, "b": self.b, "q": self.q, "seed": self.seed,
                "sampling": self.sampling, "s": self.s, "d": self.d}


@dataclass(frozen=True, eq=False)
class AlgebraicInstance:
    params: ConstructionParams
    polys: tuple[MultiPoly, ...]
    graph: Hypergraph

    @property
    def part_size(self) -> int:
        return self.params.q ** self.params.b

    def part(self, v: int) -> int:
        return v // self.part_size

    def decode(self, v: int) -> tuple[int, tuple[int, ...]]:
        j, i = divmod(v, self.part_size)
        digits = np.unravel_index(i, (self.params.q,) * self.params.b)
        return j, tuple(int(x) for x in digits)

    def encode(self, part: int, vector: Sequence[int]) -> int:
        i = int(np.ravel_multi_index(tuple(vector), (self.params.q,) * self.params.b))
        return part * self.part_size + i

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "polys": [p.to_json() for p in self.polys],
            "graph": self.graph.to_json(),
        }


def derived_seed(master: int, *path: int) -> int:
    """Counter-based child seed: independent of how many other children are drawn."""
    ss = np.random.SeedSequence([int(master), *map(int, path)])
    return int(ss.generate_state(1, np.uint64)[0])


def sample_polys(params: ConstructionParams) -> tuple[MultiPoly, ...]:
    sampler = sample_poly if params.sampling == "dense" else sample_reduced
    return tuple(
        sampler(params.q, params.num_vars, params.d, derived_seed(params.seed, i))
        for i in range(params.a)
    )


def zero_mask(polys: Sequence[MultiPoly], k: int, b: int, q: int) -> np.ndarray:
    """Boolean array of shape (q^b,)*k marking common zeros of all polynomials."""
    mask = np.ones((q,) * (k * b), dtype=bool)
    for p in polys:
        if p.num_vars != k * b or p.q != q:
            raise ConstructionError("polynomial does not match the host dimensions")
        mask &= evaluate_grid(p) == 0
    return mask.reshape((q ** b,) * k)


def build_instance(params: ConstructionParams, polys: Sequence[MultiPoly] | None = None,
                   limit: int = ENUMERATION_LIMIT) -> AlgebraicInstance:
    """Sample (or take) the polynomials and test every cross-part k-tuple."""
    q, k, b = params.q, params.k, params.b
    tuples = q ** (b * k)
    if tuples > limit:
        raise ConstructionError(f"q^(bk) = {tuples} cross-part tuples exceeds the enumeration limit {limit}")
    degree_threshold_warning(q, params.d)
    if polys is None:
        polys = sample_polys(params)
    polys = tuple(polys)
    mask = zero_mask(polys, k, b, q)
    size = q ** b
    offsets = np.arange(k, dtype=np.int64) * size
    edges = np.argwhere(mask) + offsets
    partition = tuple(v // size for v in range(k * size))
    graph = Hypergraph(k, k * size, tuple(map(tuple, edges.tolist())), partition)
    return AlgebraicInstance(params, polys, graph)


def instance_from_json(data: dict) -> AlgebraicInstance:
    p = data["params"]
    params = ConstructionParams(p["k"], p["a"], p["b"], p["q"], p.get("seed", 0), p.get("sampling", "dense"))
    polys = [MultiPoly.from_json(x) for x in data["polys"]]
    return build_instance(params, polys)


def point_line_polynomial(q: int, d: int = 1) -> MultiPoly:
    """x1 - y0*x0 - y1 in the variables (x0, x1, y0, y1).

    Its zero set is the point-line incidence graph of the affine plane over
    F_q: two points lie on at most one common line, so the bipartite host has
    no two vertices with two common neighbours.  It is one outcome of the
    random degree-<=d construction with k = 2, b = 2, a = 1.
    """
    return MultiPoly.from_terms(q, 4, max(d, 2), {
        (0, 1, 0, 0): 1,
        (1, 0, 1, 0): q - 1,
        (0, 0, 0, 1): q - 1,
    })


# ---------------------------------------------------------------------------
# rooted copies


def consistent_colorings(H: RootedGraph, root_parts: Sequence[int]) -> list[tuple[int, ...]]:
    return [c for c in proper_colorings(H) if all(c[r] == p for r, p in zip(H.roots, root_parts))]


def count_rooted_copies(inst: AlgebraicInstance, T: RootedGraph, w: Sequence[int]) -> int:
    """Number of injective copies of T in the host with ``T.roots[i] -> w[i]``."""
    if len(w) != len(T.roots):
        raise HypergraphError(f"need {len(T.roots)} roots, got {len(w)}")
    parts = [inst.part(x) for x in w]
    if not consistent_colorings(T, parts):
        raise HypergraphError(f"root parts {parts} admit no rainbow colouring of the pattern")
    return count_inj(T.graph, inst.graph, dict(zip(T.roots, w)))


def sample_placement(H: RootedGraph, k: int, part_size: int, rng: random.Random):
    """A uniform rainbow colouring of H and distinct uniform roots in the parts it assigns."""
    colorings = proper_colorings(H)
    if not colorings:
        raise HypergraphError("pattern has no rainbow k-colouring, so it never embeds in a k-partite host")
    c = rng.choice(colorings)
    chosen: list[int] = []
    for r in H.roots:
        while True:
            v = c[r] * part_size + rng.randrange(part_size)
            if v not in chosen:
                chosen.append(v)
                break
    return c, tuple(chosen)


def sample_root_tuple(H: RootedGraph, k: int, part_size: int, rng: random.Random):
    return sample_placement(H, k, part_size, rng)[1]


def with_parts(H: RootedGraph, coloring: Sequence[int]) -> Hypergraph:
    """H with every vertex pinned to the part the colouring names."""
    return Hypergraph(H.graph.k, H.graph.n, H.graph.edges, tuple(coloring))


def falling(n: int, m: int) -> int:
    out = 1
    for i in range(m):
        out *= n - i
    return out


def placements(H: RootedGraph, coloring: Sequence[int], k: int, size: int) -> int:
    """Injective placements of the non-roots into their parts, avoiding the roots."""
    roots_in = Counter(coloring[r] for r in H.roots)
    per_part = Counter(coloring[v] for v in H.non_roots)
    ways = 1
    for j in range(k):
        ways *= falling(size - roots_in.get(j, 0), per_part.get(j, 0))
    return ways


def exact_copy_expectation(H: RootedGraph, k: int, a: int, b: int, q: int,
                           root_parts: Sequence[int], coloring: Sequence[int] | None = None) -> Fraction:
    """E[# injective copies of H at a fixed distinct root tuple].

    Each placement of the non-roots into distinct vectors of their parts makes
    the e(H) edges distinct points, at which a random polynomial of degree >=
    e(H)-1 takes independent uniform values; so every placement survives with
    probability q^(-a e(H)).  With ``coloring`` only copies whose vertices sit
    in the parts it names are counted; otherwise every consistent colouring
    contributes.
    """
    size = q ** b
    cols = [coloring] if coloring is not None else consistent_colorings(H, root_parts)
    total = sum(placements(H, c, k, size) for c in cols)
    return Fraction(total, q ** (a * H.graph.n_edges))


def copy_prediction(H: RootedGraph, a: int, b: int, q: int) -> Fraction:
    m = H.graph.n - len(H.roots)
    return Fraction(q) ** (b * m - a * H.graph.n_edges)


def _map(fn: Callable, items: list, workers: int) -> list:
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def embeddable(H: RootedGraph) -> bool:
    """Whether H has a rainbow k-colouring, i.e. can appear in a k-partite host at all."""
    return bool(proper_colorings(H))


def _rooted_copy_trial(args):
    k, a, b, q, patterns, seed, sampling = args
    inst = build_instance(ConstructionParams(k, a, b, q, seed, sampling))
    rng = random.Random(seed)
    out = []
    for H in patterns:
        c, w = sample_placement(H, k, inst.part_size, rng)
        count = count_inj(with_parts(H, c), inst.graph, dict(zip(H.roots, w)))
        out.append((count, exact_copy_expectation(H, k, a, b, q, [inst.part(x) for x in w], c)))
    return seed, out


def _summarize(H: RootedGraph, a: int, b: int, q: int, counts: list[int], exact: list[Fraction]) -> dict:
    arr = np.array(counts, dtype=float)
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    pred = copy_prediction(H, a, b, q)
    ex = sum(exact, Fraction(0)) / len(exact)
    tol = max(3 * se, 0.25 * float(pred))
    return {
        "m": H.graph.n - len(H.roots), "e": H.graph.n_edges,
        "mean": mean, "stderr": se,
        "prediction": str(pred), "prediction_float": float(pred),
        "exact_expectation": str(ex), "exact_expectation_float": float(ex),
        "tolerance": tol,
        "within_3se": abs(mean - float(pred)) <= 3 * se,
        "pass": abs(mean - float(pred)) <= tol,
        "counts_histogram": {str(c): n for c, n in sorted(Counter(counts).items())},
    }


def rooted_copy_means(k: int, a: int, b: int, patterns: Sequence[RootedGraph], q: int, num_seeds: int,
                seed: int = 0, sampling: str = "dense", workers: int = 1) -> dict:
    """Rooted copy means for several patterns, all counted on the same random instances.

    Each trial draws a rainbow colouring of the pattern, roots in the parts it
    names, and counts the copies that keep every vertex in its named part.
    The prediction is per part assignment: when several colourings agree on
    the roots (k >= 3), the unrestricted count is that many times larger.

    Patterns with no rainbow colouring never occur in a k-partite host; they
    are reported as such and left out of the verdict.
    """
    usable = [H for H in patterns if embeddable(H)]
    seeds = [derived_seed(seed, i) for i in range(num_seeds)]
    rows = _map(_rooted_copy_trial, [(k, a, b, q, usable, s, sampling) for s in seeds], workers) if usable else []
    results = []
    j = 0
    for H in patterns:
        if not embeddable(H):
            results.append({"embeddable": False, "m": H.graph.n - len(H.roots), "e": H.graph.n_edges,
                            "pass": None})
            continue
        counts = [r[1][j][0] for r in rows]
        exact = [r[1][j][1] for r in rows]
        results.append({"embeddable": True, **_summarize(H, a, b, q, counts, exact)})
        j += 1
    return {
        "k": k, "a": a, "b": b, "q": q, "num_seeds": num_seeds, "seed": seed, "sampling": sampling,
        "patterns": results,
        "pass": all(r["pass"] for r in results if r["embeddable"]),
    }


def rooted_copy_mean(k: int, a: int, b: int, H: RootedGraph, q: int, num_seeds: int,
                       seed: int = 0, sampling: str = "dense", workers: int = 1) -> dict:
    """Monte Carlo mean of rooted copy counts against ``q^(b*m - a*e(H))``.

    PASS iff the prediction is within 3 standard errors of the empirical mean
    or within 25% of it, whichever is looser.
    """
    if not embeddable(H):
        raise HypergraphError("pattern has no rainbow k-colouring, so it never embeds in a k-partite host")
    r = rooted_copy_means(k, a, b, [H], q, num_seeds, seed=seed, sampling=sampling, workers=workers)
    out = {key: r[key] for key in ("k", "a", "b", "q", "num_seeds", "seed", "sampling")}
    out.update({key: v for key, v in r["patterns"][0].items() if key != "embeddable"})
    return out


def _copy_gap_trial(args):
    k, a, b, q, T, seed, sampling = args
    inst = build_instance(ConstructionParams(k, a, b, q, seed, sampling))
    if inst.graph.n_edges == 0:
        return seed, 0
    rng = random.Random(seed)
    w = sample_root_tuple(T, k, inst.part_size, rng)
    return seed, count_inj(T.graph, inst.graph, dict(zip(T.roots, w)))


def gap_fraction(counts: Sequence[int], p_config: int, q: int) -> float:
    if not counts:
        return 0.0
    return sum(1 for c in counts if p_config <= c < q / 2) / len(counts)


def copy_gap_diagnostic(k: int, a: int, b: int, q_list: Sequence[int], num_seeds: int,
                      p_config: int = 3, seed: int = 0, sampling: str = "dense", workers: int = 1) -> dict:
    """Histogram of |C| (copies of T at a random root tuple) per q, with the gap [p, q/2) marked.

    Report only: the dichotomy is a large-q statement.
    """
    T = build_tree(TreeParams(k, a, b))
    per_q = []
    for q in q_list:
        seeds = [derived_seed(seed, q, i) for i in range(num_seeds)]
        rows = _map(_copy_gap_trial, [(k, a, b, q, T, s, sampling) for s in seeds], workers)
        counts = [c for _, c in rows]
        per_q.append({
            "q": q,
            "histogram": {str(c): n for c, n in sorted(Counter(counts).items())},
            "gap": [p_config, q / 2],
            "gap_fraction": gap_fraction(counts, p_config, q),
        })
    fr = [row["gap_fraction"] for row in per_q]
    return {
        "k": k, "a": a, "b": b, "p_config": p_config, "num_seeds": num_seeds, "seed": seed,
        "per_q": per_q,
        "nonincreasing": all(x >= y for x, y in zip(fr, fr[1:])),
        "status": "REPORT-ONLY",
    }


def wilson_interval(successes: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = successes / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return centre - half, centre + half


def _nonempty_trial(args):
    k, a, b, q, seed, sampling = args
    params = ConstructionParams(k, a, b, q, seed, sampling)
    polys = sample_polys(params)
    return seed, bool(zero_mask(polys, k, b, q).any())


def nonempty_rate(k: int, a: int, b: int, q: int, num_seeds: int, seed: int = 0,
                  sampling: str = "dense", workers: int = 1) -> dict:
    if num_seeds < 100:
        raise ConstructionError("nonempty_rate needs at least 100 seeds")
    seeds = [derived_seed(seed, i) for i in range(num_seeds)]
    rows = _map(_nonempty_trial, [(k, a, b, q, s, sampling) for s in seeds], workers)
    hits = sum(1 for _, ok in rows if ok)
    lo, hi = wilson_interval(hits, num_seeds)
    rate = hits / num_seeds
    bound = Fraction(1, q ** a)
    half = (hi - lo) / 2
    return {
        "k": k, "a": a, "b": b, "q": q, "num_seeds": num_seeds, "seed": seed,
        "rate": rate, "wilson": [lo, hi], "half_width": half,
        "lower_bound": str(bound), "lower_bound_float": float(bound),
        "pass": rate >= float(bound) - half,
    }


def _edge_trial(args):
    k, a, b, q, seed, sampling = args
    params = ConstructionParams(k, a, b, q, seed, sampling)
    return seed, int(zero_mask(sample_polys(params), k, b, q).sum())


def edge_stats(k: int, a: int, b: int, q_list: Sequence[int], num_seeds: int, seed: int = 0,
               sampling: str = "dense", workers: int = 1) -> dict:
    """Mean edge count of nonempty instances against q^(bk-a), per q."""
    rows_out = []
    for q in q_list:
        seeds = [derived_seed(seed, q, i) for i in range(num_seeds)]
        rows = _map(_edge_trial, [(k, a, b, q, s, sampling) for s in seeds], workers)
        nonempty = [c for _, c in rows if c > 0]
        mean = float(np.mean(nonempty)) if nonempty else 0.0
        scale = q ** (b * k - a)
        rows_out.append({
            "q": q, "nonempty": len(nonempty), "mean_edges": mean,
            "prediction": scale, "ratio": mean / scale,
        })
    return {"k": k, "a": a, "b": b, "num_seeds": num_seeds, "seed": seed, "sampling": sampling,
            "per_q": rows_out}


def find_family_copy(inst: AlgebraicInstance, family: Sequence[Hypergraph]):
    return contains_any(inst.graph, family)


def power_family(tree: TreeParams, p: int) -> list[Hypergraph]:
    """Plain (unrooted) hypergraphs of the exact p-th power of T."""
    T: RootedTree = build_tree(tree)
    return [H.graph for H in exact_power(T, p)]


def freeness(inst: AlgebraicInstance, tree: TreeParams, p: int) -> dict:
    family = power_family(tree, p)
    found, witness = contains_any(inst.graph, family)
    return {
        "p": p, "family_size": len(family), "edges": inst.graph.n_edges,
        "free": not found,
        "witness": None if witness is None else {"member": witness[0], "image": list(witness[1])},
    }


__all__ = [
    "AlgebraicInstance", "ConstructionError", "ConstructionParams", "FieldError",
    "build_instance", "count_rooted_copies", "derived_seed", "edge_stats", "embeddable", "exact_copy_expectation",
    "find_family_copy", "freeness", "instance_from_json", "copy_gap_diagnostic", "rooted_copy_mean", "rooted_copy_means",
    "nonempty_rate", "copy_prediction", "point_line_polynomial", "power_family", "sample_placement", "sample_polys",
    "sample_root_tuple", "with_parts", "wilson_interval", "zero_mask",
]
