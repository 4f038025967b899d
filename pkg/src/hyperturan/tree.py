"""The balanced rooted hypertree T(a, b, k), its balancedness and its powers.

Vertex layout of :func:`build_tree`: roots come first (ids ``0..R-1`` with
``R = b - a + k - 1``), followed by the ``a`` whites in path order.  Red edges
are windows of ``k`` consecutive whites; every root sits in one green edge
together with ``k - 1`` consecutive whites.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .hypergraph import (
    Hypergraph,
    HypergraphError,
    SizeLimitError,
    canonical_form,
    count_inj,
    enumerate_inj,
)

BALANCE_LIMIT = 20
POWER_LIMIT = 12


class TreeParamError(ValueError):
    pass


@dataclass(frozen=True)
class TreeParams:
    k: int
    a: int
    b: int

    def __post_init__(self) -> None:
        k, a, b = self.k, self.a, self.b
        if k < 2:
            raise TreeParamError(f"need k >= 2 (got k={k})")
        if a < k - 1:
            raise TreeParamError(f"need a >= k-1 (got a={a}, k={k})")
        if b <= a:
            raise TreeParamError(f"need b > a so that a/b < 1 (got a={a}, b={b})")
        if b < a - k + 3:
            raise TreeParamError(f"need b >= a-k+3 (got a={a}, b={b}, k={k})")

    @classmethod
    def scaled(cls, k: int, a: int, b: int) -> "TreeParams":
        """Smallest multiple ``(c*a, c*b)`` of the ratio a/b that is a valid parameter set."""
        if a < 1 or b <= a:
            raise TreeParamError(f"need 0 < a < b (got a={a}, b={b})")
        c = 1
        while True:
            aa, bb = a * c, b * c
            if aa >= k - 1 and bb >= aa - k + 3:
                return cls(k, aa, bb)
            c += 1

    @property
    def n_roots(self) -> int:
        return self.b - self.a + self.k - 1

    @property
    def n_windows(self) -> int:
        return self.a - self.k + 2

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.a, self.b)


@dataclass(frozen=True)
class RootedGraph:
    """A hypergraph with an ordered tuple of distinguished root vertices."""

    graph: Hypergraph
    roots: tuple[int, ...]

    @property
    def non_roots(self) -> tuple[int, ...]:
        rs = set(self.roots)
        return tuple(v for v in range(self.graph.n) if v not in rs)

    def root_colors(self) -> list[int]:
        """Vertex colours that single out each root (for root-fixing canonical forms)."""
        colors = [0] * self.graph.n
        for i, r in enumerate(self.roots):
            colors[r] = i + 1
        return colors

    def canonical(self, limit: int | None = None) -> bytes:
        kw = {} if limit is None else {"limit": limit}
        return canonical_form(self.graph, self.root_colors(), **kw)


@dataclass(frozen=True)
class RootedTree(RootedGraph):
    whites: tuple[int, ...] = ()
    # (edge, attachment set or None for the seed edge)
    build_order: tuple[tuple[tuple[int, ...], tuple[int, ...] | None], ...] = ()
    params: TreeParams | None = None

    def sidecar(self) -> dict:
        return {
            "roots": list(self.roots),
            "whites": list(self.whites),
            "build_order": [
                {"edge": list(e), "attach": None if att is None else list(att)}
                for e, att in self.build_order
            ],
        }


@dataclass(frozen=True)
class PowerMember(RootedGraph):
    copies: int = 1
    tag: int = 1


def root_window(p: TreeParams, i: int) -> int:
    """1-based window of k-1 consecutive whites that root ``i`` (1-based) attaches to."""
    if i == p.n_roots:
        return p.n_windows
    return 1 + ((i - 1) * p.n_windows) // (p.b - p.a + p.k - 2)


def build_tree(p: TreeParams) -> RootedTree:
    R, k, a = p.n_roots, p.k, p.a
    roots = tuple(range(R))
    whites = tuple(range(R, R + a))
    order: list[tuple[tuple[int, ...], tuple[int, ...] | None]] = []
    red = [tuple(whites[j:j + k]) for j in range(a - k + 1)]
    green = []
    for i in range(1, R + 1):
        w = root_window(p, i)
        window = tuple(whites[w - 1:w - 1 + k - 1])
        green.append((roots[i - 1], window))
    if red:
        order.append((red[0], None))
        for e in red[1:]:
            order.append((e, e[:-1]))
        for r, window in green:
            order.append((tuple(sorted((r,) + window)), window))
    else:
        r0, window = green[0]
        order.append((tuple(sorted((r0,) + window)), None))
        for r, window in green[1:]:
            order.append((tuple(sorted((r,) + window)), window))
    graph = Hypergraph(k, R + a, tuple(e for e, _ in order))
    return RootedTree(graph, roots, whites, tuple(order), p)


def check_build_order(T: RootedTree) -> bool:
    """Replay the construction sequence and verify it is a valid hypertree build."""
    seen_v: set[int] = set()
    prior: list[tuple[int, ...]] = []
    for idx, (e, att) in enumerate(T.build_order):
        if len(set(e)) != T.graph.k:
            return False
        if idx == 0:
            if att is not None:
                return False
        else:
            if att is None or len(att) != T.graph.k - 1:
                return False
            if set(e) & seen_v != set(att):
                return False
            if not any(set(att) <= set(f) for f in prior):
                return False
        seen_v.update(e)
        prior.append(tuple(e))
    return sorted(tuple(sorted(e)) for e in prior) == list(T.graph.edges)


def proper_colorings(R: RootedGraph) -> list[tuple[int, ...]]:
    """All vertex colourings with k colours in which every edge is rainbow.

    For connected hypertrees the colouring is unique up to permuting colours,
    so this is cheap; it is used to place roots into the right parts of a
    k-partite host.
    """
    G = R.graph
    k = G.k
    inc: list[list[tuple[int, ...]]] = [[] for _ in range(G.n)]
    for e in G.edges:
        for v in e:
            inc[v].append(e)
    color = [-1] * G.n
    out: list[tuple[int, ...]] = []

    def consistent(v: int) -> bool:
        for e in inc[v]:
            cs = [color[u] for u in e if color[u] >= 0]
            if len(cs) != len(set(cs)):
                return False
        return True

    # edge-by-edge order so constraints propagate early
    seen: set[int] = set()
    order = []
    for e in G.edges:
        for v in e:
            if v not in seen:
                seen.add(v)
                order.append(v)
    order += [v for v in range(G.n) if v not in seen]

    def rec(i: int) -> None:
        if i == len(order):
            out.append(tuple(color))
            return
        v = order[i]
        for c in range(k):
            color[v] = c
            if consistent(v):
                rec(i + 1)
        color[v] = -1

    rec(0)
    return out


# ---------------------------------------------------------------------------
# balancedness


def epsilon(T: RootedGraph, S: Iterable[int]) -> int:
    """Number of edges of T meeting the non-root set S."""
    S = set(S)
    if S & set(T.roots):
        raise HypergraphError(f"epsilon is defined on non-roots only; got roots {sorted(S & set(T.roots))}")
    return sum(1 for e in T.graph.edges if S.intersection(e))


def check_balanced(T: RootedGraph, limit: int = BALANCE_LIMIT):
    """Exhaustively test eps(S)/|S| >= e(T)/|non-roots| for every nonempty S.

    Returns ``(balanced, worst_subset, worst_ratio)``.
    """
    nr = T.non_roots
    if len(nr) > limit:
        raise SizeLimitError(f"check_balanced is exhaustive over 2^{len(nr)} subsets; limit is 2^{limit}")
    masks = [0] * len(nr)
    for i, v in enumerate(nr):
        for j, e in enumerate(T.graph.edges):
            if v in e:
                masks[i] |= 1 << j
    total = epsilon(T, nr)
    m = len(nr)
    cover = [0] * (1 << m)
    best_S, best_num, best_den = None, None, None
    for S in range(1, 1 << m):
        low = (S & -S).bit_length() - 1
        cover[S] = cover[S & (S - 1)] | masks[low]
        num, den = cover[S].bit_count(), S.bit_count()
        if best_S is None or num * best_den < best_num * den:
            best_S, best_num, best_den = S, num, den
    if best_S is None:
        return True, (), None
    worst = tuple(nr[i] for i in range(m) if best_S >> i & 1)
    balanced = best_num * m >= total * best_den
    return balanced, worst, Fraction(best_num, best_den)


# ---------------------------------------------------------------------------
# powers


def _slot_partitions(n_copies: int, a: int) -> Iterable[list[list[int]]]:
    """Assign each (copy, white) slot to a class, never two slots of one copy together.

    Yields, for each copy, the list of class indices of its whites.  Classes are
    numbered in order of first appearance, so every gluing appears exactly once.
    """
    assign: list[list[int]] = []

    def rec(copy: int, white: int, n_classes: int, taken: set[int]):
        if copy == n_copies:
            yield [list(c) for c in assign]
            return
        if white == a:
            yield from rec(copy + 1, 0, n_classes, set())
            return
        if white == 0:
            assign.append([])
        row = assign[copy]
        for c in range(n_classes + 1):
            if c in taken:
                continue
            row.append(c)
            taken.add(c)
            yield from rec(copy, white + 1, max(n_classes, c + 1), taken)
            taken.discard(c)
            row.pop()
        if white == 0:
            assign.pop()

    yield from rec(0, 0, 0, set())


def glue(T: RootedTree, classes_per_copy: Sequence[Sequence[int]]) -> RootedGraph:
    R = len(T.roots)
    n_classes = 1 + max((c for row in classes_per_copy for c in row), default=-1)
    edges = []
    for row in classes_per_copy:
        vmap = {r: r for r in T.roots}
        for w, c in zip(T.whites, row):
            vmap[w] = R + c
        edges.extend(tuple(vmap[v] for v in e) for e in T.graph.edges)
    return RootedGraph(Hypergraph(T.graph.k, R + n_classes, tuple(edges)), T.roots)


def _check_power_limit(T: RootedTree, s: int, limit: int) -> None:
    if s < 1:
        raise HypergraphError("power needs s >= 1")
    if s * len(T.whites) > limit:
        raise SizeLimitError(
            f"power enumeration glues s*a = {s * len(T.whites)} non-roots; limit is {limit}"
        )


def _power_level(T: RootedTree, s: int, dedupe: bool, canon_limit: int):
    out = []
    seen: set[bytes] = set()
    for rows in _slot_partitions(s, len(T.whites)):
        H = glue(T, rows)
        if dedupe:
            key = H.canonical(canon_limit)
            if key in seen:
                continue
            seen.add(key)
        out.append(H)
    return out


def enumerate_power(T: RootedTree, s: int, dedupe: bool = True,
                    limit: int = POWER_LIMIT, canon_limit: int | None = None) -> list[PowerMember]:
    """Members of the s-th power: gluings of s copies of T sharing the root tuple.

    Every member is tagged with its minimal number of copies, found by
    membership in the canonical-form sets of the lower powers.
    """
    _check_power_limit(T, s, limit)
    if canon_limit is None:
        canon_limit = len(T.roots) + s * len(T.whites)
    lower: list[set[bytes]] = []
    for j in range(1, s):
        lower.append({H.canonical(canon_limit) for H in _power_level(T, j, True, canon_limit)})
    members = []
    for H in _power_level(T, s, dedupe, canon_limit):
        key = H.canonical(canon_limit)
        tag = next((j + 1 for j, level in enumerate(lower) if key in level), s)
        members.append(PowerMember(H.graph, H.roots, copies=s, tag=tag))
    return members


def exact_power(T: RootedTree, s: int, **kw) -> list[PowerMember]:
    """Members whose minimal copy count is exactly s."""
    return [H for H in enumerate_power(T, s, **kw) if H.tag == s]


def check_edge_bound(H: RootedGraph, p: TreeParams) -> bool:
    """e(H) >= (|H| - |R|) * b / a, compared exactly."""
    m = H.graph.n - len(H.roots)
    return H.graph.n_edges * p.a >= m * p.b


def relabel_whites(T: RootedTree, rng: random.Random) -> RootedTree:
    """An isomorphic copy of T with the white ids shuffled (roots fixed)."""
    perm = list(T.whites)
    rng.shuffle(perm)
    vmap = {v: v for v in T.roots}
    vmap.update(zip(T.whites, perm))
    edges = tuple(tuple(vmap[v] for v in e) for e in T.graph.edges)
    order = tuple(
        (tuple(sorted(vmap[v] for v in e)), None if att is None else tuple(vmap[v] for v in att))
        for e, att in T.build_order
    )
    return RootedTree(Hypergraph(T.graph.k, T.graph.n, edges), T.roots,
                      tuple(vmap[w] for w in T.whites), order, T.params)


def rooted_copies(T: RootedTree, host: Hypergraph, roots: Sequence[int]) -> list[tuple[int, ...]]:
    return list(enumerate_inj(T.graph, host, dict(zip(T.roots, roots))))


def minimal_cover(T: RootedTree, H: RootedGraph, cap: int | None = None) -> int | None:
    """Fewest root-respecting copies of T inside H whose union is all of H.

    Independent of :func:`enumerate_power`; returns None if H is not a union
    of such copies at all (or needs more than ``cap``).
    """
    copies = []
    for img in enumerate_inj(T.graph, H.graph, dict(zip(T.roots, H.roots))):
        es = frozenset(tuple(sorted(img[v] for v in e)) for e in T.graph.edges)
        copies.append(es)
    target = frozenset(H.graph.edges)
    covered_vertices = set(H.roots)
    for e in target:
        covered_vertices.update(e)
    if len(covered_vertices) != H.graph.n:
        return None
    uniq = list(set(copies))
    if not uniq or frozenset().union(*uniq) != target:
        return None
    top = cap if cap is not None else len(uniq)
    for s in range(1, top + 1):
        for combo in itertools.combinations(uniq, s):
            if frozenset().union(*combo) == target:
                return s
    return None


def count_rooted(T: RootedTree, host: Hypergraph, roots: Sequence[int]) -> int:
    return count_inj(T.graph, host, dict(zip(T.roots, roots)))
