"""Degree-weighted distributions on hypertree homomorphisms and the counting bounds they give.

A hypertree H is grown edge by edge: the seed edge is mapped to a uniformly
random ordered edge of the host X, and each later edge, attached along a
(k-1)-set D that is already placed, sends its new vertex to a uniform
completion of the image of D.  A homomorphism A therefore gets probability
``1 / (M * prod deg(image of D))`` where ``M = k! e(X)``; those denominators
are kept as Python ints so that sums and marginals are exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import factorial, lcm
from typing import Iterable, Sequence

from .hypergraph import Hypergraph, HypergraphError, count_homs, count_inj, enumerate_inj
from .tree import RootedGraph, RootedTree, TreeParams, build_tree, minimal_cover


class DistributionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HostProfile:
    X: Hypergraph

    def __post_init__(self) -> None:
        if self.X.n < 2:
            raise DistributionError("host needs at least 2 vertices")

    @property
    def k(self) -> int:
        return self.X.k

    @property
    def n(self) -> int:
        return self.X.n

    @property
    def M(self) -> int:
        return factorial(self.X.k) * self.X.n_edges

    @property
    def r_eff(self) -> float:
        """The r with n^(k-r) = M."""
        if self.M == 0:
            return math.inf
        return self.k - math.log(self.M) / math.log(self.n)

    def deg(self, tup: Sequence[int]) -> int:
        """Edges containing the set of an ordered (k-1)-tuple; 0 if it repeats a vertex."""
        s = frozenset(tup)
        if len(s) != self.k - 1:
            return 0
        return len(self.X.link.get(s, ()))

    @cached_property
    def deg_index(self) -> dict[tuple[int, ...], int]:
        """Nonzero deg over all ordered (k-1)-tuples; the values sum to M."""
        out = {}
        for s, comp in self.X.link.items():
            for t in itertools.permutations(sorted(s)):
                out[t] = len(comp)
        return out


# ---------------------------------------------------------------------------
# build orders


BuildOrder = tuple[tuple[tuple[int, ...], tuple[int, ...] | None], ...]


def find_build_order(H: Hypergraph) -> BuildOrder:
    """Some order growing H from one edge, each new edge meeting the placed part in an edge's (k-1)-subset.

    Raises HypergraphError when H is not a connected hypertree.
    """
    if H.n_edges == 0:
        raise HypergraphError("an edgeless pattern has no build order")
    k = H.k
    edges = list(H.edges)
    placed = set(edges[0])
    order: list = [(edges[0], None)]
    done = [edges[0]]
    rest = edges[1:]
    while rest:
        for idx, e in enumerate(rest):
            old = [v for v in e if v in placed]
            if len(old) == k - 1 and any(set(old) <= set(f) for f in done):
                order.append((e, tuple(old)))
                placed.update(e)
                done.append(e)
                del rest[idx]
                break
        else:
            raise HypergraphError("pattern is not a hypertree: no edge can be attached along an existing co-edge")
    if placed != set(range(H.n)):
        raise HypergraphError("pattern has isolated vertices")
    return tuple(order)


def pattern_order(H) -> tuple[Hypergraph, BuildOrder]:
    if isinstance(H, RootedTree) and H.build_order:
        return H.graph, H.build_order
    g = H.graph if isinstance(H, RootedGraph) else H
    return g, find_build_order(g)


# ---------------------------------------------------------------------------
# the weighted table


@dataclass(frozen=True, eq=False)
class WeightedHomTable:
    """Homomorphisms (as image tuples) with probability 1/den each."""

    pattern: Hypergraph
    order: BuildOrder
    host: HostProfile
    den: dict[tuple[int, ...], int]

    @cached_property
    def common(self) -> int:
        return reduce(lcm, self.den.values(), 1)

    def weight(self, hom: Sequence[int]) -> Fraction:
        d = self.den.get(tuple(hom))
        return Fraction(0) if d is None else Fraction(1, d)

    def total(self) -> Fraction:
        L = self.common
        return Fraction(sum(L // d for d in self.den.values()), L)

    def corrupted(self, hom: Sequence[int] | None = None) -> "WeightedHomTable":
        """Copy with one weight doubled; a negative control for the exact audits."""
        den = dict(self.den)
        key = tuple(hom) if hom is not None else next(iter(den))
        den[key] = max(1, den[key] // 2)
        return WeightedHomTable(self.pattern, self.order, self.host, den)

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern.to_json(),
            "host": self.host.X.to_json(),
            "build_order": [{"edge": list(e), "attach": None if a is None else list(a)} for e, a in self.order],
            "weights": [[list(h), f"1/{d}"] for h, d in sorted(self.den.items())],
        }


def build_mu(H, host: HostProfile | Hypergraph) -> WeightedHomTable:
    if isinstance(host, Hypergraph):
        host = HostProfile(host)
    pattern, order = pattern_order(H)
    if pattern.k != host.k:
        raise DistributionError(f"pattern arity {pattern.k} differs from host arity {host.k}")
    M = host.M
    if M == 0:
        raise DistributionError("host has no edges, so there is no distribution on homomorphisms")
    seed = order[0][0]
    partial: dict[tuple, int] = {}
    unset = (-1,) * pattern.n
    for e in host.X.edges:
        for perm in itertools.permutations(e):
            h = list(unset)
            for v, x in zip(seed, perm):
                h[v] = x
            partial[tuple(h)] = M
    link = host.X.link
    for e, att in order[1:]:
        (new,) = [v for v in e if v not in att]
        nxt: dict[tuple, int] = {}
        for h, d in partial.items():
            comp = link.get(frozenset(h[v] for v in att), ())
            if not comp:
                # attachment sets sit inside an already-mapped edge, so this cannot happen
                raise DistributionError("internal inconsistency: attachment set has degree 0")
            dd = d * len(comp)
            for c in comp:
                g = list(h)
                g[new] = c
                nxt[tuple(g)] = dd
        partial = nxt
    return WeightedHomTable(pattern, order, host, partial)


# ---------------------------------------------------------------------------
# entropy and the two induction properties


def entropy_D(table: WeightedHomTable) -> float:
    """ln(n^|H|) + sum mu ln mu, i.e. the divergence from the uniform map."""
    n = table.host.n
    acc = math.fsum(math.log(d) / d for d in table.den.values())
    return table.pattern.n * math.log(n) - acc


def entropy_D_factorized(table: WeightedHomTable) -> float:
    """Same quantity as ln(n^|H|) - ln M - sum over later edges of E[ln deg(image of D)]."""
    host = table.host
    terms = []
    for h, d in table.den.items():
        s = 0.0
        for _, att in table.order[1:]:
            s += math.log(host.deg([h[v] for v in att]))
        terms.append(s / d)
    return table.pattern.n * math.log(host.n) - math.log(host.M) - math.fsum(terms)


def edge_entropy(host: HostProfile) -> float:
    """D of the uniform law on ordered edges: ln(n^k / M)."""
    return host.k * math.log(host.n) - math.log(host.M)


def verify_entropy_bound(H, host, tol: float = 1e-9) -> dict:
    table = build_mu(H, host)
    host = table.host
    lhs = entropy_D(table)
    rhs = table.pattern.n_edges * edge_entropy(host)
    slack = rhs - lhs
    return {"D_mu": lhs, "bound": rhs, "slack": slack, "pass": slack >= -tol}


def adjacent_tuples(H: Hypergraph) -> list[tuple[int, ...]]:
    """Every ordering of every (k-1)-subset of an edge of H."""
    sets = {frozenset(s) for e in H.edges for s in itertools.combinations(e, H.k - 1)}
    return [t for s in sorted(sets, key=sorted) for t in itertools.permutations(sorted(s))]


def marginal(table: WeightedHomTable, S: Sequence[int]) -> dict[tuple[int, ...], Fraction]:
    L = table.common
    acc: dict[tuple[int, ...], int] = {}
    for h, d in table.den.items():
        t = tuple(h[v] for v in S)
        acc[t] = acc.get(t, 0) + L // d
    return {t: Fraction(c, L) for t, c in acc.items()}


def verify_marginals(H=None, host=None, table: WeightedHomTable | None = None) -> dict:
    """Marginal of the law onto every ordered adjacent (k-1)-tuple equals deg(T)/M, exactly."""
    if table is None:
        table = build_mu(H, host)
    host = table.host
    M = host.M
    worst = Fraction(0)
    worst_at = None
    checked = 0
    for S in adjacent_tuples(table.pattern):
        marg = marginal(table, S)
        for T in set(marg) | set(host.deg_index):
            dev = abs(marg.get(T, Fraction(0)) - Fraction(host.deg(T), M))
            checked += 1
            if dev > worst:
                worst, worst_at = dev, (list(S), list(T))
    return {"pass": worst == 0, "max_deviation": str(worst), "worst": worst_at, "checked": checked}


# ---------------------------------------------------------------------------
# counting bounds


def sidorenko_bound(n: int, k: int, M: int, v: int, e: int) -> Fraction:
    """n^v (M / n^k)^e as an exact rational."""
    return Fraction(n) ** v * Fraction(M, n ** k) ** e


def sidorenko_check(H, host, rel_tol: float = 1e-9) -> dict:
    if isinstance(host, Hypergraph):
        host = HostProfile(host)
    pattern, _ = pattern_order(H)
    homs = count_homs(pattern, host.X)
    bound = sidorenko_bound(host.n, host.k, host.M, pattern.n, pattern.n_edges)
    return {
        "hom_count": homs,
        "bound": str(bound),
        "bound_float": float(bound),
        "pass": homs >= bound * (1 - Fraction(rel_tol)),
    }


def intersection_bound(host: HostProfile, size: int) -> Fraction:
    """n^(r-1) (|G|^2 - (2k-1)|G| + k(k-1)) / 2 with n^r = n^k / M, exact."""
    k = host.k
    poly = size * size - (2 * k - 1) * size + k * (k - 1)
    return Fraction(host.n ** (k - 1) * poly, 2 * host.M)


def noninjective_mass(H, host) -> dict:
    table = build_mu(H, host)
    host = table.host
    L = table.common
    bad = sum(L // d for h, d in table.den.items() if len(set(h)) < len(h))
    mass = Fraction(bad, L)
    pattern = table.pattern
    bound = intersection_bound(host, pattern.n)
    inj = count_inj(pattern, host.X)
    base = sidorenko_bound(host.n, host.k, host.M, pattern.n, pattern.n_edges)
    target = base * (1 - bound)
    return {
        "mass": str(mass),
        "mass_float": float(mass),
        "bound": str(bound),
        "bound_float": float(bound),
        "pass": mass <= bound,
        "inj_count": inj,
        "inj_target": str(target),
        "inj_target_float": float(target),
        # only meaningful when the target is positive
        "inj_holds": None if target <= 0 else inj >= target,
    }


# ---------------------------------------------------------------------------
# many root-sharing copies force a power member


def copy_threshold(p: int, a: int) -> int:
    """p' = ((p-1)a)! / ((p-2)a)! + 1."""
    if p < 2:
        raise ValueError("p must be at least 2")
    return factorial((p - 1) * a) // factorial((p - 2) * a) + 1


def density_threshold(p: int, tree: TreeParams, n: int) -> float:
    """Edge count (2p')^(1/b) n^(k - a/b) above which the averaging argument applies."""
    pp = copy_threshold(p, tree.a)
    return (2 * pp) ** (1 / tree.b) * n ** (tree.k - tree.a / tree.b)


def _union_member(T: RootedTree, X: Hypergraph, root_img: tuple[int, ...], copies: Iterable[tuple[int, ...]]):
    edges = set()
    for img in copies:
        for e in T.graph.edges:
            edges.add(tuple(sorted(img[v] for v in e)))
    verts = list(root_img) + sorted({v for e in edges for v in e} - set(root_img))
    ix = {v: i for i, v in enumerate(verts)}
    g = Hypergraph(X.k, len(verts), tuple(tuple(ix[v] for v in e) for e in edges))
    return RootedGraph(g, tuple(range(len(root_img)))), verts


def find_power_copy(X: Hypergraph, tree: TreeParams, p: int):
    """Look for a subgraph of X in the exact p-th power of the tree.

    Copies of the tree are grouped by root image; a group with at least p'
    distinct copies is unioned one copy at a time and the first union whose
    fewest-copies cover is exactly p is returned (as ``(roots, edges)`` in X's
    labels).  Adding a copy raises that cover number by at most one, so this
    is the same as adding everything and peeling copies off last-in first-out.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    T = build_tree(tree)
    need = copy_threshold(p, tree.a)
    groups: dict[tuple[int, ...], list] = {}
    seen: dict[tuple[int, ...], set] = {}
    for img in enumerate_inj(T.graph, X):
        r = tuple(img[v] for v in T.roots)
        es = frozenset(tuple(sorted(img[v] for v in e)) for e in T.graph.edges)
        if es in seen.setdefault(r, set()):
            continue
        seen[r].add(es)
        groups.setdefault(r, []).append(img)
    for r in sorted(groups):
        copies = groups[r]
        if len(copies) < need:
            continue
        for j in range(p, len(copies) + 1):
            H, verts = _union_member(T, X, r, copies[:j])
            tag = minimal_cover(T, H, cap=p)
            if tag == p:
                return {
                    "roots": list(r),
                    "edges": [[verts[v] for v in e] for e in H.graph.edges],
                    "copies_used": j,
                    "group_size": len(copies),
                    "tag": tag,
                }
    return None


__all__ = [
    "DistributionError", "HostProfile", "WeightedHomTable", "adjacent_tuples", "build_mu",
    "copy_threshold", "density_threshold", "edge_entropy", "entropy_D", "entropy_D_factorized",
    "find_build_order", "find_power_copy", "intersection_bound", "marginal", "noninjective_mass",
    "pattern_order", "sidorenko_bound", "sidorenko_check", "verify_entropy_bound", "verify_marginals",
]
