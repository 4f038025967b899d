"""Lifting l-uniform families to k-uniform ones, sunflowers, and an exact Turán-number oracle.

Lifting a graph F adds the same k-l fresh apex vertices to every edge.  The
lifted family used for the extremal identity also forbids every k-graph with
at most l+2 edges whose common intersection has fewer than k-l vertices
("wrong-form" graphs).  That second part is never listed; it is decided by a
direct search for a small set of edges with a small common intersection.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .hypergraph import Hypergraph, HypergraphError, contains_any, contains_using_edge

DEFAULT_BUDGET = 50_000_000
EXHAUSTIVE_LIMIT = 24


class SearchBudgetError(RuntimeError):
    """Raised when the oracle runs out of nodes; carries the bound pair proven so far."""

    def __init__(self, lower: int, upper: int, nodes: int):
        super().__init__(f"search budget of {nodes} nodes exhausted; ex lies in [{lower}, {upper}]")
        self.lower = lower
        self.upper = upper
        self.nodes = nodes


def lift_member(F: Hypergraph, k: int) -> Hypergraph:
    """Add k-l apex vertices (ids n..n+k-l-1) to every edge of the l-graph F."""
    if k <= F.k:
        raise HypergraphError(f"target arity {k} must exceed the source arity {F.k}")
    apex = tuple(range(F.n, F.n + k - F.k))
    return Hypergraph(k, F.n + len(apex), tuple(tuple(e) + apex for e in F.edges))


def has_disjoint_pair(F: Hypergraph) -> bool:
    return any(not set(e) & set(f) for e, f in itertools.combinations(F.edges, 2))


@dataclass(frozen=True)
class LiftedFamilySpec:
    base_family: tuple[Hypergraph, ...]
    k: int
    l: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "base_family", tuple(self.base_family))
        if not (self.k > self.l >= 2):
            raise HypergraphError(f"need k > l >= 2 (got k={self.k}, l={self.l})")
        for F in self.base_family:
            if F.k != self.l:
                raise HypergraphError(f"base member has arity {F.k}, expected {self.l}")
            if not has_disjoint_pair(F):
                raise HypergraphError("every base member must contain two disjoint edges")

    def lifted(self) -> list[Hypergraph]:
        return [lift_member(F, self.k) for F in self.base_family]


def wrong_form_witness(edges: Sequence[Sequence[int]], k: int, l: int,
                       start: Sequence[int] | None = None) -> tuple | None:
    """At most l+2 edges whose common intersection has fewer than k-l vertices, or None.

    Only edges that strictly shrink the running intersection are ever added;
    any witness contains such a chain, so nothing is missed.  With ``start``
    the search is restricted to witnesses containing that edge.
    """
    sets = [frozenset(e) for e in edges]
    target = k - l
    # intersection -> fewest edges it was reached with and then failed
    seen: dict[frozenset, int] = {}

    def rec(inter: frozenset, used: list[int]):
        if len(inter) < target:
            return tuple(tuple(sorted(sets[i])) for i in used)
        if len(used) == l + 2 or seen.get(inter, l + 3) <= len(used):
            return None
        for i, s in enumerate(sets):
            nxt = inter & s
            if len(nxt) < len(inter):
                w = rec(nxt, used + [i])
                if w is not None:
                    return w
        seen[inter] = len(used)
        return None

    starts = range(len(sets)) if start is None else [sets.index(frozenset(start))]
    for i in starts:
        seen.clear()
        w = rec(sets[i], [i])
        if w is not None:
            return w
    return None


def common_intersection(edges: Sequence[Sequence[int]]) -> frozenset:
    it = iter(edges)
    first = next(it, None)
    if first is None:
        return frozenset()
    out = frozenset(first)
    for e in it:
        out &= frozenset(e)
    return out


def lifted_member_witness(G: Hypergraph, spec: LiftedFamilySpec):
    """A lifted base member inside G, assuming G has no wrong-form subgraph.

    Without wrong-form subgraphs every edge contains the apex set of any lifted
    copy, so the apex set must be the common intersection of all edges.
    """
    if G.n_edges < 2:
        return None
    C = common_intersection(G.edges)
    if len(C) != spec.k - spec.l:
        return None
    residue = Hypergraph(spec.l, G.n, tuple(tuple(v for v in e if v not in C) for e in G.edges))
    found, w = contains_any(residue, spec.base_family)
    return (tuple(sorted(C)), w) if found else None


def lifted_freeness_check(G: Hypergraph, spec: LiftedFamilySpec) -> bool:
    """True iff G contains no member of the lifted family."""
    if G.k != spec.k:
        raise HypergraphError(f"graph arity {G.k} differs from family arity {spec.k}")
    if wrong_form_witness(G.edges, spec.k, spec.l) is not None:
        return False
    return lifted_member_witness(G, spec) is None


# ---------------------------------------------------------------------------
# exact Turán numbers


class Forbidden(Protocol):
    k: int

    def free_after_adding(self, edges: list[tuple[int, ...]], new: tuple[int, ...], n: int) -> bool: ...


@dataclass
class ListFamily:
    """Finitely many forbidden k-graphs."""

    members: Sequence[Hypergraph]
    k: int = field(init=False)

    def __post_init__(self) -> None:
        self.members = list(self.members)
        ks = {F.k for F in self.members}
        if len(ks) > 1:
            raise HypergraphError("family mixes arities")
        if any(F.n_edges == 0 for F in self.members):
            raise HypergraphError("an edgeless member is contained in every graph")
        self.k = ks.pop() if ks else 0

    def free_after_adding(self, edges, new, n) -> bool:
        X = Hypergraph(len(new), n, tuple(edges) + (new,))
        return not contains_using_edge(X, self.members, new)


@dataclass
class LiftedFamily:
    spec: LiftedFamilySpec

    @property
    def k(self) -> int:
        return self.spec.k

    def free_after_adding(self, edges, new, n) -> bool:
        all_edges = list(edges) + [new]
        if wrong_form_witness(all_edges, self.spec.k, self.spec.l, start=new) is not None:
            return False
        G = Hypergraph(self.spec.k, n, tuple(all_edges))
        return lifted_member_witness(G, self.spec) is None


@dataclass
class ExResult:
    n: int
    k: int
    value: int
    witness: list[tuple[int, ...]]
    mode: str
    nodes: int

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "ex": self.value, "witness": [list(e) for e in self.witness],
                "mode": self.mode, "nodes": self.nodes}


def as_forbidden(family, k: int | None) -> Forbidden:
    if isinstance(family, LiftedFamilySpec):
        return LiftedFamily(family)
    if isinstance(family, (ListFamily, LiftedFamily)):
        return family
    fam = ListFamily(list(family))
    if fam.k == 0:
        fam.k = k or 0
    return fam


def exact_ex(n: int, family, k: int | None = None, mode: str = "auto",
             budget: int = DEFAULT_BUDGET) -> ExResult:
    """Maximum edge count of a family-free k-graph on n labelled vertices, with a witness.

    ``family`` is a list of k-graphs, a :class:`LiftedFamilySpec`, or a
    prepared :class:`ListFamily` / :class:`LiftedFamily`.  ``mode`` is
    "exhaustive" (every subset, allowed up to 24 candidate edges),
    "bnb" (prune once the current size plus remaining edges cannot beat the
    best), or "auto".
    """
    fam = as_forbidden(family, k)
    k = fam.k if fam.k else k
    if not k:
        raise HypergraphError("arity unknown: pass k for an empty family")
    if n < 0:
        raise HypergraphError("negative vertex count")
    cand = list(itertools.combinations(range(n), k))
    N = len(cand)
    if mode == "auto":
        mode = "exhaustive" if N <= EXHAUSTIVE_LIMIT else "bnb"
    if mode not in ("exhaustive", "bnb"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exhaustive" and N > EXHAUSTIVE_LIMIT:
        raise HypergraphError(f"exhaustive mode needs C(n,k) <= {EXHAUSTIVE_LIMIT}, got {N}")
    if isinstance(fam, ListFamily) and not fam.members:
        return ExResult(n, k, N, cand, mode, 0)
    if N == 0 or not fam.free_after_adding([], cand[0], n):
        return ExResult(n, k, 0, [], mode, 1)

    prune = mode == "bnb"
    best: list = [0, []]
    nodes = [0]
    chosen: list[tuple[int, ...]] = [cand[0]]

    # every nonempty graph has a relabelling containing the first candidate edge
    def rec(i: int) -> None:
        nodes[0] += 1
        if nodes[0] > budget:
            raise SearchBudgetError(best[0], len(chosen) + N - i, budget)
        if len(chosen) > best[0]:
            best[0], best[1] = len(chosen), list(chosen)
        if i == N:
            return
        if prune and len(chosen) + (N - i) <= best[0]:
            return
        e = cand[i]
        try:
            if fam.free_after_adding(chosen, e, n):
                chosen.append(e)
                try:
                    rec(i + 1)
                finally:
                    chosen.pop()
        except SearchBudgetError as err:
            # the exclude branch is still open
            err.upper = max(err.upper, len(chosen) + N - i - 1)
            raise
        rec(i + 1)

    try:
        rec(1)
    except SearchBudgetError as err:
        err.lower = best[0]
        err.upper = max(err.upper, best[0])
        raise
    return ExResult(n, k, best[0], sorted(best[1]), mode, nodes[0])


def verify_lifting_identity(base_family: Sequence[Hypergraph], k: int, l: int, n_range: Sequence[int],
                  budget: int = DEFAULT_BUDGET) -> dict:
    """ex(n, F) against ex(n + k - l, lifted F) for every n in range."""
    spec = LiftedFamilySpec(tuple(base_family), k, l)
    rows = []
    for n in n_range:
        base = exact_ex(n, ListFamily(spec.base_family), l, budget=budget)
        lifted = exact_ex(n + k - l, spec, k, budget=budget)
        rows.append({
            "n": n, "ex_base": base.value, "n_lifted": n + k - l, "ex_lifted": lifted.value,
            "equal": base.value == lifted.value,
            "nodes": [base.nodes, lifted.nodes],
        })
    return {"k": k, "l": l, "rows": rows, "pass": all(r["equal"] for r in rows)}


# ---------------------------------------------------------------------------
# sunflowers


def build_sunflower(k: int, t: int, n: int) -> Hypergraph:
    """Kernel {0..t-1} plus floor((n-t)/(k-t)) disjoint petals of size k-t."""
    if not (0 <= t <= k - 1):
        raise HypergraphError(f"kernel size must lie in [0, {k - 1}], got {t}")
    if n < k:
        raise HypergraphError(f"need n >= k (got n={n}, k={k})")
    kernel = tuple(range(t))
    w = k - t
    m = (n - t) // w
    edges = tuple(kernel + tuple(range(t + i * w, t + (i + 1) * w)) for i in range(m))
    return Hypergraph(k, n, edges)


def is_sunflower(G: Hypergraph, kernel: Sequence[int]) -> bool:
    S = set(kernel)
    return all(set(e) & set(f) == S for e, f in itertools.combinations(G.edges, 2)) and all(
        S <= set(e) for e in G.edges)


__all__ = [
    "ExResult", "LiftedFamily", "LiftedFamilySpec", "ListFamily", "SearchBudgetError", "build_sunflower",
    "common_intersection", "exact_ex", "is_sunflower", "lift_member", "lifted_freeness_check",
    "lifted_member_witness", "verify_lifting_identity", "wrong_form_witness",
]
