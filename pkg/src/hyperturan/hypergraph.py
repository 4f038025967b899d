"""k-uniform hypergraphs, canonical forms and homomorphism enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping, Sequence

CANONICAL_LIMIT = 10


class HypergraphError(ValueError):
    pass


class SizeLimitError(HypergraphError):
    pass


@dataclass(frozen=True)
class Hypergraph:
    """A k-uniform hypergraph on vertices ``0..n-1``.

    Edges are normalised on construction: each edge becomes a sorted tuple,
    duplicates are dropped and the edge list is sorted lexicographically.
    ``partition`` optionally labels every vertex with a part in ``[0, k)``;
    when present every edge must be rainbow with respect to it.
    """

    k: int
    n: int
    edges: tuple[tuple[int, ...], ...] = ()
    partition: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.k < 2:
            raise HypergraphError(f"arity must be at least 2, got {self.k}")
        if self.n < 0:
            raise HypergraphError(f"negative vertex count {self.n}")
        norm = set()
        for e in self.edges:
            t = tuple(sorted(int(v) for v in e))
            if len(t) != self.k or len(set(t)) != self.k:
                raise HypergraphError(f"edge {tuple(e)} is not a set of {self.k} distinct vertices")
            if t[0] < 0 or t[-1] >= self.n:
                raise HypergraphError(f"edge {t} has a vertex outside [0, {self.n})")
            norm.add(t)
        object.__setattr__(self, "edges", tuple(sorted(norm)))
        if self.partition is not None:
            part = tuple(int(p) for p in self.partition)
            if len(part) != self.n:
                raise HypergraphError("partition must label every vertex")
            if any(p < 0 or p >= self.k for p in part):
                raise HypergraphError(f"partition labels must lie in [0, {self.k})")
            for e in self.edges:
                if len({part[v] for v in e}) != self.k:
                    raise HypergraphError(f"edge {e} does not meet every part exactly once")
            object.__setattr__(self, "partition", part)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.edges)

    @cached_property
    def incidence(self) -> list[int]:
        # per-vertex bitset over edge indices
        inc = [0] * self.n
        for i, e in enumerate(self.edges):
            for v in e:
                inc[v] |= 1 << i
        return inc

    @cached_property
    def link(self) -> dict[frozenset, list[int]]:
        """Map each (k-1)-set lying inside an edge to the vertices completing it."""
        out: dict[frozenset, list[int]] = {}
        for e in self.edges:
            for v in e:
                out.setdefault(frozenset(u for u in e if u != v), []).append(v)
        return out

    def degree(self, v: int) -> int:
        return self.incidence[v].bit_count()

    def codegree(self, vertices) -> int:
        """Number of edges containing every vertex of ``vertices``."""
        vs = set(vertices)
        if len(vs) == self.k - 1:
            return len(self.link.get(frozenset(vs), ()))
        mask = (1 << len(self.edges)) - 1
        for v in vs:
            mask &= self.incidence[v]
        return mask.bit_count()

    def has_edge(self, vertices) -> bool:
        return tuple(sorted(vertices)) in self.edge_set

    def with_edges(self, edges) -> "Hypergraph":
        return Hypergraph(self.k, self.n, tuple(self.edges) + tuple(edges), self.partition)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "edges": [list(e) for e in self.edges],
            "partition": list(self.partition) if self.partition is not None else None,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Hypergraph":
        try:
            return cls(
                int(data["k"]),
                int(data["n"]),
                tuple(tuple(e) for e in data["edges"]),
                data.get("partition"),
            )
        except KeyError as exc:
            raise HypergraphError(f"hypergraph JSON is missing field {exc}") from None


def ordered_edges(X: Hypergraph) -> Iterator[tuple[int, ...]]:
    for e in X.edges:
        yield from itertools.permutations(e)


# ---------------------------------------------------------------------------
# canonical forms


def _refine(G: Hypergraph, colors: list) -> list[int]:
    inc_edges: list[list[tuple[int, ...]]] = [[] for _ in range(G.n)]
    for e in G.edges:
        for v in e:
            inc_edges[v].append(e)
    ranks = _rank(colors)
    while True:
        sigs = []
        for v in range(G.n):
            nb = sorted(tuple(sorted(ranks[u] for u in e if u != v)) for e in inc_edges[v])
            sigs.append((ranks[v], tuple(nb)))
        new = _rank(sigs)
        if len(set(new)) == len(set(ranks)):
            return new
        ranks = new


def _rank(values: Sequence) -> list[int]:
    order = {val: i for i, val in enumerate(sorted(set(values)))}
    return [order[val] for val in values]


def canonical_form(G: Hypergraph, colors: Sequence[int] | None = None,
                   limit: int = CANONICAL_LIMIT) -> bytes:
    """Return a byte string that is equal for two hypergraphs iff they are isomorphic.

    ``colors`` restricts the admissible isomorphisms to colour-preserving ones;
    giving each root its own colour yields isomorphism classes that fix the
    roots pointwise.
    """
    if G.n > limit:
        raise SizeLimitError(
            f"canonical_form supports at most {limit} vertices (got {G.n}); raise the limit explicitly"
        )
    base = list(colors) if colors is not None else [0] * G.n
    if len(base) != G.n:
        raise HypergraphError("colors must have one entry per vertex")
    refined = _refine(G, base)
    classes: dict[int, list[int]] = {}
    for v, c in enumerate(refined):
        classes.setdefault(c, []).append(v)
    blocks = [classes[c] for c in sorted(classes)]
    offsets = list(itertools.accumulate([0] + [len(b) for b in blocks]))

    best = None
    for perms in itertools.product(*(itertools.permutations(b) for b in blocks)):
        label = [0] * G.n
        for off, perm in zip(offsets, perms):
            for i, v in enumerate(perm):
                label[v] = off + i
        enc = tuple(sorted(tuple(sorted(label[v] for v in e)) for e in G.edges))
        if best is None or enc < best:
            best = enc
    color_seq = [base[blocks_v] for block in blocks for blocks_v in block]
    text = "k={};n={};c={};e={}".format(
        G.k, G.n, ",".join(map(str, color_seq)),
        ",".join("-".join(map(str, e)) for e in best or ()),
    )
    return text.encode()


# ---------------------------------------------------------------------------
# homomorphism search


class _Plan:
    __slots__ = ("order", "guides", "checks")

    def __init__(self, order, guides, checks):
        self.order = order
        self.guides = guides
        self.checks = checks


def _make_plan(H: Hypergraph, fixed: Sequence[int]) -> _Plan:
    placed_at: dict[int, int] = {}
    order: list[int] = []
    for v in fixed:
        placed_at[v] = len(order)
        order.append(v)
    inc: list[list[tuple[int, ...]]] = [[] for _ in range(H.n)]
    for e in H.edges:
        for v in e:
            inc[v].append(e)
    while len(order) < H.n:
        best, best_score = None, -1
        for v in range(H.n):
            if v in placed_at:
                continue
            score = max((sum(u in placed_at for u in e) for e in inc[v]), default=0)
            if score > best_score:
                best, best_score = v, score
        placed_at[best] = len(order)
        order.append(best)

    guides: list[tuple[int, ...]] = []
    checks: list[list[tuple[int, ...]]] = []
    for pos, v in enumerate(order):
        guide: tuple[int, ...] = ()
        for e in inc[v]:
            before = tuple(u for u in e if u != v and placed_at[u] < pos)
            if len(before) > len(guide):
                guide = before
        guides.append(guide)
        checks.append([e for e in inc[v] if max(placed_at[u] for u in e) == pos])
    return _Plan(order, guides, checks)


def _candidates(X: Hypergraph, guide_imgs: list[int]) -> list[int] | range:
    if not guide_imgs:
        return range(X.n)
    if len(set(guide_imgs)) != len(guide_imgs):
        return []
    if len(guide_imgs) == X.k - 1:
        return X.link.get(frozenset(guide_imgs), [])
    mask = (1 << len(X.edges)) - 1
    for w in guide_imgs:
        mask &= X.incidence[w]
    out = set()
    while mask:
        low = mask & -mask
        out.update(X.edges[low.bit_length() - 1])
        mask ^= low
    out.difference_update(guide_imgs)
    return sorted(out)


def _search(H: Hypergraph, X: Hypergraph, root_constraint, injective: bool, count_only: bool):
    if H.k != X.k:
        raise HypergraphError(f"arity mismatch: pattern k={H.k}, host k={X.k}")
    fixed = dict(root_constraint or {})
    for v, w in fixed.items():
        if not (0 <= v < H.n):
            raise HypergraphError(f"constrained pattern vertex {v} out of range")
        if not (0 <= w < X.n):
            raise HypergraphError(f"constraint image {w} out of range")
    use_parts = H.partition is not None and X.partition is not None
    plan = _make_plan(H, list(fixed))
    n_fixed = len(fixed)
    img = [-1] * H.n
    used: dict[int, int] = {}

    def ok(v: int, w: int, pos: int) -> bool:
        if use_parts and H.partition[v] != X.partition[w]:
            return False
        if injective and used.get(w):
            return False
        img[v] = w
        for e in plan.checks[pos]:
            if tuple(sorted(img[u] for u in e)) not in X.edge_set:
                return False
        return True

    def place(v, w):
        img[v] = w
        used[w] = used.get(w, 0) + 1

    def unplace(v, w):
        used[w] -= 1
        img[v] = -1

    # fixed prefix
    for pos in range(n_fixed):
        v = plan.order[pos]
        w = fixed[v]
        if not ok(v, w, pos):
            return 0 if count_only else iter(())
        place(v, w)

    if count_only:
        def count(pos: int) -> int:
            if pos == H.n:
                return 1
            v = plan.order[pos]
            total = 0
            for w in _candidates(X, [img[u] for u in plan.guides[pos]]):
                if ok(v, w, pos):
                    place(v, w)
                    total += count(pos + 1)
                    unplace(v, w)
                else:
                    img[v] = -1
            return total

        return count(n_fixed)

    def gen(pos: int):
        if pos == H.n:
            yield tuple(img)
            return
        v = plan.order[pos]
        for w in _candidates(X, [img[u] for u in plan.guides[pos]]):
            if ok(v, w, pos):
                place(v, w)
                yield from gen(pos + 1)
                unplace(v, w)
            else:
                img[v] = -1

    return gen(n_fixed)


def enumerate_homs(H: Hypergraph, X: Hypergraph,
                   root_constraint: Mapping[int, int] | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every homomorphism H -> X extending ``root_constraint``.

    A homomorphism is returned as the tuple of images indexed by pattern vertex.
    """
    return _search(H, X, root_constraint, injective=False, count_only=False)


def enumerate_inj(H: Hypergraph, X: Hypergraph,
                  root_constraint: Mapping[int, int] | None = None) -> Iterator[tuple[int, ...]]:
    return _search(H, X, root_constraint, injective=True, count_only=False)


def count_homs(H: Hypergraph, X: Hypergraph, root_constraint=None) -> int:
    return _search(H, X, root_constraint, injective=False, count_only=True)


def count_inj(H: Hypergraph, X: Hypergraph, root_constraint=None) -> int:
    return _search(H, X, root_constraint, injective=True, count_only=True)


def is_homomorphism(H: Hypergraph, X: Hypergraph, image: Sequence[int]) -> bool:
    return all(tuple(sorted(image[v] for v in e)) in X.edge_set for e in H.edges)


def contains_any(X: Hypergraph, family: Sequence[Hypergraph]):
    """Return ``(True, (index, witness))`` if X contains some member, else ``(False, None)``."""
    for i, F in enumerate(family):
        if F.k != X.k:
            raise HypergraphError(f"arity mismatch: family member k={F.k}, host k={X.k}")
        if F.n > X.n or F.n_edges > X.n_edges:
            continue
        for w in enumerate_inj(F, X):
            return True, (i, w)
    return False, None


def contains_using_edge(X: Hypergraph, family: Sequence[Hypergraph], edge: Sequence[int]) -> bool:
    """True iff some member embeds into X with one of its edges mapped onto ``edge``.

    Used for incremental freeness checks: if X minus ``edge`` is free, X is
    free iff this returns False.
    """
    edge = tuple(edge)
    for F in family:
        if F.n > X.n or F.n_edges > X.n_edges:
            continue
        for f in F.edges:
            for perm in itertools.permutations(edge):
                if _embeds(F, X, dict(zip(f, perm))):
                    return True
    return False


def _embeds(F: Hypergraph, X: Hypergraph, constraint) -> bool:
    for _ in enumerate_inj(F, X, constraint):
        return True
    return False


# ---------------------------------------------------------------------------
# small named graphs used throughout


def single_edge(k: int) -> Hypergraph:
    return Hypergraph(k, k, (tuple(range(k)),))


def path_graph(n_edges: int) -> Hypergraph:
    return Hypergraph(2, n_edges + 1, tuple((i, i + 1) for i in range(n_edges)))


def cherry() -> Hypergraph:
    return Hypergraph(2, 3, ((0, 1), (1, 2)))


def triangle() -> Hypergraph:
    return Hypergraph(2, 3, ((0, 1), (1, 2), (0, 2)))


def star(leaves: int) -> Hypergraph:
    return Hypergraph(2, leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def disjoint_union(*graphs: Hypergraph) -> Hypergraph:
    k = graphs[0].k
    edges, off = [], 0
    for G in graphs:
        edges.extend(tuple(v + off for v in e) for e in G.edges)
        off += G.n
    return Hypergraph(k, off, tuple(edges))
