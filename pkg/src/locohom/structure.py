"""Extensions of a base graph, pinned isomorphism, types and type-counts.

An extension is a graph containing a distinguished base as an induced
subgraph; by convention the base occupies vertex ids 0..b-1 (for extensions
carved out of a bigger graph, in ascending order of the original ids).  Two
extensions of the same base are equivalent when an isomorphism between them
fixes every base vertex; types are the equivalence classes of simple
extensions (one attached component).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .graphs import BudgetExceededError, Graph, connected_components

CanonicalKey = tuple


@dataclass(frozen=True)
class Extension:
    """A graph with a pinned base on vertex ids 0..base_size-1.

    ``origin`` optionally records, per extension vertex, the vertex of the
    source graph it was carved from.
    """

    graph: Graph
    base_size: int
    origin: Optional[tuple[int, ...]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not (0 <= self.base_size <= self.graph.n):
            raise ValueError("base size out of range")

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(range(self.base_size))

    def components(self) -> list[frozenset[int]]:
        """Components of the extension minus its base, by minimum vertex id."""
        rest = [v for v in range(self.graph.n) if v >= self.base_size]
        seen: set[int] = set()
        comps = []
        for start in rest:
            if start in seen:
                continue
            stack = [start]
            comp = set()
            seen.add(start)
            while stack:
                v = stack.pop()
                comp.add(v)
                for w in self.graph.adj[v]:
                    if w >= self.base_size and w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(frozenset(comp))
        return sorted(comps, key=min)

    def is_simple(self) -> bool:
        return len(self.components()) == 1


def extension_from(g: Graph, base: Iterable[int], comps: Iterable[Iterable[int]]) -> Extension:
    """Carve the extension induced by base plus the given components out of g."""
    base_sorted = sorted(set(base))
    rest = sorted({v for comp in comps for v in comp})
    if set(base_sorted) & set(rest):
        raise ValueError("components must be disjoint from the base")
    order = base_sorted + rest
    pos = {v: i for i, v in enumerate(order)}
    pairs = [(pos[u], pos[v]) for u, v in g.edges if u in pos and v in pos]
    return Extension(
        Graph.from_edges(len(order), pairs, g.allows_loops),
        len(base_sorted),
        origin=tuple(order),
    )


def _refine_colours(g: Graph, base_size: int, colour: dict[int, int]) -> dict[int, int]:
    """Colour refinement over non-base vertices; base vertices keep fixed ids."""
    verts = sorted(colour)
    while True:
        interned: dict[int, tuple] = {}
        for v in verts:
            nbr = []
            for w in g.adj[v]:
                if w < base_size:
                    nbr.append((0, w))
                elif w == v:
                    nbr.append((1, 0))
                else:
                    nbr.append((2, colour[w]))
            nbr.sort()
            interned[v] = (colour[v], tuple(nbr))
        values = sorted(set(interned.values()))
        remap = {s: i for i, s in enumerate(values)}
        nxt = {v: remap[interned[v]] for v in verts}
        if nxt == colour:
            return colour
        colour = nxt


def _encode(g: Graph, base_size: int, order: Sequence[int]) -> tuple:
    """Edge encoding after relabelling non-base vertices by ``order``."""
    pos = {v: base_size + i for i, v in enumerate(order)}
    for b in range(base_size):
        pos[b] = b
    return tuple(sorted((min(pos[u], pos[v]), max(pos[u], pos[v])) for u, v in g.edges))


def _canonical_component_order(g: Graph, base_size: int, verts: list[int]) -> list[int]:
    """Canonical ordering of the non-base vertices.

    Individualization-refinement with the two standard prunes: siblings
    reachable from an already-tried sibling by a discovered automorphism are
    skipped, and a leaf whose encoding equals the current best triggers a
    backjump to the first point where its path diverges from the best path.
    Both prunes only discard subtrees proven isomorphic to explored ones, so
    the minimum encoding is still found.
    """
    if not verts:
        return []
    init = {}
    for v in verts:
        attach = tuple(sorted(w for w in g.adj[v] if w < base_size))
        init[v] = (g.has_loop(v), len(g.adj[v]), attach)
    vals = sorted(set(init.values()))
    remap = {s: i for i, s in enumerate(vals)}
    start = {v: remap[init[v]] for v in verts}

    best_enc: list[Optional[tuple]] = [None]
    best_order: list[Optional[list[int]]] = [None]
    best_path: list[list[int]] = [[]]
    autos: list[dict[int, int]] = []

    def rec(colour: dict[int, int], path: list[int]) -> Optional[int]:
        colour = _refine_colours(g, base_size, colour)
        cells: dict[int, list[int]] = {}
        for v in verts:
            cells.setdefault(colour[v], []).append(v)
        targets = sorted(
            (c for c, vs in cells.items() if len(vs) > 1),
            key=lambda c: (len(cells[c]), c),
        )
        if not targets:
            order = sorted(verts, key=lambda v: colour[v])
            enc = _encode(g, base_size, order)
            if best_enc[0] is None or enc < best_enc[0]:
                best_enc[0] = enc
                best_order[0] = order
                best_path[0] = list(path)
                return None
            if enc == best_enc[0]:
                ref = best_order[0]
                assert ref is not None
                sigma = {order[i]: ref[i] for i in range(len(order))}
                autos.append(sigma)
                bp = best_path[0]
                d = 0
                while d < len(path) and d < len(bp) and path[d] == bp[d]:
                    d += 1
                return d
            return None
        cell = sorted(cells[targets[0]])
        fresh = max(colour.values()) + 1
        tried: list[int] = []
        for v in cell:
            if any(
                all(s.get(x, x) == x for x in path) and s.get(u) == v
                for u in tried
                for s in autos
            ):
                continue
            tried.append(v)
            nxt = dict(colour)
            nxt[v] = fresh
            path.append(v)
            jump = rec(nxt, path)
            path.pop()
            if jump is not None and jump < len(path):
                return jump
        return None

    rec(start, [])
    assert best_order[0] is not None
    return best_order[0]


@lru_cache(maxsize=None)
def _canonical_key_cached(g: Graph, base_size: int) -> tuple[CanonicalKey, Graph]:
    verts = [v for v in range(g.n) if v >= base_size]
    order = _canonical_component_order(g, base_size, verts)
    enc = _encode(g, base_size, order)
    # loop presence is visible in the edge encoding, so the loop FLAG stays
    # out of the key: structurally equal extensions compare equal no matter
    # which file flavour they were parsed from
    key = (base_size, g.n, enc)
    canon = Graph(g.n, frozenset(enc), g.allows_loops or any(u == v for u, v in enc))
    return key, canon


def canonical_form(ext: Extension) -> tuple[CanonicalKey, Extension]:
    """Canonical key and a canonically labelled copy (base fixed pointwise)."""
    key, canon = _canonical_key_cached(ext.graph, ext.base_size)
    return key, Extension(canon, ext.base_size)


@dataclass(frozen=True, eq=False)
class TypeClass:
    """Equivalence class of simple extensions under pinned isomorphism."""

    key: CanonicalKey
    rep: Extension

    @property
    def size(self) -> int:
        return self.rep.graph.n

    @property
    def new_size(self) -> int:
        return self.rep.graph.n - self.rep.base_size

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TypeClass) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:  # terse: the attached component's size
        return f"TypeClass(base={self.rep.base_size}, new={self.new_size})"


def type_of(ext: Extension) -> TypeClass:
    key, canon = canonical_form(ext)
    return TypeClass(key, canon)


def _base_signature(ext: Extension) -> tuple:
    b = ext.base_size
    return (b, tuple(sorted((u, v) for u, v in ext.graph.edges if u < b and v < b)))


def pinned_isomorphic(e1: Extension, e2: Extension) -> bool:
    """True iff an isomorphism fixing every base vertex maps e1 to e2."""
    if _base_signature(e1) != _base_signature(e2):
        raise ValueError("base mismatch: extensions do not share the same base")
    if e1.graph.n != e2.graph.n:
        return False
    return canonical_form(e1)[0] == canonical_form(e2)[0]


def type_census(g: Graph, d: Iterable[int]) -> list[tuple[TypeClass, list[frozenset[int]]]]:
    """Types of the components of g - d, with their concrete components.

    Entries are sorted by canonical key; component lists by minimum vertex.
    """
    dset = sorted(set(d))
    groups: dict[TypeClass, list[frozenset[int]]] = {}
    seen: set[int] = set(dset)
    for start in range(g.n):
        if start in seen:
            continue
        stack = [start]
        comp = {start}
        seen.add(start)
        while stack:
            v = stack.pop()
            for w in g.adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        t = type_of(extension_from(g, dset, [comp]))
        groups.setdefault(t, []).append(frozenset(comp))
    out = [(t, sorted(comps, key=min)) for t, comps in groups.items()]
    out.sort(key=lambda item: item[0].key)
    return out


def compute_types(g: Graph, d: Iterable[int]) -> tuple[list[TypeClass], dict[TypeClass, int]]:
    """Distinct component types of g - d and the full type-count census."""
    census = type_census(g, d)
    return [t for t, _ in census], {t: len(comps) for t, comps in census}


def enumerate_abstract_types(
    d: Graph,
    c: int,
    allow_loops: bool,
    budget: int = 2_000_000,
) -> list[TypeClass]:
    """All simple-extension types of d with at most c new vertices.

    New vertices may carry self-loops iff ``allow_loops``; the attached
    component must be connected.  Raises BudgetExceededError when the raw
    enumeration would exceed ``budget`` labelled candidates.
    """
    b = d.n
    total = 0
    for t in range(1, c + 1):
        cand = (2 ** (t * (t - 1) // 2)) * (2 ** (b * t))
        if allow_loops:
            cand *= 2 ** t
        total += cand
        if total > budget:
            raise BudgetExceededError(
                f"abstract type enumeration for |D|={b}, c={c} exceeds budget"
            )
    seen: set[CanonicalKey] = set()
    out: list[TypeClass] = []
    base_pairs = [(u, v) for u, v in d.edges]
    for t in range(1, c + 1):
        new_ids = list(range(b, b + t))
        inner_pairs = list(itertools.combinations(new_ids, 2))
        loop_choices = list(itertools.product([False, True], repeat=t)) if allow_loops else [(False,) * t]
        for inner_mask in itertools.product([False, True], repeat=len(inner_pairs)):
            inner = [p for p, keep in zip(inner_pairs, inner_mask) if keep]
            if not _connected_on(new_ids, inner):
                continue
            for attach in itertools.product(range(2 ** b), repeat=t):
                cross = [
                    (base_v, new_ids[i])
                    for i in range(t)
                    for base_v in range(b)
                    if attach[i] >> base_v & 1
                ]
                for loops in loop_choices:
                    pairs = list(base_pairs) + inner + cross
                    pairs += [(new_ids[i], new_ids[i]) for i in range(t) if loops[i]]
                    ext = Extension(
                        Graph.from_edges(b + t, pairs, allows_loops=d.allows_loops or allow_loops),
                        b,
                    )
                    key, canon = canonical_form(ext)
                    if key not in seen:
                        seen.add(key)
                        out.append(TypeClass(key, canon))
    out.sort(key=lambda t: t.key)
    return out


def _connected_on(verts: list[int], pairs: list[tuple[int, int]]) -> bool:
    if len(verts) <= 1:
        return True
    adj: dict[int, set[int]] = {v: set() for v in verts}
    for u, v in pairs:
        adj[u].add(v)
        adj[v].add(u)
    seen = {verts[0]}
    stack = [verts[0]]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(verts)


def sub_extension_vectors(
    counts: Sequence[int],
    max_components: int,
) -> list[tuple[int, ...]]:
    """All vectors v <= counts with sum(v) <= max_components, ascending by size."""
    ranges = [range(c + 1) for c in counts]
    vecs = [v for v in itertools.product(*ranges) if sum(v) <= max_components]
    vecs.sort(key=lambda v: (sum(v), v))
    return vecs


def enumerate_sub_extensions(
    g: Graph,
    d: Iterable[int],
    max_components: int,
) -> list[Extension]:
    """One representative extension per type-count vector below the census.

    Includes the empty extension; callers filter it through the mapping test.
    """
    dset = sorted(set(d))
    census = type_census(g, dset)
    counts = [len(comps) for _, comps in census]
    out = []
    for vec in sub_extension_vectors(counts, max_components):
        comps: list[frozenset[int]] = []
        for (_, available), take in zip(census, vec):
            comps.extend(available[:take])
        out.append(extension_from(g, dset, comps))
    return out
