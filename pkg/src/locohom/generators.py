"""Instance generators: the 3-partition reduction pair, the triangle/path
partition reductions, random graphs with a planted deletion set, and the
structural verifier for generated reduction pairs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .graphs import (
    Graph,
    connected_components,
    drm_equal,
    equitable_partition_drm,
    find_c_deletion_set,
)


def _star_block_ids(m3: int, b: int) -> dict:
    """Vertex layout for the guest/host of the 3-partition reduction.

    Stars come first (centre, then leaves), then the p/q blocks (p before q,
    indexed by star then leaf), then the apex vertices.
    """
    ids = {}
    nxt = 0
    for i in range(m3):
        ids[("c", i)] = nxt
        nxt += 1
        for j in range(b):
            ids[("u", i, j)] = nxt
            nxt += 1
    for i in range(m3):
        for j in range(b):
            ids[("p", i, j)] = nxt
            ids[("q", i, j)] = nxt + 1
            nxt += 2
    return ids


def gen_3partition_reduction(a: Sequence[int], b: int) -> tuple[Graph, Graph]:
    """The reduction pair (G, H) for a 3-partition instance (A, b).

    Guest: per element a_i a star K_{1,b} whose leaves each carry a pendant
    pair p, q; apex x picks up the first a_i of each p/q row, apexes y and z
    split the rest.  Host: m stars with p/q pairs and a single apex.
    """
    if len(a) % 3 != 0 or len(a) == 0:
        raise ValueError("element count must be a positive multiple of 3")
    m = len(a) // 3
    for x in a:
        if not (b / 4 < x):
            raise ValueError(f"element {x} violates a_i > b/4")
        if not (x < b / 2):
            raise ValueError(f"element {x} violates a_i < b/2")
    if sum(a) != m * b:
        raise ValueError(f"element sum {sum(a)} differs from m*b = {m * b}")

    m3 = 3 * m
    gid = _star_block_ids(m3, b)
    n_g = m3 * (1 + b) + 2 * m3 * b
    x_id, y_id, z_id = n_g, n_g + 1, n_g + 2
    edges = []
    for i in range(m3):
        for j in range(b):
            edges.append((gid[("c", i)], gid[("u", i, j)]))
            edges.append((gid[("u", i, j)], gid[("p", i, j)]))
            edges.append((gid[("u", i, j)], gid[("q", i, j)]))
            if j < a[i]:
                edges.append((x_id, gid[("p", i, j)]))
                edges.append((x_id, gid[("q", i, j)]))
            else:
                edges.append((y_id, gid[("p", i, j)]))
                edges.append((z_id, gid[("q", i, j)]))
    guest = Graph.from_edges(n_g + 3, edges)

    hid = _star_block_ids(m, b)
    n_h = m * (1 + b) + 2 * m * b
    xt_id = n_h
    hedges = []
    for i in range(m):
        for j in range(b):
            hedges.append((hid[("c", i)], hid[("u", i, j)]))
            hedges.append((hid[("u", i, j)], hid[("p", i, j)]))
            hedges.append((hid[("u", i, j)], hid[("q", i, j)]))
            hedges.append((xt_id, hid[("p", i, j)]))
            hedges.append((xt_id, hid[("q", i, j)]))
    host = Graph.from_edges(n_h + 1, hedges)
    return guest, host


def three_partition(a: Sequence[int], b: int) -> Optional[list[tuple[int, ...]]]:
    """Exhaustive 3-partition: index triples each summing to b, or None."""
    m = len(a) // 3
    idx = list(range(len(a)))

    def rec(remaining: list[int], acc: list[tuple[int, ...]]) -> Optional[list[tuple[int, ...]]]:
        if not remaining:
            return acc
        first = remaining[0]
        rest = remaining[1:]
        for i in range(len(rest)):
            for j in range(i + 1, len(rest)):
                tri = (first, rest[i], rest[j])
                if a[first] + a[rest[i]] + a[rest[j]] == b:
                    nxt = [x for x in rest if x not in tri]
                    res = rec(nxt, acc + [tri])
                    if res is not None:
                        return res
        return None

    if len(a) != 3 * m or sum(a) != m * b:
        return None
    return rec(idx, [])


def known_lbhom_witness(a: Sequence[int], b: int) -> Optional[list[int]]:
    """The locally bijective witness derived from a 3-partition, if one exists.

    Triples map their stars onto one host star with cyclic leaf offsets, so
    the x-attached leaves of the three stars cover disjoint slot ranges; the
    two non-x pendant pairs of each slot swap their p/q images.
    """
    tri = three_partition(a, b)
    if tri is None:
        return None
    m = len(a) // 3
    m3 = 3 * m
    gid = _star_block_ids(m3, b)
    hid = _star_block_ids(m, b)
    n_g = m3 * (1 + b) + 2 * m3 * b
    x_id, y_id, z_id = n_g, n_g + 1, n_g + 2
    n_h = m * (1 + b) + 2 * m * b
    xt_id = n_h

    phi = [0] * (n_g + 3)
    phi[x_id] = phi[y_id] = phi[z_id] = xt_id
    slot_preimages: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for t_idx, triple in enumerate(tri):
        offset = 0
        for star in triple:
            phi[gid[("c", star)]] = hid[("c", t_idx)]
            for j in range(b):
                slot = (offset + j) % b
                phi[gid[("u", star, j)]] = hid[("u", t_idx, slot)]
                if j < a[star]:
                    # x-attached pendant pair keeps its orientation
                    phi[gid[("p", star, j)]] = hid[("p", t_idx, slot)]
                    phi[gid[("q", star, j)]] = hid[("q", t_idx, slot)]
                else:
                    slot_preimages.setdefault((t_idx, slot), []).append((star, j))
            offset += a[star]
    for (t_idx, slot), pre in slot_preimages.items():
        pre.sort()
        assert len(pre) == 2
        (s1, j1), (s2, j2) = pre
        phi[gid[("p", s1, j1)]] = hid[("p", t_idx, slot)]
        phi[gid[("q", s1, j1)]] = hid[("q", t_idx, slot)]
        phi[gid[("p", s2, j2)]] = hid[("q", t_idx, slot)]
        phi[gid[("q", s2, j2)]] = hid[("p", t_idx, slot)]
    return phi


def gen_hprime_partition_reduction(
    g_prime: Graph,
    variant: str,
    k: int,
) -> tuple[Graph, Graph]:
    """Reduction from H'-partition (H' in {P3, K3}) to LIHom.

    K3 variant: guest is n disjoint triangles plus k universal vertices, host
    is the input plus k universal vertices.  P3 variant (k >= 2): the
    a/b/c/d gadget rows with a clique replacing the first apex.
    """
    if g_prime.n % 3 != 0 or g_prime.n == 0:
        raise ValueError("input graph order must be a positive multiple of 3")
    n = g_prime.n // 3
    if variant == "k3":
        if k < 1:
            raise ValueError("K3 variant needs k >= 1")
        gedges = []
        for t in range(n):
            base = 3 * t
            gedges += [(base, base + 1), (base, base + 2), (base + 1, base + 2)]
        uni = list(range(3 * n, 3 * n + k))
        for u in uni:
            for v in range(3 * n):
                gedges.append((u, v))
            for w in uni:
                if w > u:
                    gedges.append((u, w))
        guest = Graph.from_edges(3 * n + k, gedges)
        hedges = [(u, v) for u, v in g_prime.edges]
        huni = list(range(g_prime.n, g_prime.n + k))
        for u in huni:
            for v in range(g_prime.n):
                hedges.append((u, v))
            for w in huni:
                if w > u:
                    hedges.append((u, w))
        host = Graph.from_edges(g_prime.n + k, hedges)
        return guest, host
    if variant == "p3":
        if k < 2:
            raise ValueError("P3 variant needs k >= 2")
        # rows a_i b_i c_i d_i; clique K of size k-1 replaces the first apex
        clique = list(range(4 * n, 4 * n + k - 1))
        v_apex = 4 * n + k - 1
        gedges = []
        for i in range(n):
            a_i, b_i, c_i, d_i = 4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3
            gedges += [(a_i, b_i), (c_i, d_i)]
            for u in clique:
                gedges += [(u, a_i), (u, b_i), (u, d_i)]
            gedges += [(v_apex, a_i), (v_apex, c_i), (v_apex, d_i)]
        for i, u in enumerate(clique):
            for w in clique[i + 1:]:
                gedges.append((u, w))
            gedges.append((u, v_apex))
        guest = Graph.from_edges(4 * n + k, gedges)
        hedges = [(u, v) for u, v in g_prime.edges]
        huni = list(range(g_prime.n, g_prime.n + k))
        for u in huni:
            for v in range(g_prime.n):
                hedges.append((u, v))
            for w in huni:
                if w > u:
                    hedges.append((u, w))
        host = Graph.from_edges(g_prime.n + k, hedges)
        return guest, host
    raise ValueError(f"unknown variant {variant!r}")


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return state, z ^ (z >> 31)


class CounterRng:
    """Tiny counter-based generator so outputs are stable across platforms."""

    def __init__(self, seed: int) -> None:
        self.state = seed & 0xFFFFFFFFFFFFFFFF

    def next(self, bound: int) -> int:
        self.state, z = _splitmix64(self.state)
        return z % bound


def gen_random_bounded_fracture(n: int, k: int, c: int, seed: int) -> Graph:
    """Connected loopless graph with a planted c-deletion set of size <= k.

    k hub vertices (joined into a path plus random chords) carry attached
    components of at most c vertices each.
    """
    if n < k:
        raise ValueError("need n >= k")
    if c < 1 or k < 0:
        raise ValueError("need c >= 1 and k >= 0")
    if k == 0 and n > c:
        raise ValueError("k = 0 requires n <= c")
    rng = CounterRng(seed)
    edges: list[tuple[int, int]] = []
    if k == 0:
        # one small component; random spanning tree plus chords
        for v in range(1, n):
            edges.append((rng.next(v), v))
        for _ in range(n):
            u, v = rng.next(n), rng.next(n)
            if u != v:
                edges.append((min(u, v), max(u, v)))
        return Graph.from_edges(n, edges)
    hubs = list(range(k))
    for i in range(1, k):
        edges.append((i - 1, i))
    for _ in range(k):
        u, v = rng.next(k), rng.next(k)
        if u != v:
            edges.append((min(u, v), max(u, v)))
    v = k
    while v < n:
        size = 1 + rng.next(min(c, n - v))
        comp = list(range(v, v + size))
        for i in range(1, size):
            edges.append((comp[rng.next(i)], comp[i]))
        edges.append((hubs[rng.next(k)], comp[0]))
        if size > 1 and rng.next(2):
            edges.append((hubs[rng.next(k)], comp[rng.next(size)]))
        v += size
    return Graph.from_edges(n, edges)


@dataclass
class ReductionReport:
    passed: bool
    failures: list[str] = field(default_factory=list)


def verify_reduction_invariants(g: Graph, h: Graph) -> ReductionReport:
    """Structural checks for a generated 3-partition pair.

    Size ratio 3:1, equal degree refinement matrices, and the feedback vertex
    properties: dropping the guest's three apexes or the host's apex leaves a
    forest.
    """
    failures = []
    if g.n != 3 * h.n:
        failures.append(f"size ratio: |V(G)| = {g.n} but 3|V(H)| = {3 * h.n}")
    try:
        drm_g = equitable_partition_drm(g)
        drm_h = equitable_partition_drm(h)
        if not drm_equal(drm_g, drm_h):
            failures.append(
                "degree refinement matrices differ: "
                f"G has {drm_g.matrix} with block sizes {[len(b) for b in drm_g.blocks]}, "
                f"H has {drm_h.matrix} with block sizes {[len(b) for b in drm_h.blocks]}"
            )
    except Exception as exc:  # disconnected or empty inputs
        failures.append(f"degree refinement failed: {exc}")
    if g.n >= 3 and not _is_forest_without(g, {g.n - 3, g.n - 2, g.n - 1}):
        failures.append("guest minus its three apex vertices is not a forest")
    if h.n >= 1 and not _is_forest_without(h, {h.n - 1}):
        failures.append("host minus its apex vertex is not a forest")
    return ReductionReport(not failures, failures)


def _is_forest_without(g: Graph, removed: set[int]) -> bool:
    verts = [v for v in range(g.n) if v not in removed]
    sub, _ = g.induced(verts)
    comps = connected_components(sub)
    return len(sub.edges) == sub.n - len(comps)
