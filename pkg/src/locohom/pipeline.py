"""End-to-end solvers: high-degree deletion sets, partial-homomorphism
enumeration, mapping-set computation, the ILP-backed decision subroutine and
the four top-level problems (LSHom, LBHom, LIHom, Role Assignment)."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .dp import DpStats, exists_augmenting_hom
from .graphs import (
    BudgetExceededError,
    Graph,
    connected_components,
    find_c_deletion_set,
    is_connected,
    max_matching,
)
from .homs import (
    LOC_BIJ,
    LOC_INJ,
    LOC_SURJ,
    Mode,
    PartialHom,
    brute_force_hom,
    brute_force_role,
    check_mapping,
    weak_surj,
)
from .ilp import TargetDescription, build_model_I, build_model_SB, solve_feasibility
from .structure import (
    Extension,
    TypeClass,
    canonical_form,
    enumerate_abstract_types,
    extension_from,
    sub_extension_vectors,
    type_census,
)


@dataclass
class SolveReport:
    answer: bool
    witness: Optional[list[int]] = None
    host: Optional[Graph] = None
    stats: dict = field(default_factory=dict)


@dataclass
class _Stats:
    subsets: int = 0
    partial_homs: int = 0
    ilp_solves: int = 0
    dp: DpStats = field(default_factory=DpStats)
    notes: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "subsets_tried": self.subsets,
            "phi_p_tried": self.partial_homs,
            "ilp_solves": self.ilp_solves,
            "dp_calls": self.dp.dp_calls,
        }
        out.update(self.notes)
        return out


def high_degree_set(g: Graph, m: int) -> frozenset[int]:
    """Vertices of degree at least m; a loop contributes one to the degree."""
    return frozenset(v for v in range(g.n) if g.deg(v) >= m)


def discover_parameters(g: Graph, budget: int = 24) -> tuple[int, int]:
    """Smallest (k+c), then smallest k, with a c-deletion set of size <= k."""
    for s in range(1, budget + 1):
        for k in range(0, s):
            c = s - k
            if find_c_deletion_set(g, c, k) is not None:
                return k, c
    raise BudgetExceededError(f"no (k, c) with k+c <= {budget} found")


def enumerate_partial_homs(d_g_sub: Graph, d_h: Graph, mode: str) -> list[PartialHom]:
    """All locally surjective (mode 'S') or bijective ('B') homomorphisms
    from d_g_sub onto d_h, as position maps; empty when no surjection exists."""
    if mode not in ("S", "B"):
        raise ValueError("mode must be 'S' or 'B'")
    if d_h.n > d_g_sub.n:
        return []
    if d_g_sub.n == 0:
        return [PartialHom((), (), ())]
    out = []
    for images in itertools.product(range(d_h.n), repeat=d_g_sub.n):
        if len(set(images)) != d_h.n:
            continue
        if any(not d_h.has_edge(images[u], images[v]) for u, v in d_g_sub.edges):
            continue
        ok = True
        for v in range(d_g_sub.n):
            img_nb = {images[w] for w in d_g_sub.adj[v]}
            if not img_nb >= set(d_h.adj[images[v]]):
                ok = False
                break
            if mode == "B" and len(img_nb) != len(d_g_sub.adj[v]):
                ok = False
                break
        if ok:
            out.append(PartialHom(tuple(range(d_g_sub.n)), tuple(range(d_h.n)), images))
    return out


@dataclass
class MappingSets:
    guest_types: list[TypeClass]
    guest_components: list[list[frozenset[int]]]
    host_types: list[TypeClass]
    wsm: set[tuple[int, int]]                      # (guest type idx, host type idx)
    pairs: list[tuple[tuple[int, ...], int]]       # (guest census vector, host type idx)
    mode: str

    @property
    def tc_g(self) -> list[int]:
        return [len(c) for c in self.guest_components]

    def wsm_types(self) -> set[tuple[TypeClass, TypeClass]]:
        return {(self.guest_types[j], self.host_types[i]) for j, i in self.wsm}


def _ext_counts_per_base(t: TypeClass) -> list[int]:
    """Per base vertex, how many extension-part neighbours it has in the type."""
    rep = t.rep
    b = rep.base_size
    return [sum(1 for w in rep.graph.adj[d] if w >= b) for d in range(b)]


def compute_mapping_sets(
    g: Graph,
    d_g: Iterable[int],
    desc: TargetDescription,
    phi_p: PartialHom,
    mode: str,
    stats: Optional[_Stats] = None,
) -> MappingSets:
    """The weak mapping set and the minimal S- or B-mapped pair set.

    Sub-extensions are enumerated up to |D_G| * |T_H - D_H| components per
    host type (at least one component when D_G is empty), tested through the
    DP, and kept only when no nonempty type-count-smaller extension already
    passed for the same host type.  The empty extension is recorded when it
    maps, but never disqualifies a nonempty one.
    """
    dset = sorted(set(d_g))
    census = type_census(g, dset)
    guest_types = [t for t, _ in census]
    guest_components = [comps for _, comps in census]
    host_types = list(desc.host_types)
    dp_stats = stats.dp if stats else None
    variant = "weakS" if mode == "S" else None

    wsm: set[tuple[int, int]] = set()
    if mode == "S":
        for j, t_g in enumerate(guest_types):
            ext_j = extension_from(g, dset, [guest_components[j][0]])
            for i, t_h in enumerate(host_types):
                if _weak_count_filter(ext_j, t_h, phi_p):
                    res = exists_augmenting_hom(
                        ext_j, t_h.rep, phi_p, weak_surj(frozenset(range(len(dset)))), dp_stats
                    )
                    if res is not None:
                        wsm.add((j, i))

    caps = [max(1, len(dset) * t.new_size) for t in host_types]
    max_cap = max(caps, default=0)
    counts = [len(c) for c in guest_components]
    per_base_g = [_ext_counts_per_base(t) for t in guest_types]
    per_base_h = [_ext_counts_per_base(t) for t in host_types]
    full_mode = LOC_SURJ if mode == "S" else LOC_BIJ
    pin = phi_p.as_dict()

    pairs: list[tuple[tuple[int, ...], int]] = []
    accepted: list[list[tuple[int, ...]]] = [[] for _ in host_types]
    for vec in sub_extension_vectors(counts, max_cap):
        total = sum(vec)
        ext = None
        for i, t_h in enumerate(host_types):
            if total > caps[i]:
                continue
            if total > 0 and any(
                a != vec and all(x <= y for x, y in zip(a, vec)) for a in accepted[i]
            ):
                continue
            if not _count_filter(vec, per_base_g, per_base_h[i], pin, len(dset), mode):
                continue
            if not _degree_filter(vec, guest_types, host_types[i], mode):
                continue
            if ext is None:
                comps = []
                for avail, take in zip(guest_components, vec):
                    comps.extend(avail[:take])
                ext = extension_from(g, dset, comps)
            res = exists_augmenting_hom(ext, t_h.rep, phi_p, full_mode, dp_stats)
            if res is not None:
                pairs.append((vec, i))
                if total > 0:
                    accepted[i].append(vec)
    return MappingSets(guest_types, guest_components, host_types, wsm, pairs, mode)


def _weak_count_filter(ext_g: Extension, t_h: TypeClass, phi_p: PartialHom) -> bool:
    # every non-base guest vertex needs some host vertex of no larger degree
    g, h = ext_g.graph, t_h.rep.graph
    bh = t_h.rep.base_size
    host_degs = sorted(h.deg(x) for x in range(bh, h.n))
    if not host_degs:
        return False
    return all(g.deg(v) >= host_degs[0] for v in range(ext_g.base_size, g.n))


def _count_filter(
    vec: Sequence[int],
    per_base_g: list[list[int]],
    per_base_h: list[int],
    pin: dict[int, int],
    b: int,
    mode: str,
) -> bool:
    for d in range(b):
        have = sum(vec[j] * per_base_g[j][d] for j in range(len(vec)))
        need = per_base_h[pin[d]]
        if mode == "B" and have != need:
            return False
        if mode == "S" and have < need:
            return False
    return True


def _degree_filter(
    vec: Sequence[int],
    guest_types: list[TypeClass],
    t_h: TypeClass,
    mode: str,
) -> bool:
    rep = t_h.rep
    host_degs = {rep.graph.deg(x) for x in range(rep.base_size, rep.graph.n)}
    if not host_degs:
        return sum(vec) == 0
    min_h = min(host_degs)
    for j, n in enumerate(vec):
        if n == 0:
            continue
        grep = guest_types[j].rep
        for v in range(grep.base_size, grep.graph.n):
            dv = grep.graph.deg(v)
            if mode == "B" and dv not in host_degs:
                return False
            if mode == "S" and dv < min_h:
                return False
    return True


def dec_part(
    g: Graph,
    d_g: Iterable[int],
    desc: TargetDescription,
    phi_p: PartialHom,
    mode: str,
    concrete_host: Optional[tuple[Graph, Sequence[int], list[tuple[TypeClass, list[frozenset[int]]]]]] = None,
    mapping_sets: Optional[MappingSets] = None,
    stats: Optional[_Stats] = None,
) -> Optional[tuple[Graph, list[int]]]:
    """Decide whether some host satisfying ``desc`` admits an augmenting
    locally surjective (mode 'S') or bijective ('B') homomorphism from g.

    On success returns the host (the given concrete one, or one assembled
    from the ILP assignment) together with a full witness map.
    """
    stats = stats or _Stats()
    dset = sorted(set(d_g))
    ms = mapping_sets or compute_mapping_sets(g, dset, desc, phi_p, mode, stats)
    model = build_model_SB(ms.tc_g, ms.wsm, ms.pairs, desc, mode)
    stats.ilp_solves += 1
    assignment = solve_feasibility(model)
    if assignment is None:
        if model.infeasible_reason:
            stats.notes["infeasible_at_build"] = model.infeasible_reason
        return None

    from .ilp import host_var, pair_var

    host_types = list(desc.host_types)
    n_types = len(host_types)
    x_host = [assignment[host_var(i)] for i in range(n_types)]

    if concrete_host is not None:
        host_graph, d_h_order, census_h = concrete_host
        by_type = {t: comps for t, comps in census_h}
        copies: list[list[Extension]] = []
        for i, t in enumerate(host_types):
            comps = by_type.get(t, [])
            assert len(comps) == x_host[i]
            copies.append([extension_from(host_graph, list(d_h_order), [c]) for c in comps])
        base_image = list(d_h_order)
    else:
        host_graph, copies = _assemble_host(desc.base, host_types, x_host)
        base_image = list(range(desc.base.n))

    phi: dict[int, int] = {}
    for pos, v in enumerate(dset):
        phi[v] = base_image[phi_p.images[pos]]

    used = [0] * len(ms.guest_types)
    copy_cursor = [0] * n_types
    full_mode = LOC_SURJ if mode == "S" else LOC_BIJ

    order = sorted(range(len(ms.pairs)), key=lambda e: (ms.pairs[e][1], ms.pairs[e][0]))
    for e in order:
        vec, ti = ms.pairs[e]
        count = assignment[pair_var(e, ti)]
        for _ in range(count):
            comps = []
            for j, take in enumerate(vec):
                comps.extend(ms.guest_components[j][used[j]:used[j] + take])
                used[j] += take
            host_ext = copies[ti][copy_cursor[ti]]
            copy_cursor[ti] += 1
            _map_part(g, dset, comps, host_ext, phi_p, full_mode, phi, stats)

    if mode == "B":
        assert used == ms.tc_g
    else:
        for j in range(len(ms.guest_types)):
            if used[j] == ms.tc_g[j]:
                continue
            target = None
            for i in sorted(i for (jj, i) in ms.wsm if jj == j):
                if x_host[i] >= 1:
                    target = i
                    break
            assert target is not None, "S3 guaranteed a weak partner"
            host_ext = copies[target][0]
            wmode = weak_surj(frozenset(range(len(dset))))
            for comp in ms.guest_components[j][used[j]:]:
                _map_part(g, dset, [comp], host_ext, phi_p, wmode, phi, stats)
            used[j] = ms.tc_g[j]

    witness = [phi[v] for v in range(g.n)]
    return host_graph, witness


def _map_part(
    g: Graph,
    dset: list[int],
    comps: list[frozenset[int]],
    host_ext: Extension,
    phi_p: PartialHom,
    mode: Mode,
    phi: dict[int, int],
    stats: _Stats,
) -> None:
    ext_g = extension_from(g, dset, comps)
    res = exists_augmenting_hom(ext_g, host_ext, phi_p, mode, stats.dp)
    assert res is not None, "allocation re-run must succeed"
    assert ext_g.origin is not None and host_ext.origin is not None
    for idx in range(ext_g.base_size, ext_g.graph.n):
        phi[ext_g.origin[idx]] = host_ext.origin[res[idx]]


def _assemble_host(
    base: Graph,
    host_types: list[TypeClass],
    x_host: list[int],
) -> tuple[Graph, list[list[Extension]]]:
    """The unique host made of the base plus x_T copies of each type."""
    pairs = [(u, v) for u, v in base.edges]
    n = base.n
    copy_vertices: list[list[list[int]]] = [[] for _ in host_types]
    for i, t in enumerate(host_types):
        rep = t.rep
        for _ in range(x_host[i]):
            ids = list(range(n, n + rep.graph.n - rep.base_size))
            n += len(ids)
            local = {bv: bv for bv in range(rep.base_size)}
            for off, vid in enumerate(ids):
                local[rep.base_size + off] = vid
            for u, v in rep.graph.edges:
                if u < rep.base_size and v < rep.base_size:
                    continue
                pairs.append((local[u], local[v]))
            copy_vertices[i].append(ids)
    host = Graph.from_edges(n, pairs, allows_loops=True)
    copies = [
        [extension_from(host, list(range(base.n)), [ids]) for ids in per_type]
        for per_type, _ in zip(copy_vertices, host_types)
    ]
    return host, copies


def _pinned_description(h: Graph, d_h: frozenset[int], k: int, c: int) -> tuple[
    TargetDescription, tuple[Graph, tuple[int, ...], list[tuple[TypeClass, list[frozenset[int]]]]]
]:
    d_h_graph, d_h_order = h.induced(d_h)
    census_h = type_census(h, d_h)
    c_prime = max([c, k * c * (k + c)] + [t.new_size for t, _ in census_h])
    host_types = tuple(t for t, _ in census_h)
    ch = []
    for i, (t, comps) in enumerate(census_h):
        coeffs = tuple(1 if j == i else 0 for j in range(len(host_types)))
        ch.append((coeffs, "==", len(comps)))
    desc = TargetDescription(d_h_graph, c_prime, host_types, tuple(ch))
    return desc, (h, d_h_order, census_h)


def solve_constrained_hom(
    g: Graph,
    h: Graph,
    mode: str,
    k: Optional[int] = None,
    c: Optional[int] = None,
    threads: int = 1,
    budget: int = 24,
) -> SolveReport:
    """LSHom (mode 'S') or LBHom (mode 'B') via the deletion-set ILP pipeline.

    Parameters k, c are discovered (smallest k+c first) when not supplied;
    supplying parameters without a matching deletion set is an error.
    """
    if mode not in ("S", "B"):
        raise ValueError("mode must be 'S' or 'B'")
    if g.n == 0 or h.n == 0 or not is_connected(g) or not is_connected(h):
        raise ValueError("both graphs must be connected and nonempty")
    stats = _Stats()
    if k is None or c is None:
        k, c = discover_parameters(g, budget)
        stats.notes["k"] = k
        stats.notes["c"] = c
    elif find_c_deletion_set(g, c, k) is None:
        raise ValueError(f"guest has no {c}-deletion set of size <= {k}")

    if find_c_deletion_set(h, c, k) is None:
        stats.notes["reject"] = "host has no small deletion set"
        return SolveReport(False, stats=stats.as_dict())

    d_g_hi = high_degree_set(g, k + c)
    d_h_hi = high_degree_set(h, k + c)
    desc, concrete = _pinned_description(h, d_h_hi, k, c)
    d_h_graph = desc.base

    if mode == "B":
        subsets = [tuple(sorted(d_g_hi))]
    else:
        base_list = sorted(d_g_hi)
        subsets = [
            tuple(combo)
            for size in range(len(base_list) + 1)
            for combo in itertools.combinations(base_list, size)
        ]

    tasks: list[tuple[tuple[int, ...], PartialHom]] = []
    for d in subsets:
        stats.subsets += 1
        d_g_graph, _ = g.induced(d)
        for php in enumerate_partial_homs(d_g_graph, d_h_graph, mode):
            stats.partial_homs += 1
            tasks.append((d, php))

    def run(task: tuple[tuple[int, ...], PartialHom]) -> Optional[tuple[Graph, list[int]]]:
        d, php = task
        return dec_part(g, d, desc, php, mode, concrete_host=concrete, stats=stats)

    result: Optional[tuple[Graph, list[int]]] = None
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run, t) for t in tasks]
            for fut in futures:
                res = fut.result()
                if res is not None and result is None:
                    result = res
    else:
        for t in tasks:
            res = run(t)
            if res is not None:
                result = res
                break

    if result is None:
        return SolveReport(False, stats=stats.as_dict())
    _, witness = result
    target = LOC_SURJ if mode == "S" else LOC_BIJ
    assert check_mapping(g, h, witness, target)
    return SolveReport(True, witness=witness, stats=stats.as_dict())


def _loopy_base_graphs(n: int) -> list[Graph]:
    """All graphs on n labelled vertices with optional loops, up to isomorphism."""
    if n == 0:
        return [Graph(0, frozenset(), allows_loops=True)]
    out: dict[tuple, Graph] = {}
    pairs = list(itertools.combinations(range(n), 2)) + [(v, v) for v in range(n)]
    for mask in itertools.product([False, True], repeat=len(pairs)):
        chosen = [p for p, keep in zip(pairs, mask) if keep]
        cand = Graph.from_edges(n, chosen, allows_loops=True)
        key = canonical_form(Extension(cand, 0))[0]
        if key not in out:
            out[key] = cand
    return [out[k] for k in sorted(out)]


def _connected_type_sets(
    base: Graph,
    types: list[TypeClass],
    indices: list[int],
) -> list[tuple[int, ...]]:
    """Subsets S of the given type indices whose exact-type hosts are connected.

    For a nonempty base: every chosen type must attach to the base and the
    multiplicity-one extension must be connected (multiplicities never change
    connectivity after that).  For an empty base only singletons work, and
    the caller pins the multiplicity to one.
    """
    if base.n == 0:
        return [(i,) for i in indices]
    attached = []
    for i in indices:
        rep = types[i].rep
        if any(u < rep.base_size <= v for u, v in ((min(e), max(e)) for e in rep.graph.edges)):
            attached.append(i)
    out = []
    for size in range(len(attached) + 1):
        for combo in itertools.combinations(attached, size):
            pairs = [(u, v) for u, v in base.edges]
            n = base.n
            for i in combo:
                rep = types[i].rep
                local = {bv: bv for bv in range(rep.base_size)}
                for off in range(rep.graph.n - rep.base_size):
                    local[rep.base_size + off] = n
                    n += 1
                for u, v in rep.graph.edges:
                    if u < rep.base_size and v < rep.base_size:
                        continue
                    pairs.append((local[u], local[v]))
            cand = Graph.from_edges(n, pairs, allows_loops=True)
            if is_connected(cand) and cand.n > 0:
                out.append(combo)
    return out


def solve_role_assignment(
    g: Graph,
    h_count: int,
    k: Optional[int] = None,
    c: Optional[int] = None,
    budget: int = 24,
) -> SolveReport:
    """Role assignment via target descriptions over abstract loopy host types.

    Iterates deletion subsets, candidate host bases on up to k vertices,
    connected type sets S and partial homomorphisms; each combination yields
    constraints forcing exactly the types in S plus the vertex-count
    equation, handed to the ILP decision subroutine in mode S.
    """
    if h_count < 1:
        raise ValueError("role count must be >= 1")
    if any(u == v for u, v in g.edges) or not is_connected(g) or g.n == 0:
        raise ValueError("guest must be connected, nonempty and loopless")
    stats = _Stats()
    if h_count > g.n:
        stats.notes["reject"] = "more roles than vertices"
        return SolveReport(False, stats=stats.as_dict())
    if k is None or c is None:
        k, c = discover_parameters(g, budget)
        stats.notes["k"] = k
        stats.notes["c"] = c
    elif find_c_deletion_set(g, c, k) is None:
        raise ValueError(f"guest has no {c}-deletion set of size <= {k}")

    d_g_hi = sorted(high_degree_set(g, k + c))
    abstract_cache: dict[tuple, list[TypeClass]] = {}

    for size in range(len(d_g_hi) + 1):
        for d in itertools.combinations(d_g_hi, size):
            stats.subsets += 1
            d_g_graph, _ = g.induced(d)
            for nd in range(0, min(k, len(d), h_count) + 1):
                c_prime = h_count - nd
                for base in _loopy_base_graphs(nd):
                    if nd == h_count and not is_connected(base):
                        continue
                    phis = enumerate_partial_homs(d_g_graph, base, "S")
                    if not phis:
                        continue
                    cache_key = (canonical_form(Extension(base, 0))[0], c_prime)
                    if cache_key not in abstract_cache:
                        abstract_cache[cache_key] = (
                            enumerate_abstract_types(base, c_prime, allow_loops=True)
                            if c_prime > 0
                            else []
                        )
                    types = abstract_cache[cache_key]
                    # degree screen: a surjective image never has a vertex of
                    # larger degree than the guest maximum
                    types = [
                        t for t in types
                        if max(
                            t.rep.graph.deg(x)
                            for x in range(t.rep.base_size, t.rep.graph.n)
                        ) <= g.max_degree()
                    ]
                    for php in phis:
                        stats.partial_homs += 1
                        report = _role_attempt(
                            g, d, base, types, php, h_count, nd, c_prime, stats
                        )
                        if report is not None:
                            return report
    return SolveReport(False, stats=stats.as_dict())


def _role_attempt(
    g: Graph,
    d: tuple[int, ...],
    base: Graph,
    types: list[TypeClass],
    php: PartialHom,
    h_count: int,
    nd: int,
    c_prime: int,
    stats: _Stats,
) -> Optional[SolveReport]:
    type_list = types
    desc_all = TargetDescription(base, max(c_prime, 0), tuple(type_list), ())
    ms = compute_mapping_sets(g, d, desc_all, php, "S", stats)
    supported = sorted({ti for _, ti in ms.pairs})
    # S3 needs every guest type weakly mapped into the chosen S
    weak_targets = [sorted({i for (jj, i) in ms.wsm if jj == j}) for j in range(len(ms.guest_types))]
    if any(not w for w in weak_targets) and ms.guest_types:
        return None

    for combo in _candidate_type_sets(base, type_list, supported, nd, h_count):
        if ms.guest_types and any(not (set(w) & set(combo)) for w in weak_targets):
            continue
        ch = []
        n_types = len(type_list)
        for i in range(n_types):
            unit = tuple(1 if j == i else 0 for j in range(n_types))
            if i in combo:
                if nd == 0:
                    ch.append((unit, "==", 1))
                else:
                    ch.append((unit, ">=", 1))
            else:
                ch.append((unit, "==", 0))
        sizes = tuple(t.new_size for t in type_list)
        ch.append((sizes, "==", h_count - nd))
        desc = TargetDescription(base, desc_all.c_prime, tuple(type_list), tuple(ch))
        res = dec_part(g, d, desc, php, "S", mapping_sets=ms, stats=stats)
        if res is None:
            continue
        host, witness = res
        if host.n != h_count or not is_connected(host):
            continue
        assert check_mapping(g, host, witness, LOC_SURJ)
        return SolveReport(True, witness=witness, host=host, stats=stats.as_dict())
    return None


def _candidate_type_sets(
    base: Graph,
    types: list[TypeClass],
    supported: list[int],
    nd: int,
    h_count: int,
) -> list[tuple[int, ...]]:
    if nd == h_count:
        # host is exactly the base; no extension types at all
        return [()] if is_connected(base) and base.n > 0 else []
    combos = _connected_type_sets(base, types, supported)
    combos = [c for c in combos if c]
    combos.sort(key=lambda c: (len(c), c))
    return combos


def _min_vertex_cover(g: Graph) -> frozenset[int]:
    """Smallest vertex cover by bounded edge-branching."""
    def branch(edges: list[tuple[int, int]], budget: int, chosen: set[int]) -> Optional[set[int]]:
        live = [(u, v) for u, v in edges if u not in chosen and v not in chosen]
        if not live:
            return set(chosen)
        if budget == 0:
            return None
        u, v = live[0]
        for cand in (u, v):
            res = branch(live, budget - 1, chosen | {cand})
            if res is not None:
                return res
        return None

    edges = sorted((u, v) for u, v in g.edges if u != v)
    for size in range(0, g.n + 1):
        res = branch(edges, size, set())
        if res is not None:
            return frozenset(res)
    return frozenset(range(g.n))


def solve_lihom_xp(g: Graph, h: Graph, d_g: Optional[frozenset[int]] = None) -> SolveReport:
    """LIHom by vertex-cover enumeration plus the pre-image counting ILP.

    Enumerates base maps from a minimum vertex cover into V(H) (up to a host
    automorphism acting on the first image), guesses which guest vertices
    join the pre-images of mapped cover images, and decides the rest with an
    exact integer feasibility model over candidate pre-image classes.
    """
    if g.n == 0 or not is_connected(g):
        raise ValueError("guest must be connected and nonempty")
    stats = _Stats()
    cover = sorted(d_g if d_g is not None else _min_vertex_cover(g))
    stats.notes["vertex_cover"] = len(cover)
    outside = [v for v in range(g.n) if v not in cover]

    if not cover:
        # single vertex: map it anywhere
        witness = [0]
        assert check_mapping(g, h, witness, LOC_INJ)
        return SolveReport(True, witness=witness, stats=stats.as_dict())

    first_orbit = _vertex_orbit_minima(h)

    for base_images in itertools.product(range(h.n), repeat=len(cover)):
        if base_images[0] not in first_orbit:
            continue
        stats.partial_homs += 1
        phi0 = dict(zip(cover, base_images))
        if not _valid_lihom_base(g, h, phi0):
            continue
        res = _lihom_branch(g, h, cover, outside, phi0, stats)
        if res is not None:
            assert check_mapping(g, h, res, LOC_INJ)
            return SolveReport(True, witness=res, stats=stats.as_dict())
    return SolveReport(False, stats=stats.as_dict())


def _vertex_orbit_minima(h: Graph) -> frozenset[int]:
    """Minimum representative of each vertex orbit of Aut(H)."""
    autos = _automorphisms(h)
    minima = set()
    for v in range(h.n):
        minima.add(min(a[v] for a in autos))
    return frozenset(minima)


def _automorphisms(h: Graph) -> list[tuple[int, ...]]:
    degs = [h.deg(v) for v in range(h.n)]
    loops = [h.has_loop(v) for v in range(h.n)]
    out = []

    def rec(perm: list[int], used: set[int]) -> None:
        i = len(perm)
        if i == h.n:
            out.append(tuple(perm))
            return
        for cand in range(h.n):
            if cand in used or degs[cand] != degs[i] or loops[cand] != loops[i]:
                continue
            if any(h.has_edge(i, j) != h.has_edge(cand, perm[j]) for j in range(i)):
                continue
            perm.append(cand)
            used.add(cand)
            rec(perm, used)
            perm.pop()
            used.remove(cand)

    rec([], set())
    return out


def _valid_lihom_base(g: Graph, h: Graph, phi0: dict[int, int]) -> bool:
    for u in phi0:
        for v in phi0:
            if u < v and g.has_edge(u, v) and not h.has_edge(phi0[u], phi0[v]):
                return False
    # equal images must not share a neighbour
    items = sorted(phi0.items())
    for (u, iu), (v, iv) in itertools.combinations(items, 2):
        if iu == iv and set(g.adj[u]) & set(g.adj[v]):
            return False
    return True


def _lihom_branch(
    g: Graph,
    h: Graph,
    cover: list[int],
    outside: list[int],
    phi0: dict[int, int],
    stats: _Stats,
) -> Optional[list[int]]:
    d_h = sorted(set(phi0.values()))
    # guest types: outside vertices grouped by neighbourhood (all in the cover)
    sig_of = {v: frozenset(g.adj[v]) for v in outside}
    type_sigs = sorted({sig_of[v] for v in outside}, key=sorted)
    members: dict[frozenset, list[int]] = {s: [] for s in type_sigs}
    for v in outside:
        members[sig_of[v]].append(v)

    # guesses: per mapped host vertex in D_H, which type signatures add an
    # extra pre-image vertex (at most one per type, disjoint neighbourhoods)
    def extras_for(hv: int) -> list[tuple[frozenset, ...]]:
        cands = [
            s for s in type_sigs
            if all(phi0[u] in h.adj[hv] for u in s)
        ]
        out: list[tuple[frozenset, ...]] = [()]
        for r in range(1, len(cover) + 1):
            for combo in itertools.combinations(cands, r):
                flat = [u for s in combo for u in s]
                if len(flat) != len(set(flat)):
                    continue
                out.append(combo)
        return out

    choices = [extras_for(hv) for hv in d_h]
    for combo in itertools.product(*choices):
        usage: dict[frozenset, int] = {}
        ok = True
        for extras in combo:
            for s in extras:
                usage[s] = usage.get(s, 0) + 1
        for s, cnt in usage.items():
            if cnt > len(members[s]):
                ok = False
                break
        if not ok:
            continue
        res = _lihom_ilp(g, h, cover, outside, phi0, d_h, combo, members, stats)
        if res is not None:
            return res
    return None


def _lihom_ilp(
    g: Graph,
    h: Graph,
    cover: list[int],
    outside: list[int],
    phi0: dict[int, int],
    d_h: list[int],
    extras_combo: tuple[tuple[frozenset, ...], ...],
    members: dict[frozenset, list[int]],
    stats: _Stats,
) -> Optional[list[int]]:
    # realize the extras with concrete vertices (types are interchangeable)
    cursor = {s: 0 for s in members}
    phi = dict(phi0)
    for hv, extras in zip(d_h, extras_combo):
        for s in extras:
            v = members[s][cursor[s]]
            cursor[s] += 1
            phi[v] = hv
    d_g_prime = sorted(phi)
    if not _valid_lihom_base(g, h, {v: phi[v] for v in d_g_prime}):
        return None
    rest = [v for v in range(g.n) if v not in phi]
    d_h_set = set(d_h)

    # drop host edges outside D_H
    host_pairs = [
        (u, v) for u, v in h.edges if u in d_h_set or v in d_h_set
    ]
    h_pruned = Graph.from_edges(h.n, host_pairs, h.allows_loops)

    # guest types w.r.t. the enlarged cover
    sig_of = {v: frozenset(g.adj[v]) for v in rest}
    gsigs = sorted({sig_of[v] for v in rest}, key=sorted)
    gmembers = {s: sorted(v for v in rest if sig_of[v] == s) for s in gsigs}
    tc_g = [len(gmembers[s]) for s in gsigs]

    # host types: unmapped vertices by (attachment into D_H, loop)
    hrest = [x for x in range(h.n) if x not in d_h_set]
    hsig_of = {
        x: (frozenset(h_pruned.adj[x]) - {x}, h_pruned.has_loop(x)) for x in hrest
    }
    hsigs = sorted({hsig_of[x] for x in hrest}, key=lambda s: (sorted(s[0]), s[1]))
    hmembers = {s: sorted(x for x in hrest if hsig_of[x] == s) for s in hsigs}
    tc_h = [len(hmembers[s]) for s in hsigs]

    icm: list[tuple[tuple[int, ...], int]] = []
    icm_sets: list[tuple[tuple[frozenset, ...], int]] = []
    for i, (att, _) in enumerate(hsigs):
        valid = [
            s for s in gsigs
            if all(phi[u] in att for u in s)
        ]
        for r in range(0, min(len(d_g_prime), len(valid)) + 1):
            for combo in itertools.combinations(valid, r):
                flat = [u for s in combo for u in s]
                if len(flat) != len(set(flat)):
                    continue
                vec = tuple(1 if s in combo else 0 for s in gsigs)
                icm.append((vec, i))
                icm_sets.append((combo, i))

    model = build_model_I(tc_g, tc_h, icm)
    stats.ilp_solves += 1
    assignment = solve_feasibility(model)
    if assignment is None:
        return None

    from .ilp import pair_var

    gcursor = {s: 0 for s in gsigs}
    hcursor = {s: 0 for s in hsigs}
    for e, (combo, i) in enumerate(icm_sets):
        count = assignment[pair_var(e, i)]
        for _ in range(count):
            hv = hmembers[hsigs[i]][hcursor[hsigs[i]]]
            hcursor[hsigs[i]] += 1
            for s in combo:
                v = gmembers[s][gcursor[s]]
                gcursor[s] += 1
                phi[v] = hv
    witness = [phi[v] for v in range(g.n)]
    if not check_mapping(g, h, witness, LOC_INJ):
        return None
    return witness


def solve_lihom_special(g: Graph, h: Graph, vc_max: int = 4) -> SolveReport:
    """LIHom router for the tractable dichotomy cells.

    Small vertex cover goes to the XP algorithm; a singleton 2-deletion set
    goes through the neighbourhood-matching route; anything else falls back
    to brute force with an explicit marker in the stats.
    """
    if g.n == 0 or not is_connected(g):
        raise ValueError("guest must be connected and nonempty")
    stats = _Stats()
    cover = _min_vertex_cover(g)
    if len(cover) <= vc_max:
        report = solve_lihom_xp(g, h, d_g=cover)
        report.stats["route"] = "vertex_cover_xp"
        return report

    centre = None
    for v in range(g.n):
        if all(len(comp) <= 2 for comp in _components_without(g, v)):
            centre = v
            break
    if centre is not None:
        report = _lihom_two_deletion(g, h, centre, stats)
        report.stats["route"] = "two_deletion_matching"
        return report

    witness = brute_force_hom(g, h, LOC_INJ)
    stats.notes["route"] = "brute_fallback"
    stats.notes["outside_dichotomy"] = True
    return SolveReport(witness is not None, witness=witness, stats=stats.as_dict())


def _components_without(g: Graph, v: int) -> list[frozenset[int]]:
    from .graphs import _components_avoiding

    return _components_avoiding(g, frozenset([v]))


def _lihom_two_deletion(g: Graph, h: Graph, v: int, stats: _Stats) -> SolveReport:
    """Per-anchor search: for each host vertex passing the degree and
    neighbourhood-matching conditions, try to extend v -> w exactly."""
    p = sum(1 for a, b in g.edges if a in g.adj[v] and b in g.adj[v])
    for w in range(h.n):
        if g.deg(v) > h.deg(w):
            continue
        nh, _ = h.induced(sorted(x for x in h.adj[w] if x != w))
        strip = Graph.from_edges(nh.n, [(a, b) for a, b in nh.edges if a != b])
        if len(max_matching(strip)) < p:
            continue
        stats.partial_homs += 1
        witness = _extend_from_anchor(g, h, v, w)
        if witness is not None:
            assert check_mapping(g, h, witness, LOC_INJ)
            return SolveReport(True, witness=witness, stats=stats.as_dict())
    return SolveReport(False, stats=stats.as_dict())


def _extend_from_anchor(g: Graph, h: Graph, v: int, w: int) -> Optional[list[int]]:
    php = PartialHom((v,), tuple(range(h.n)), (w,))
    # direct backtracking with the anchor pinned; the instance is tiny since
    # every component of G - v has at most two vertices
    order = [v] + sorted(set(range(g.n)) - {v})
    phi: list[Optional[int]] = [None] * g.n

    def ok(u: int, img: int) -> bool:
        for x in g.adj[u]:
            ix = phi[x]
            if ix is not None and not h.has_edge(img, ix):
                return False
        for x in g.adj[u]:
            for y in g.adj[x]:
                if y != u and phi[y] == img:
                    return False
        return True

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        u = order[i]
        cands = [w] if u == v else range(h.n)
        for img in cands:
            if not ok(u, img):
                continue
            phi[u] = img
            if rec(i + 1):
                return True
            phi[u] = None
        return False

    if rec(0):
        res = [x for x in phi if x is not None]
        return res if check_mapping(g, h, res, LOC_INJ) else None
    return None
