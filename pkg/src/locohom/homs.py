"""Locally constrained homomorphism checks and brute-force oracle solvers."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .graphs import Graph, format_graph


@dataclass(frozen=True)
class Mode:
    """Local constraint placed on a homomorphism.

    ``weak`` requires local surjectivity only outside ``exempt``.
    """

    kind: str  # 'hom' | 'inj' | 'surj' | 'bij' | 'weak'
    exempt: frozenset[int] = field(default_factory=frozenset)

    def needs_injective(self) -> bool:
        return self.kind in ("inj", "bij")

    def needs_surjective_at(self, v: int) -> bool:
        if self.kind in ("surj", "bij"):
            return True
        return self.kind == "weak" and v not in self.exempt


HOM = Mode("hom")
LOC_INJ = Mode("inj")
LOC_SURJ = Mode("surj")
LOC_BIJ = Mode("bij")


def weak_surj(exempt: frozenset[int]) -> Mode:
    return Mode("weak", frozenset(exempt))


@dataclass(frozen=True)
class PartialHom:
    """Map from a guest vertex subset onto a host vertex subset.

    A total map phi augments this iff phi agrees with it on the domain and no
    vertex outside the domain lands in the codomain.
    """

    domain: tuple[int, ...]
    codomain: tuple[int, ...]
    images: tuple[int, ...]  # parallel to domain

    def __post_init__(self) -> None:
        if len(self.domain) != len(self.images):
            raise ValueError("domain and images must have equal length")
        if not set(self.images) <= set(self.codomain):
            raise ValueError("image must lie inside the codomain")

    @staticmethod
    def from_dict(mapping: dict[int, int], codomain: Sequence[int]) -> "PartialHom":
        dom = tuple(sorted(mapping))
        return PartialHom(dom, tuple(sorted(set(codomain))), tuple(mapping[v] for v in dom))

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.domain, self.images))


def augments(phi: Sequence[int], phi_p: PartialHom) -> bool:
    """True iff phi extends phi_p and maps nothing else into its codomain."""
    m = phi_p.as_dict()
    codomain = set(phi_p.codomain)
    for v, h in enumerate(phi):
        if v in m:
            if h != m[v]:
                return False
        elif h in codomain:
            return False
    return True


def check_mapping(g: Graph, h: Graph, phi: Sequence[int], mode: Mode) -> bool:
    """Check that phi is a homomorphism satisfying the local condition of mode.

    The local condition at guest vertex v compares the image set phi(N_G(v))
    with N_H(phi(v)): contained for every homomorphism, equal for surjective,
    and collision-free for injective.
    """
    if len(phi) != g.n:
        raise ValueError("phi must be total on V(G)")
    if any(u == v for u, v in g.edges):
        raise ValueError("guest graph must be loopless")
    if any(not (0 <= x < h.n) for x in phi):
        raise ValueError("phi image out of range")
    for u, v in g.edges:
        if not h.has_edge(phi[u], phi[v]):
            return False
    for v in range(g.n):
        nb = g.adj[v]
        images = {phi[w] for w in nb}
        if mode.needs_injective() and len(images) != len(nb):
            return False
        if mode.needs_surjective_at(v) and images != set(h.adj[phi[v]]):
            return False
    return True


def first_violation(g: Graph, h: Graph, phi: Sequence[int], mode: Mode) -> Optional[str]:
    """Human-readable description of the first violated constraint, or None."""
    if len(phi) != g.n:
        return "mapping is not total"
    for u, v in sorted(g.edges):
        if not h.has_edge(phi[u], phi[v]):
            return f"edge {u + 1}-{v + 1} maps to non-edge {phi[u] + 1}-{phi[v] + 1}"
    for v in range(g.n):
        nb = sorted(g.adj[v])
        images = {phi[w] for w in nb}
        if mode.needs_injective() and len(images) != len(nb):
            return f"neighbourhood of {v + 1} maps non-injectively"
        if mode.needs_surjective_at(v) and images != set(h.adj[phi[v]]):
            missing = sorted(set(h.adj[phi[v]]) - images)
            return (f"neighbourhood of {v + 1} misses host vertex "
                    f"{missing[0] + 1} adjacent to {phi[v] + 1}")
    return None


def _bfs_assignment_order(g: Graph) -> list[int]:
    order: list[int] = []
    seen: set[int] = set()
    for start in range(g.n):
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in sorted(g.adj[v]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def brute_force_hom(
    g: Graph,
    h: Graph,
    mode: Mode,
    phi_p: Optional[PartialHom] = None,
) -> Optional[list[int]]:
    """Exhaustive backtracking for a mapping passing ``check_mapping``.

    Guest vertices are assigned in BFS order from the smallest vertex and
    candidate images are tried in ascending id order, so the witness is
    deterministic.  When ``phi_p`` is given the result additionally augments
    it.  Pruning is sound only: degree bounds per mode, partial-homomorphism
    violations, injectivity collisions, and closed-neighbourhood surjectivity
    once a vertex has all neighbours assigned.
    """
    order = _bfs_assignment_order(g)
    pinned = phi_p.as_dict() if phi_p else {}
    blocked = set(phi_p.codomain) if phi_p else set()

    phi: list[Optional[int]] = [None] * g.n
    unassigned_nb = [len(g.adj[v]) for v in range(g.n)]

    def degree_ok(v: int, img: int) -> bool:
        dg, dh = g.deg(v), h.deg(img)
        if mode.kind == "bij":
            return dg == dh
        if mode.kind == "inj":
            return dg <= dh
        if mode.kind == "surj" or (mode.kind == "weak" and v not in mode.exempt):
            return dg >= dh
        return True

    def candidates(v: int) -> list[int]:
        if v in pinned:
            return [pinned[v]]
        if phi_p is not None:
            return [x for x in range(h.n) if x not in blocked and degree_ok(v, x)]
        return [x for x in range(h.n) if degree_ok(v, x)]

    def consistent(v: int, img: int) -> bool:
        for w in g.adj[v]:
            iw = phi[w]
            if iw is None:
                continue
            if not h.has_edge(img, iw):
                return False
        if mode.needs_injective():
            for w in g.adj[v]:
                # v and any assigned u sharing the neighbour w must differ
                for u in g.adj[w]:
                    if u != v and phi[u] == img:
                        return False
        return True

    def closed_check(w: int) -> bool:
        # all neighbours of w assigned: final local test at w
        iw = phi[w]
        if iw is None:
            return True
        images = {phi[u] for u in g.adj[w]}
        if mode.needs_surjective_at(w) and images != set(h.adj[iw]):
            return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for img in candidates(v):
            if not consistent(v, img):
                continue
            phi[v] = img
            touched = []
            ok = True
            for w in g.adj[v]:
                unassigned_nb[w] -= 1
                touched.append(w)
                if unassigned_nb[w] == 0 and not closed_check(w):
                    ok = False
            if ok and unassigned_nb[v] == 0 and not closed_check(v):
                ok = False
            if ok and search(i + 1):
                return True
            for w in touched:
                unassigned_nb[w] += 1
            phi[v] = None
        return False

    if search(0):
        result = [x for x in phi if x is not None]
        assert len(result) == g.n
        assert check_mapping(g, h, result, mode)
        if phi_p is not None:
            assert augments(result, phi_p)
        return result
    return None


def role_graph_of(g: Graph, roles: Sequence[int], h: int) -> Graph:
    """Quotient graph induced by a role map; roles are 0-based, loops allowed."""
    pairs = {(min(roles[u], roles[v]), max(roles[u], roles[v])) for u, v in g.edges}
    return Graph(h, frozenset(pairs), allows_loops=True)


def brute_force_role(g: Graph, h: int) -> Optional[tuple[list[int], Graph]]:
    """First role map in lexicographic order together with its role graph.

    A surjective f onto h roles is valid iff f is a locally surjective
    homomorphism onto the quotient graph it induces.
    """
    if h < 1:
        raise ValueError("role count must be >= 1")
    if h > g.n:
        return None
    roles = [0] * g.n

    # role names are interchangeable, so only assignments where role r first
    # appears after roles 0..r-1 need to be tried
    def search_all(i: int, used: int) -> bool:
        if h - used > g.n - i:
            return False
        if i == g.n:
            if used != h:
                return False
            hg = role_graph_of(g, roles, h)
            return check_mapping(g, hg, roles, LOC_SURJ)
        for r in range(min(used + 1, h)):
            roles[i] = r
            if search_all(i + 1, used + 1 if r == used else used):
                return True
        roles[i] = 0
        return False

    if search_all(0, 0):
        return list(roles), role_graph_of(g, roles, h)
    return None


def witness_to_json(
    answer: bool,
    mapping: Optional[Sequence[int]] = None,
    host: Optional[Graph] = None,
) -> str:
    """Witness JSON: 1-based images; role results embed the host graph."""
    if not answer:
        return json.dumps({"answer": "no"})
    payload: dict = {"answer": "yes", "mapping": [x + 1 for x in mapping or []]}
    if host is not None:
        payload["host"] = format_graph(host)
    return json.dumps(payload)


def witness_from_json(text: str) -> tuple[bool, Optional[list[int]], Optional[str]]:
    data = json.loads(text)
    if data.get("answer") == "no":
        return False, None, None
    mapping = [int(x) - 1 for x in data["mapping"]]
    return True, mapping, data.get("host")
