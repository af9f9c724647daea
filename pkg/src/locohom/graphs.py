"""Core graph type, file I/O and structural routines.

Vertices are 0-based internally; the text file format is 1-based.  Hosts may
carry self-loops, guests never do, and a loop at v puts v into N(v).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional


class GraphError(ValueError):
    """Malformed graph file or invalid graph construction."""


class BudgetExceededError(RuntimeError):
    """An enumeration or search exceeded its configured budget."""


@dataclass(frozen=True)
class Graph:
    """Undirected graph; ``edges`` holds normalized pairs (u, v) with u <= v.

    A pair (v, v) encodes a self-loop and is only legal when ``allows_loops``
    is set.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    allows_loops: bool = False
    adj: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            if not (0 <= u <= v < self.n):
                raise GraphError(f"edge ({u},{v}) out of range for n={self.n}")
            if u == v:
                if not self.allows_loops:
                    raise GraphError(f"loop at vertex {u} in loopless graph")
                nbrs[u].add(u)
            else:
                nbrs[u].add(v)
                nbrs[v].add(u)
        object.__setattr__(self, "adj", tuple(frozenset(s) for s in nbrs))

    @staticmethod
    def from_edges(n: int, pairs: Iterable[tuple[int, int]], allows_loops: bool = False) -> "Graph":
        norm = frozenset((min(u, v), max(u, v)) for u, v in pairs)
        return Graph(n, norm, allows_loops)

    def deg(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def has_loop(self, v: int) -> bool:
        return (v, v) in self.edges

    def vertices(self) -> range:
        return range(self.n)

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def induced(self, verts: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        """Induced subgraph on ``verts``; returns it with the new->old id map."""
        order = tuple(sorted(set(verts)))
        pos = {v: i for i, v in enumerate(order)}
        pairs = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return Graph.from_edges(len(order), pairs, self.allows_loops), order


def parse_graph(text: str | bytes) -> Graph:
    """Parse the line-based graph format.

    ``#`` lines are comments; the header is ``p ghom <n> <m>`` optionally
    followed by ``loops``; then exactly m lines ``e <u> <v>`` with 1-based
    endpoints.  Loops are rejected unless the header declares ``loops``.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    n = m = None
    allows_loops = False
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "p":
            if n is not None:
                raise GraphError(f"line {lineno}: duplicate header")
            if len(tokens) not in (4, 5) or tokens[1] != "ghom":
                raise GraphError(f"line {lineno}: malformed header {line!r}")
            try:
                n, m = int(tokens[2]), int(tokens[3])
            except ValueError:
                raise GraphError(f"line {lineno}: malformed header {line!r}") from None
            if n < 0 or m < 0:
                raise GraphError(f"line {lineno}: negative counts in header")
            if len(tokens) == 5:
                if tokens[4] != "loops":
                    raise GraphError(f"line {lineno}: malformed header flag {tokens[4]!r}")
                allows_loops = True
        elif tokens[0] == "e":
            if n is None:
                raise GraphError(f"line {lineno}: edge before header")
            if len(tokens) != 3:
                raise GraphError(f"line {lineno}: malformed edge line {line!r}")
            try:
                u, v = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise GraphError(f"line {lineno}: malformed edge line {line!r}") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphError(f"line {lineno}: vertex id out of range in {line!r}")
            if u == v and not allows_loops:
                raise GraphError(f"line {lineno}: loop in loopless file")
            pair = (min(u, v) - 1, max(u, v) - 1)
            if pair in seen:
                raise GraphError(f"line {lineno}: duplicate edge {line!r}")
            seen.add(pair)
        else:
            raise GraphError(f"line {lineno}: unknown line type {tokens[0]!r}")
    if n is None:
        raise GraphError("missing header")
    if len(seen) != m:
        raise GraphError(f"declared {m} edges, found {len(seen)}")
    return Graph(n, frozenset(seen), allows_loops)


def format_graph(g: Graph) -> str:
    """Serialize to the file format with 1-based vertex ids."""
    flag = " loops" if g.allows_loops else ""
    lines = [f"p ghom {g.n} {len(g.edges)}{flag}"]
    for u, v in sorted(g.edges):
        lines.append(f"e {u + 1} {v + 1}")
    return "\n".join(lines) + "\n"


def connected_components(g: Graph) -> list[frozenset[int]]:
    """Components as vertex sets, ordered by their minimum vertex id."""
    seen: set[int] = set()
    comps = []
    for start in range(g.n):
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        seen.add(start)
        while queue:
            v = queue.popleft()
            for w in g.adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        comps.append(frozenset(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(connected_components(g)) == 1


def _components_avoiding(g: Graph, removed: frozenset[int]) -> list[frozenset[int]]:
    seen: set[int] = set(removed)
    comps = []
    for start in range(g.n):
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        seen.add(start)
        while queue:
            v = queue.popleft()
            for w in g.adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        comps.append(frozenset(comp))
    return comps


def find_c_deletion_set(g: Graph, c: int, k: int) -> Optional[frozenset[int]]:
    """A set D, |D| <= k, with every component of G - D of size <= c, or None.

    Depth-bounded branching: while some component is oversized, take a
    connected subgraph on c+1 of its vertices and branch on deleting each of
    them, high-degree vertices first.
    """
    if c < 1:
        raise ValueError("c must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    visited: set[frozenset[int]] = set()

    def oversized_subgraph(deleted: frozenset[int]) -> Optional[list[int]]:
        # BFS from the smallest vertex of the first oversized component,
        # collecting c+1 vertices in id order.
        for comp in _components_avoiding(g, deleted):
            if len(comp) > c:
                start = min(comp)
                picked = [start]
                seen = {start}
                queue = deque([start])
                while queue and len(picked) < c + 1:
                    v = queue.popleft()
                    for w in sorted(g.adj[v]):
                        if w not in seen and w not in deleted:
                            seen.add(w)
                            picked.append(w)
                            queue.append(w)
                            if len(picked) == c + 1:
                                break
                return picked
        return None

    def search(deleted: frozenset[int], budget: int) -> Optional[frozenset[int]]:
        sub = oversized_subgraph(deleted)
        if sub is None:
            return deleted
        if budget == 0:
            return None
        for v in sorted(sub, key=lambda v: (-g.deg(v), v)):
            nxt = deleted | {v}
            if nxt in visited:
                continue
            visited.add(nxt)
            res = search(nxt, budget - 1)
            if res is not None:
                return res
        return None

    return search(frozenset(), k)


def is_extended_deletion_set(g: Graph, d: Iterable[int], k: int, c: int) -> bool:
    """True iff D is a (k,c)-extended deletion set of G."""
    dset = frozenset(d)
    big = 0
    for comp in _components_avoiding(g, dset):
        if len(comp) <= c:
            continue
        big += 1
        sub, _ = g.induced(comp)
        if find_c_deletion_set(sub, c, k) is None:
            return False
    return big <= k


@dataclass(frozen=True)
class TreeDecomposition:
    """Rooted tree of bags; ``parent[i]`` is the parent node of node i (-1 at root)."""

    bags: tuple[frozenset[int], ...]
    parent: tuple[int, ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=1) - 1

    def is_valid_for(self, g: Graph) -> bool:
        # (P1) every edge inside some bag
        for u, v in g.edges:
            if not any(u in b and v in b for b in self.bags):
                return False
        # (P2) the nodes holding each vertex induce a nonempty subtree
        for v in range(g.n):
            holding = [i for i, b in enumerate(self.bags) if v in b]
            if not holding:
                return False
            hold = set(holding)
            # count tree edges among holding nodes; subtree iff count == len-1
            links = sum(1 for i in holding if self.parent[i] in hold)
            if links != len(holding) - 1:
                return False
        return True


def tree_decomposition_from_structure(
    g: Graph,
    d: Iterable[int],
    component_deletion_sets: Mapping[frozenset[int], frozenset[int]],
    c: int,
) -> TreeDecomposition:
    """Decomposition with root bag D and one branch per component of G - D.

    A component C with deletion set S_C contributes a child bag D + S_C whose
    children are the bags D + S_C + B for the components B of C - S_C.
    Raises GraphError when some B exceeds c vertices.
    """
    dset = frozenset(d)
    bags: list[frozenset[int]] = [dset]
    parent: list[int] = [-1]
    for comp in _components_avoiding(g, dset):
        s_c = frozenset(component_deletion_sets.get(comp, frozenset()))
        if not s_c <= comp:
            raise GraphError("component deletion set not inside its component")
        mid = len(bags)
        bags.append(dset | s_c)
        parent.append(0)
        sub, order = g.induced(comp)
        s_local = frozenset(order.index(v) for v in s_c)
        for b in _components_avoiding(sub, s_local):
            bvs = frozenset(order[i] for i in b)
            if len(bvs) > c:
                raise GraphError(
                    f"component piece of size {len(bvs)} exceeds c={c}; "
                    "inputs violate the deletion-set precondition"
                )
            bags.append(dset | s_c | bvs)
            parent.append(mid)
    return TreeDecomposition(tuple(bags), tuple(parent))


@dataclass(frozen=True)
class EquitablePartitionResult:
    blocks: tuple[frozenset[int], ...]
    matrix: tuple[tuple[int, ...], ...]


def _refine_to_equitable(g: Graph) -> list[frozenset[int]]:
    # start from one block, split by neighbour counts until stable
    colour = [0] * g.n
    while True:
        sig = {}
        for v in range(g.n):
            counts: dict[int, int] = {}
            for w in g.adj[v]:
                counts[colour[w]] = counts.get(colour[w], 0) + 1
            sig[v] = (colour[v], tuple(sorted(counts.items())))
        values = sorted(set(sig.values()))
        new = {s: i for i, s in enumerate(values)}
        nxt = [new[sig[v]] for v in range(g.n)]
        if nxt == colour:
            break
        colour = nxt
    blocks: dict[int, set[int]] = {}
    for v in range(g.n):
        blocks.setdefault(colour[v], set()).add(v)
    return [frozenset(b) for b in blocks.values()]


def _drm_block_keys(raw: list[list[int]], blocks: list[frozenset[int]]) -> list[tuple]:
    # degree first (descending), then iterated row signatures; block sizes are
    # deliberately excluded so a graph and its quotient order their blocks
    # the same way
    keys: list[tuple] = [(-sum(raw[i]),) for i in range(len(blocks))]
    for _ in range(len(blocks)):
        nxt = [
            (keys[i], tuple(sorted((keys[j], raw[i][j]) for j in range(len(blocks)))))
            for i in range(len(blocks))
        ]
        if nxt == keys:
            break
        keys = nxt
    return keys


def equitable_partition_drm(g: Graph) -> EquitablePartitionResult:
    """Coarsest equitable partition and its block-neighbour-count matrix.

    Blocks are ordered canonically by degree (descending) and then by
    iterated neighbour-count signatures, so matrices from different graphs
    are comparable.  Remaining ties fall back to the smallest contained
    vertex id.
    """
    if g.n == 0:
        raise GraphError("empty graph has no equitable partition")
    if not is_connected(g):
        raise GraphError("equitable partition requires a connected graph")
    blocks = _refine_to_equitable(g)
    idx_of = {}
    for i, b in enumerate(blocks):
        for v in b:
            idx_of[v] = i
    raw = []
    for b in blocks:
        rep = next(iter(b))
        row = [0] * len(blocks)
        for w in g.adj[rep]:
            row[idx_of[w]] += 1
        raw.append(row)
    keys = _drm_block_keys(raw, blocks)
    order = sorted(range(len(blocks)), key=lambda i: (keys[i], min(blocks[i])))
    blocks_o = tuple(blocks[i] for i in order)
    matrix = tuple(tuple(raw[i][j] for j in order) for i in order)
    return EquitablePartitionResult(blocks_o, matrix)


def drm_equal(a: EquitablePartitionResult, b: EquitablePartitionResult) -> bool:
    """Matrix equality in canonical order, robust to key ties.

    Block sizes do not participate: a locally bijective quotient preserves
    every neighbour count but scales the blocks.
    """
    if len(a.blocks) != len(b.blocks):
        return False
    if a.matrix == b.matrix:
        return True
    return matrices_permutation_equal(a.matrix, b.matrix)


def matrices_permutation_equal(
    m1: tuple[tuple[int, ...], ...], m2: tuple[tuple[int, ...], ...]
) -> bool:
    """Whether a simultaneous row/column permutation maps m1 onto m2."""
    import itertools

    n = len(m1)
    if n != len(m2):
        return False
    rows1 = sorted(tuple(sorted(r)) for r in m1)
    rows2 = sorted(tuple(sorted(r)) for r in m2)
    if rows1 != rows2:
        return False
    for perm in itertools.permutations(range(n)):
        if all(m1[i][j] == m2[perm[i]][perm[j]] for i in range(n) for j in range(n)):
            return True
    return False


def max_matching(g: Graph) -> frozenset[tuple[int, int]]:
    """A maximum-cardinality matching, by exhaustive search with memoization.

    Intended for neighbourhood-sized inputs; raises on loops.
    """
    if any(u == v for u, v in g.edges):
        raise ValueError("max_matching requires a loopless graph")
    memo: dict[frozenset[int], frozenset[tuple[int, int]]] = {}

    def best(avail: frozenset[int]) -> frozenset[tuple[int, int]]:
        live = sorted(v for v in avail if any(w in avail for w in g.adj[v]))
        if not live:
            return frozenset()
        if avail in memo:
            return memo[avail]
        v = live[0]
        top = best(avail - {v})
        for w in sorted(g.adj[v]):
            if w in avail:
                cand = best(avail - {v, w}) | {(min(v, w), max(v, w))}
                if len(cand) > len(top):
                    top = cand
        memo[avail] = top
        return top

    return best(frozenset(range(g.n)))
