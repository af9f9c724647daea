"""Augmenting-homomorphism decision by dynamic programming over a tree
decomposition of the guest extension.

The guest extension decomposes as a caterpillar: root bag = base, one branch
per attached component C with bag base+S_C (S_C a small deletion set of C)
and leaf bags base+S_C+B for the pieces B of C-S_C.  Processing branches
sequentially turns the whole run into a single introduce/forget sequence, so
no join nodes are needed.

DP state at a bag: the images of the bag vertices plus, per bag vertex v, the
set of host vertices already used by *forgotten* neighbours of v.  When v is
forgotten, every still-relevant neighbour of v is in the bag (standard
subtree-intersection argument), so v's local condition can be finalized:
surjectivity needs the combined neighbour images to cover N_H(phi(v)) unless
v is exempt, and injectivity forbids any repeated image among them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .graphs import Graph, find_c_deletion_set
from .homs import Mode, PartialHom, augments, check_mapping, weak_surj
from .structure import Extension, TypeClass, canonical_form

State = tuple[tuple[tuple[int, int], ...], tuple[tuple[int, frozenset[int]], ...]]

_MEMO: dict[tuple, tuple[bool, Optional[tuple[int, ...]]]] = {}


@dataclass
class DpStats:
    dp_calls: int = 0
    dp_cache_hits: int = 0


def clear_dp_memo() -> None:
    _MEMO.clear()


def _component_pieces(ext: Extension) -> list[tuple[list[int], list[int]]]:
    """Per component: (deletion-set vertices, remaining vertices in BFS-ish order).

    The deletion set is found by scanning (k+c) budgets upward, so bags stay
    as small as the component structure allows.
    """
    out = []
    for comp in ext.components():
        sub, order = ext.graph.induced(comp)
        found: Optional[frozenset[int]] = None
        for s in range(1, sub.n + 1):
            for k in range(0, s):
                c = s - k
                cand = find_c_deletion_set(sub, c, k)
                if cand is not None:
                    found = cand
                    break
            if found is not None:
                break
        assert found is not None
        s_c = sorted(order[i] for i in found)
        rest = [order[i] for i in range(sub.n) if order[i] not in s_c]
        out.append((s_c, rest))
    return out


def _piece_blocks(ext: Extension, s_c: list[int], rest: list[int]) -> list[list[int]]:
    """Components of C - S_C, each listed in ascending id order."""
    restset = set(rest)
    seen: set[int] = set()
    blocks = []
    for start in sorted(rest):
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        block = [start]
        while stack:
            v = stack.pop()
            for w in ext.graph.adj[v]:
                if w in restset and w not in seen:
                    seen.add(w)
                    block.append(w)
                    stack.append(w)
        blocks.append(sorted(block))
    return blocks


def exists_augmenting_hom(
    ext_g: Extension,
    ext_h: Extension,
    phi_p: PartialHom,
    mode: Mode,
    stats: Optional[DpStats] = None,
) -> Optional[list[int]]:
    """A map from ext_g to ext_h augmenting phi_p under ``mode``, or None.

    ``phi_p`` maps base positions of ext_g to base positions of ext_h and
    must be a homomorphism on its domain.  Supported modes: weak surjective
    (exempt = base), locally surjective, locally bijective.
    """
    bg, bh = ext_g.base_size, ext_h.base_size
    if tuple(phi_p.domain) != tuple(range(bg)):
        raise ValueError("phi_p domain must be the guest base")
    if any(not (0 <= x < bh) for x in phi_p.images):
        raise ValueError("phi_p image must lie in the host base")
    if mode.kind == "weak" and mode.exempt != frozenset(range(bg)):
        raise ValueError("weak mode must exempt exactly the guest base")
    if mode.kind not in ("weak", "surj", "bij"):
        raise ValueError(f"unsupported dp mode {mode.kind!r}")
    g, h = ext_g.graph, ext_h.graph
    pin = {v: phi_p.images[i] for i, v in enumerate(phi_p.domain)}
    for u, v in g.edges:
        if u < bg and v < bg and not h.has_edge(pin[u], pin[v]):
            raise ValueError("phi_p is not a homomorphism on its domain")

    key = (
        canonical_form(ext_g)[0],
        canonical_form(ext_h)[0],
        tuple(phi_p.images),
        mode.kind,
    )
    if key in _MEMO:
        if stats:
            stats.dp_cache_hits += 1
        hit, wit = _MEMO[key]
        if not hit:
            return None
        # the memoized witness is valid only for canonically labelled inputs;
        # recompute when the concrete labelling differs
        if wit is not None and len(wit) == g.n:
            cand = list(wit)
            if check_mapping(g, h, cand, mode) and _augments_ext(cand, bg, bh):
                return cand
    if stats:
        stats.dp_calls += 1

    res = _run_dp(ext_g, ext_h, pin, mode)
    _MEMO[key] = (res is not None, tuple(res) if res is not None else None)
    return res


def _augments_ext(phi: Sequence[int], bg: int, bh: int) -> bool:
    return all((v < bg) == (phi[v] < bh) for v in range(len(phi)))


def _run_dp(ext_g: Extension, ext_h: Extension, pin: dict[int, int], mode: Mode) -> Optional[list[int]]:
    g, h = ext_g.graph, ext_h.graph
    bg, bh = ext_g.base_size, ext_h.base_size
    injective = mode.kind == "bij"

    def surj_required(v: int) -> bool:
        if mode.kind == "bij" or mode.kind == "surj":
            return True
        return v >= bg  # weak: base exempt

    def candidates(v: int) -> list[int]:
        if v < bg:
            return [pin[v]]
        out = []
        dg = g.deg(v)
        for x in range(bh, h.n):
            dh = h.deg(x)
            if injective and dg != dh:
                continue
            if not injective and dg < dh:
                continue
            out.append(x)
        return out

    # script of (op, vertex) steps; bag contents are implicit
    script: list[tuple[str, int]] = []
    for v in range(bg):
        script.append(("intro", v))
    for s_c, rest in _component_pieces(ext_g):
        for v in s_c:
            script.append(("intro", v))
        for block in _piece_blocks(ext_g, s_c, rest):
            for v in block:
                script.append(("intro", v))
            for v in block:
                script.append(("forget", v))
        for v in s_c:
            script.append(("forget", v))
    for v in range(bg):
        script.append(("forget", v))

    # states: dict mapping (phi_items, cov_items) -> provenance
    # provenance: (step_index, parent_state, introduced_image or None)
    start: State = ((), ())
    layers: list[dict[State, tuple[Optional[State], Optional[int]]]] = [{start: (None, None)}]

    for step, (op, v) in enumerate(script):
        cur = layers[-1]
        nxt: dict[State, tuple[Optional[State], Optional[int]]] = {}
        if op == "intro":
            for state in cur:
                phi_items, cov_items = state
                phi = dict(phi_items)
                for img in candidates(v):
                    ok = True
                    for w in g.adj[v]:
                        if w in phi and not h.has_edge(img, phi[w]):
                            ok = False
                            break
                    if not ok:
                        continue
                    new_phi = tuple(sorted(phi_items + ((v, img),)))
                    new_cov = tuple(sorted(cov_items + ((v, frozenset()),)))
                    ns = (new_phi, new_cov)
                    if ns not in nxt:
                        nxt[ns] = (state, img)
        else:  # forget
            for state in cur:
                phi_items, cov_items = state
                phi = dict(phi_items)
                cov = dict(cov_items)
                img = phi[v]
                bag_nbrs = [w for w in g.adj[v] if w in phi and w != v]
                images = [phi[w] for w in bag_nbrs]
                all_images = set(cov[v]) | set(images)
                if injective:
                    if len(images) != len(set(images)) or set(images) & cov[v]:
                        continue
                if surj_required(v) and all_images != set(h.adj[img]):
                    continue
                new_cov = []
                dead = False
                for w, s in cov_items:
                    if w == v:
                        continue
                    if w in g.adj[v]:
                        if injective and img in s:
                            dead = True
                            break
                        s = s | {img}
                    new_cov.append((w, s))
                if dead:
                    continue
                new_phi = tuple(item for item in phi_items if item[0] != v)
                ns = (new_phi, tuple(sorted(new_cov)))
                if ns not in nxt:
                    nxt[ns] = (state, None)
        if not nxt:
            return None
        layers.append(nxt)

    final = layers[-1]
    assert ((), ()) in final
    # walk provenance back to collect introduced images
    phi_out: list[Optional[int]] = [None] * g.n
    state: Optional[State] = ((), ())
    for step in range(len(script), 0, -1):
        entry = layers[step][state]
        parent, img = entry
        op, v = script[step - 1]
        if op == "intro":
            assert img is not None
            phi_out[v] = img
        state = parent
    result = [x for x in phi_out if x is not None]
    assert len(result) == g.n
    assert check_mapping(g, h, result, mode)
    assert _augments_ext(result, bg, bh)
    return result


def can_be_mapped(
    ext_g: Extension,
    t_h: TypeClass,
    phi_p: PartialHom,
    variant: str,
    stats: Optional[DpStats] = None,
) -> bool:
    """Whether ext_g maps to the type's representative under the variant.

    ``variant`` is one of ``weakS``, ``S``, ``B``.
    """
    mode = _variant_mode(variant, ext_g.base_size)
    return exists_augmenting_hom(ext_g, t_h.rep, phi_p, mode, stats) is not None


def _variant_mode(variant: str, base_size: int) -> Mode:
    from .homs import LOC_BIJ, LOC_SURJ

    if variant == "weakS":
        return weak_surj(frozenset(range(base_size)))
    if variant == "S":
        return LOC_SURJ
    if variant == "B":
        return LOC_BIJ
    raise ValueError(f"unknown variant {variant!r}")
