"""Bounded integer feasibility models and the exact solver behind them.

Models carry finitely bounded nonnegative integer variables and linear
constraints with integer coefficients.  Feasibility is decided by
depth-first search over the variables in declaration order with interval
constraint propagation, which makes the returned assignment the
lexicographically least feasible one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .graphs import Graph
from .structure import TypeClass


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: tuple[tuple[str, int], ...]  # (variable name, coefficient)
    rel: str  # '<=', '==', '>='
    rhs: int

    def __post_init__(self) -> None:
        if self.rel not in ("<=", "==", ">="):
            raise ValueError(f"unknown relation {self.rel!r}")


@dataclass
class ILPModel:
    variables: list[tuple[str, int, int]] = field(default_factory=list)  # (name, lo, hi)
    constraints: list[LinearConstraint] = field(default_factory=list)
    infeasible_reason: Optional[str] = None

    def add_var(self, name: str, lo: int, hi: int) -> None:
        self.variables.append((name, lo, hi))

    def add(self, coeffs: Sequence[tuple[str, int]], rel: str, rhs: int) -> None:
        self.constraints.append(LinearConstraint(tuple(coeffs), rel, rhs))

    def var_names(self) -> list[str]:
        return [name for name, _, _ in self.variables]


@dataclass(frozen=True)
class TargetDescription:
    """A family of hosts: a base graph, a size bound and constraints on types.

    A host satisfies the description iff it extends ``base``, all of its
    component types lie in ``host_types`` (each of at most base+c_prime
    vertices), and setting x_T to its type-counts satisfies ``ch``.  ``ch``
    constraints are dense over ``host_types`` by position.
    """

    base: Graph
    c_prime: int
    host_types: tuple[TypeClass, ...]
    ch: tuple[tuple[tuple[int, ...], str, int], ...]  # (coeffs, rel, rhs)

    def __post_init__(self) -> None:
        for t in self.host_types:
            if t.rep.base_size != self.base.n:
                raise ValueError("host type base does not match description base")
            if t.new_size > self.c_prime:
                raise ValueError("host type exceeds the description size bound")
        for coeffs, rel, rhs in self.ch:
            if len(coeffs) != len(self.host_types):
                raise ValueError("CH constraint arity mismatch")
            if rel not in ("<=", "==", ">="):
                raise ValueError(f"unknown relation {rel!r}")


def host_var(i: int) -> str:
    return f"x_T{i}"


def pair_var(e: int, t: int) -> str:
    return f"x_E{e}_T{t}"


def _pinned_upper(desc: TargetDescription, idx: int) -> Optional[int]:
    """Upper bound for x_T{idx} derivable from CH alone."""
    best: Optional[int] = None
    for coeffs, rel, rhs in desc.ch:
        if rel == ">=":
            continue
        c = coeffs[idx]
        if c <= 0:
            continue
        if any(x < 0 for x in coeffs):
            continue
        bound = rhs // c if rhs >= 0 else -1
        best = bound if best is None else min(best, bound)
    return best


def build_model_SB(
    tc_g: Sequence[int],
    wsm: set[tuple[int, int]],
    pairs: Sequence[tuple[tuple[int, ...], int]],
    desc: TargetDescription,
    mode: str,
) -> ILPModel:
    """Constraint system (CH, S1, S2, S3) or (CH, B1, B2) over type counts.

    ``tc_g`` is the guest census by guest-type position; ``pairs`` lists the
    mapped pairs as (guest sub-extension type-count vector, host type index);
    ``wsm`` holds (guest type index, host type index) weak pairs and is
    required in mode S.
    """
    if mode not in ("S", "B"):
        raise ValueError(f"mode must be 'S' or 'B', got {mode!r}")
    if mode == "S" and wsm is None:
        raise ValueError("mode S requires the weak mapping set")
    model = ILPModel()
    n_host = len(desc.host_types)

    pair_bounds: list[int] = []
    host_from_pairs = [0] * n_host
    for vec, ti in pairs:
        finite = [tc_g[j] // vec[j] for j in range(len(vec)) if vec[j] > 0]
        b = min(finite) if finite else None
        pinned = _pinned_upper(desc, ti)
        if b is None:
            b = pinned
        elif pinned is not None:
            b = min(b, pinned)
        if b is None:
            raise ValueError(f"unbounded pair variable for host type {ti}")
        pair_bounds.append(max(b, 0))
        host_from_pairs[ti] += max(b, 0)

    for i in range(n_host):
        pinned = _pinned_upper(desc, i)
        hi = host_from_pairs[i] if pinned is None else min(pinned, host_from_pairs[i])
        model.add_var(host_var(i), 0, max(hi, 0))
    for e, (_, ti) in enumerate(pairs):
        model.add_var(pair_var(e, ti), 0, pair_bounds[e])

    for coeffs, rel, rhs in desc.ch:
        model.add([(host_var(i), c) for i, c in enumerate(coeffs) if c != 0], rel, rhs)

    rel1 = "<=" if mode == "S" else "=="
    for j in range(len(tc_g)):
        coeffs = [
            (pair_var(e, ti), vec[j])
            for e, (vec, ti) in enumerate(pairs)
            if vec[j] != 0
        ]
        model.add(coeffs, rel1, tc_g[j])

    for i in range(n_host):
        coeffs = [(pair_var(e, ti), 1) for e, (_, ti) in enumerate(pairs) if ti == i]
        coeffs.append((host_var(i), -1))
        model.add(coeffs, "==", 0)

    if mode == "S":
        for j in range(len(tc_g)):
            partners = sorted({ti for (tj, ti) in wsm if tj == j})
            if not partners:
                model.infeasible_reason = (
                    f"guest type {j} admits no weak mapping to any host type"
                )
            model.add([(host_var(i), 1) for i in partners], ">=", 1)
    return model


def build_model_I(
    tc_g: Sequence[int],
    tc_h: Sequence[int],
    icm: Sequence[tuple[tuple[int, ...], int]],
) -> ILPModel:
    """Constraint system (I1, I2) for the locally injective pre-image count.

    ``icm`` pairs a guest pre-image class (0/1 vector over guest types) with
    a host type index.
    """
    model = ILPModel()
    for e, (vec, ti) in enumerate(icm):
        finite = [tc_g[j] // vec[j] for j in range(len(vec)) if vec[j] > 0]
        hi = min([tc_h[ti]] + finite)
        model.add_var(pair_var(e, ti), 0, max(hi, 0))
    for j in range(len(tc_g)):
        coeffs = [
            (pair_var(e, ti), vec[j])
            for e, (vec, ti) in enumerate(icm)
            if vec[j] != 0
        ]
        model.add(coeffs, "==", tc_g[j])
    for i in range(len(tc_h)):
        coeffs = [(pair_var(e, ti), 1) for e, (_, ti) in enumerate(icm) if ti == i]
        model.add(coeffs, "==", tc_h[i])
    return model


def solve_feasibility(model: ILPModel) -> Optional[dict[str, int]]:
    """Lexicographically least feasible assignment, or None.

    DFS over variables in declaration order, values ascending, tightening
    every variable's interval against every constraint after each choice.
    """
    if model.infeasible_reason is not None:
        return None
    names = []
    los: list[int] = []
    his: list[int] = []
    index: dict[str, int] = {}
    for name, lo, hi in model.variables:
        if lo > hi:
            return None
        if not (isinstance(lo, int) and isinstance(hi, int)) or hi >= 10 ** 12:
            raise ValueError(f"variable {name} is not finitely bounded")
        index[name] = len(names)
        names.append(name)
        los.append(lo)
        his.append(hi)
    cons = [
        ([(index[n], c) for n, c in con.coeffs], con.rel, con.rhs)
        for con in model.constraints
    ]
    for terms, _, _ in cons:
        for i, _ in terms:
            if i >= len(names):
                raise ValueError("constraint references undeclared variable")

    def propagate(lo: list[int], hi: list[int]) -> bool:
        changed = True
        while changed:
            changed = False
            for terms, rel, rhs in cons:
                if rel in ("<=", "=="):
                    # sum must be able to reach down to rhs
                    smin = sum(c * (lo[i] if c > 0 else hi[i]) for i, c in terms)
                    if smin > rhs:
                        return False
                    for i, c in terms:
                        slack = rhs - (smin - (c * (lo[i] if c > 0 else hi[i])))
                        if c > 0:
                            nb = slack // c
                            if nb < hi[i]:
                                hi[i] = nb
                                changed = True
                        else:
                            nb = -((-slack) // c)
                            if nb > lo[i]:
                                lo[i] = nb
                                changed = True
                if rel in (">=", "=="):
                    smax = sum(c * (hi[i] if c > 0 else lo[i]) for i, c in terms)
                    if smax < rhs:
                        return False
                    for i, c in terms:
                        slack = rhs - (smax - (c * (hi[i] if c > 0 else lo[i])))
                        if c > 0:
                            nb = -((-slack) // c)
                            if nb > lo[i]:
                                lo[i] = nb
                                changed = True
                        else:
                            nb = slack // c
                            if nb < hi[i]:
                                hi[i] = nb
                                changed = True
                for i, _ in terms:
                    if lo[i] > hi[i]:
                        return False
        return True

    def dfs(pos: int, lo: list[int], hi: list[int]) -> Optional[list[int]]:
        if not propagate(lo, hi):
            return None
        while pos < len(names) and lo[pos] == hi[pos]:
            pos += 1
        if pos == len(names):
            return lo
        for value in range(lo[pos], hi[pos] + 1):
            nlo, nhi = list(lo), list(hi)
            nlo[pos] = nhi[pos] = value
            res = dfs(pos + 1, nlo, nhi)
            if res is not None:
                return res
        return None

    res = dfs(0, list(los), list(his))
    if res is None:
        return None
    assignment = dict(zip(names, res))
    assert _satisfies(model, assignment)
    return assignment


def _satisfies(model: ILPModel, assignment: dict[str, int]) -> bool:
    for name, lo, hi in model.variables:
        if not (lo <= assignment[name] <= hi):
            return False
    for con in model.constraints:
        total = sum(c * assignment[n] for n, c in con.coeffs)
        if con.rel == "<=" and total > con.rhs:
            return False
        if con.rel == ">=" and total < con.rhs:
            return False
        if con.rel == "==" and total != con.rhs:
            return False
    return True


def dump_model(model: ILPModel) -> str:
    """Plain-text listing for inspection; not a stable interchange format."""
    lines = ["feasibility"]
    lines.append("subject to")
    for con in model.constraints:
        terms = " + ".join(
            (f"{c}*{n}" if c != 1 else n) for n, c in con.coeffs
        ) or "0"
        lines.append(f"  {terms} {con.rel} {con.rhs}")
    lines.append("bounds")
    for name, lo, hi in model.variables:
        lines.append(f"  {lo} <= {name} <= {hi}")
    return "\n".join(lines)
