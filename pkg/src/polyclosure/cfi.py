"""CFI structures over ordered regular graphs and edge-preserving bijections.

Elements of the universe ``E x [2]`` are encoded as ``2 * edge + (i - 1)``,
so ``(e, 1) -> 2e`` and ``(e, 2) -> 2e + 1``.  An edge-preserving bijection
is represented by its switch set, the set of edges on which it swaps the
two copies.  Every such map is an involution.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .csp import c_ell_vocabulary
from .errors import PreconditionError
from .graphs import OrderedGraph, path_edges
from .structures import Structure, is_partial_isomorphism

V0 = 0


def element(edge: int, i: int) -> int:
    """Code of ``(edge, i)`` for i in {1, 2}."""
    if i not in (1, 2):
        raise ValueError("copy index must be 1 or 2")
    return 2 * edge + i - 1


def element_edge(a: int) -> int:
    return a // 2


def edges_of(elements: Iterable[int]) -> frozenset[int]:
    """Edges touched by a set of elements (the F_alpha of an assignment)."""
    return frozenset(a // 2 for a in elements)


def gadget(G: OrderedGraph, v: int, parity: int) -> frozenset[tuple[int, ...]]:
    """Tuples over the ordered edges of v whose copy indices sum to
    ``parity`` mod 2 (parity 0 gives R(v), parity 1 gives the twisted one)."""
    ev = G.incident_edges(v)
    out = []
    for idx in itertools.product((1, 2), repeat=len(ev)):
        if sum(idx) % 2 == parity:
            out.append(tuple(element(e, i) for e, i in zip(ev, idx)))
    return frozenset(out)


@dataclass(frozen=True)
class CFIInstance:
    graph: OrderedGraph
    U: frozenset
    structure: Structure

    @property
    def ell(self) -> int:
        return self.graph.degree_ell

    @property
    def n(self) -> int:
        return self.structure.n


def _check_graph(G: OrderedGraph) -> int:
    if G.n == 0 or not G.edges:
        raise PreconditionError("graph must have at least one edge")
    if not G.is_regular():
        raise PreconditionError("graph must be regular")
    if not G.is_connected():
        raise PreconditionError("graph must be connected")
    return G.degree(0)


def build_cfi(G: OrderedGraph, U: Iterable[int] = ()) -> CFIInstance:
    """R0 collects R(v) for v outside U and the twisted gadget inside U;
    R1 is the complementary assembly."""
    ell = _check_graph(G)
    U = frozenset(U)
    if any(not 0 <= u < G.n for u in U):
        raise ValueError("U must be a set of vertices")
    r0, r1 = set(), set()
    for v in range(G.n):
        even, odd = gadget(G, v, 0), gadget(G, v, 1)
        if v in U:
            r0 |= odd
            r1 |= even
        else:
            r0 |= even
            r1 |= odd
    S = Structure(c_ell_vocabulary(ell), 2 * len(G.edges), {"R0": r0, "R1": r1})
    return CFIInstance(G, U, S)


def even_cfi(G: OrderedGraph) -> CFIInstance:
    return build_cfi(G, ())


def odd_cfi(G: OrderedGraph) -> CFIInstance:
    return build_cfi(G, (V0,))


# ---- switch sets -------------------------------------------------------------

@dataclass(frozen=True)
class SwitchSet:
    """Edge-preserving bijection of ``E x [2]`` that swaps the copies of
    exactly the edges in ``switched``."""

    graph: OrderedGraph
    switched: frozenset

    def __post_init__(self):
        s = frozenset(int(e) for e in self.switched)
        if any(not 0 <= e < len(self.graph.edges) for e in s):
            raise ValueError("switch set contains a non-edge")
        object.__setattr__(self, "switched", s)

    @classmethod
    def identity(cls, G: OrderedGraph) -> "SwitchSet":
        return cls(G, frozenset())

    def __call__(self, a: int) -> int:
        return a ^ 1 if a // 2 in self.switched else a

    def apply(self, tup: Sequence[int]) -> tuple[int, ...]:
        return tuple(self(a) for a in tup)

    def inverse(self) -> "SwitchSet":
        return self

    def to_list(self) -> list[int]:
        return sorted(self.switched)

    def switching_number(self, v: int) -> int:
        return sum(1 for e in self.graph.incident_edges(v) if e in self.switched)

    def odd_set(self) -> frozenset[int]:
        return frozenset(v for v in range(self.graph.n) if self.switching_number(v) % 2)

    def is_good(self) -> bool:
        odd = self.odd_set()
        return not odd or (len(odd) == 2 and V0 in odd)

    def twist(self) -> int:
        odd = self.odd_set()
        if not odd:
            return V0
        if len(odd) == 2 and V0 in odd:
            return max(odd)
        raise PreconditionError(f"switch set {self.to_list()} is not good (Odd = {sorted(odd)})")

    def is_good_for(self, F: Iterable[int]) -> bool:
        if not self.is_good():
            return False
        return not set(self.graph.incident_edges(self.twist())) & set(F)

    def along_path(self, path: Sequence[int]) -> "SwitchSet":
        """Switch additionally on the edges of ``path`` (a vertex sequence
        starting at the twist); the twist moves to the path's end."""
        tw = self.twist()
        if not path or path[0] != tw:
            raise PreconditionError(f"path must start at the twist {tw}")
        if len(set(path)) != len(path):
            raise PreconditionError("path must be simple")
        out = SwitchSet(self.graph, self.switched.symmetric_difference(path_edges(self.graph, path)))
        if out.twist() != path[-1]:
            raise AssertionError("twist did not follow the path")
        return out

    def to_bijection(self) -> list[int]:
        return [self(a) for a in range(2 * len(self.graph.edges))]

    def restrict(self, F: Iterable[int]) -> dict[int, int]:
        """The bijection restricted to ``F x [2]``."""
        return {a: self(a) for e in sorted(set(F)) for a in (2 * e, 2 * e + 1)}


def switching_number(S: SwitchSet, v: int) -> int:
    return S.switching_number(v)


def odd_set(S: SwitchSet) -> frozenset[int]:
    return S.odd_set()


def twist(S: SwitchSet) -> int:
    return S.twist()


def is_good(S: SwitchSet) -> bool:
    return S.is_good()


def is_good_for(S: SwitchSet, F: Iterable[int]) -> bool:
    return S.is_good_for(F)


def switch_along_path(S: SwitchSet, path: Sequence[int]) -> SwitchSet:
    return S.along_path(path)


def to_bijection(inst: CFIInstance, S: SwitchSet) -> list[int]:
    return S.to_bijection()


def restrict(S: SwitchSet, F: Iterable[int]) -> dict[int, int]:
    return S.restrict(F)


def all_switch_sets(G: OrderedGraph):
    m = len(G.edges)
    for mask in range(1 << m):
        yield SwitchSet(G, frozenset(e for e in range(m) if mask >> e & 1))


def is_automorphism(S: SwitchSet, inst: CFIInstance) -> bool:
    A = inst.structure
    return all(frozenset(S.apply(t) for t in A[s]) == A[s] for s in A.vocab.names)


def restriction_is_partial_iso(S: SwitchSet, F: Iterable[int], ev: CFIInstance, od: CFIInstance) -> bool:
    return is_partial_isomorphism(ev.structure, od.structure, S.restrict(F))


def gadget_behaviour(S: SwitchSet, v: int) -> str:
    """``"auto"`` if S maps R(v) onto itself, ``"swap"`` if onto the twisted
    gadget, ``"neither"`` otherwise (impossible for edge-preserving maps)."""
    G = S.graph
    even, odd = gadget(G, v, 0), gadget(G, v, 1)
    img = frozenset(S.apply(t) for t in even)
    if img == even and frozenset(S.apply(t) for t in odd) == odd:
        return "auto"
    if img == odd and frozenset(S.apply(t) for t in odd) == even:
        return "swap"
    return "neither"
