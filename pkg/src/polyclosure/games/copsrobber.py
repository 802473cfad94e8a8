"""The Cops&Robber game on an l-regular graph and the girth-based Robber
strategy.

Cop holds up to k pebbles on edges (the set F), Robber one pebble on a
vertex u.  Cop wins as soon as a pebbled edge touches u.  Otherwise Cop
announces a new edge set F' and Robber answers with l edge-disjoint simple
paths from u that avoid the edges kept in place (F & F'); Cop then picks
the path whose end becomes Robber's new vertex.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from ..errors import BudgetExceeded, InvariantViolation, PreconditionError
from ..graphs import (OrderedGraph, bfs_distances, disjoint_path_systems,
                      edge_disjoint_paths_to, girth, path_edges)

CR_POSITION_CAP = 200_000


def edge_sets(m: int, k: int) -> list[frozenset]:
    """All subsets of ``range(m)`` with at most k elements, by size then
    lexicographically."""
    return [frozenset(c) for r in range(min(k, m) + 1) for c in itertools.combinations(range(m), r)]


def _check(G: OrderedGraph, k: int, ell: int | None) -> int:
    if k < 0:
        raise ValueError("k must be >= 0")
    if not G.is_regular() or G.n == 0:
        raise PreconditionError("the game is defined on regular graphs")
    deg = G.degree(0)
    if ell is not None and ell != deg:
        raise PreconditionError(f"graph is {deg}-regular, not {ell}-regular")
    count = len(edge_sets(len(G.edges), k)) * G.n if len(G.edges) < 64 else math.inf
    if count > CR_POSITION_CAP:
        raise BudgetExceeded(f"{count} positions exceed the cap {CR_POSITION_CAP}")
    return deg


@dataclass
class CRSolution:
    """Greatest fixpoint of Robber-safe positions plus strategies.

    ``depth[(F, u)]`` is the number of rounds within which Cop wins from an
    unsafe position (0 = captured on the spot).
    """

    graph: OrderedGraph
    k: int
    ell: int
    safe: frozenset
    depth: dict = field(repr=False)
    passes: int = 0

    def is_safe(self, F: Iterable[int], u: int) -> bool:
        return (frozenset(F), u) in self.safe

    def safe_vertices(self, F: Iterable[int] = ()) -> list[int]:
        F = frozenset(F)
        return [u for u in range(self.graph.n) if (F, u) in self.safe]

    def robber_strategy(self, F: Iterable[int], u: int, F_new: Iterable[int]) -> list[tuple[int, ...]]:
        """Escape paths from a safe (F, u) against Cop's F_new, all ending at
        vertices safe for F_new."""
        F, F_new = frozenset(F), frozenset(F_new)
        if (F, u) not in self.safe:
            raise PreconditionError(f"position ({sorted(F)}, {u}) is not safe")
        if len(F_new) > self.k:
            raise PreconditionError("Cop may place at most k pebbles")
        targets = {w for w in range(self.graph.n) if (F_new, w) in self.safe}
        paths = edge_disjoint_paths_to(self.graph, u, targets, F & F_new, self.ell)
        if paths is None:
            raise InvariantViolation("safe position without escape paths")
        return paths

    escape_paths = robber_strategy

    def cop_strategy(self, F: Iterable[int], u: int):
        """Cop's next edge set from an unsafe position, or None if Robber
        is already captured."""
        F = frozenset(F)
        d = self.depth.get((F, u))
        if d is None:
            raise PreconditionError("position is safe for Robber")
        if d == 0:
            return None
        for F_new in edge_sets(len(self.graph.edges), self.k):
            # the alive set during the pass that removed (F, u)
            targets = {w for w in range(self.graph.n) if self.depth.get((F_new, w), math.inf) >= d}
            if edge_disjoint_paths_to(self.graph, u, targets, F & F_new, self.ell) is None:
                return F_new
        raise InvariantViolation("unsafe position without a Cop move")

    def cop_pick(self, F_new: Iterable[int], paths) -> int:
        """Index of the path whose endpoint is worst for Robber."""
        F_new = frozenset(F_new)
        scores = [self.depth.get((F_new, p[-1]), math.inf) for p in paths]
        return min(range(len(paths)), key=lambda i: scores[i])

    def as_dict(self) -> dict:
        return {
            "k": self.k, "ell": self.ell, "passes": self.passes,
            "safe_for_empty": self.safe_vertices(()),
            "safe_positions": len(self.safe),
        }


def solve_cr_game(G: OrderedGraph, k: int, ell: int | None = None) -> CRSolution:
    """Fixpoint solver.  A position survives a pass iff no pebble touches u
    and for every F' there are l edge-disjoint paths (a unit-capacity flow)
    from u avoiding F & F' into the vertices currently safe for F'."""
    ell = _check(G, k, ell)
    sets = edge_sets(len(G.edges), k)
    inc = [frozenset(G.incident_edges(u)) for u in range(G.n)]
    alive = {(F, u) for F in sets for u in range(G.n) if not inc[u] & F}
    depth = {(F, u): 0 for F in sets for u in range(G.n) if inc[u] & F}
    passes = 0
    while True:
        passes += 1
        safe_for = {F: {u for u in range(G.n) if (F, u) in alive} for F in sets}
        memo = {}
        removed = []
        for F, u in sorted(alive, key=lambda p: (sorted(p[0]), p[1])):
            for F_new in sets:
                key = (u, F & F_new, F_new)
                if key not in memo:
                    memo[key] = edge_disjoint_paths_to(G, u, safe_for[F_new], F & F_new, ell) is not None
                if not memo[key]:
                    removed.append((F, u))
                    break
        if not removed:
            break
        for p in removed:
            alive.discard(p)
            depth[p] = passes
    return CRSolution(G, k, ell, frozenset(alive), depth, passes)


def solve_cr_game_minimax(G: OrderedGraph, k: int, ell: int | None = None) -> frozenset:
    """Independent solver: memoised bounded-horizon minimax over explicit
    path systems, deepened until the surviving set stops changing."""
    ell = _check(G, k, ell)
    sets = edge_sets(len(G.edges), k)
    inc = [frozenset(G.incident_edges(u)) for u in range(G.n)]

    @lru_cache(maxsize=None)
    def survives(F, u, t):
        if inc[u] & F:
            return False
        if t == 0:
            return True
        for F_new in sets:
            targets = frozenset(w for w in range(G.n) if survives(F_new, w, t - 1))
            if not has_system(u, F & F_new, targets):
                return False
        return True

    @lru_cache(maxsize=None)
    def has_system(u, blocked, targets):
        for _ in disjoint_path_systems(G, u, blocked, ell, targets=targets, minimal=True):
            return True
        return False

    positions = [(F, u) for F in sets for u in range(G.n)]
    prev = None
    t = 0
    while True:
        cur = frozenset(p for p in positions if survives(p[0], p[1], t))
        if cur == prev:
            return cur
        prev = cur
        t += 1


# ---- girth strategy -------------------------------------------------------------

def _far(G, u, F, d):
    dist = bfs_distances(G, u)
    return all(dist.get(x, math.inf) > d for e in F for x in G.edges[e])


def invariant_star(G: OrderedGraph, u: int, F: Iterable[int], d: int) -> bool:
    """No endpoint of an edge of F lies within distance d of u."""
    return _far(G, u, frozenset(F), d)


def robber_girth_move(G: OrderedGraph, d: int, pos: tuple, F_new: Iterable[int]) -> list[tuple[int, ...]]:
    """Robber's answer from the high-girth argument.

    Inside the radius-3d ball around u (a tree because girth > 6d) every
    child u_i of u has (l-1)^(d-1) descendants x at depth d; one of them
    has a subtree free of F_new endpoints.  The path runs from u through
    u_i and x down to a vertex y at distance d below x.
    """
    F, u = pos
    F, F_new = frozenset(F), frozenset(F_new)
    if d < 1:
        raise PreconditionError("d must be >= 1")
    if not G.is_regular() or G.n == 0:
        raise PreconditionError("graph must be regular")
    ell = G.degree(0)
    if not girth(G) > 6 * d:
        raise PreconditionError(f"girth {girth(G)} is not larger than 6d = {6 * d}")
    if not _far(G, u, F, d):
        raise PreconditionError("position violates the distance invariant")
    if not (ell - 1) ** (d - 1) > 2 * len(F_new):
        raise PreconditionError(f"(l-1)^(d-1) = {(ell - 1) ** (d - 1)} is not larger than 2|F'| = {2 * len(F_new)}")

    radius = 3 * d
    parent = {u: None}
    level = {u: 0}
    order = [u]
    for x in order:
        if level[x] == radius:
            continue
        for y in G.neighbors(x):
            if y == parent[x]:
                continue
            if y in parent:
                raise InvariantViolation("ball around u is not a tree")
            parent[y] = x
            level[y] = level[x] + 1
            order.append(y)
    children = {x: [] for x in order}
    for x in order[1:]:
        children[parent[x]].append(x)

    def subtree(x):
        out, stack = [], [x]
        while stack:
            z = stack.pop()
            out.append(z)
            stack.extend(children[z])
        return out

    def descendants_at(x, dist):
        layer = [x]
        for _ in range(dist):
            layer = [c for z in layer for c in children[z]]
        return layer

    C = {x for e in F_new for x in G.edges[e]}
    paths = []
    for ui in children[u]:
        x = next((x for x in descendants_at(ui, d - 1) if not C.intersection(subtree(x))), None)
        if x is None:
            raise InvariantViolation(f"no free subtree below child {ui}")
        y = descendants_at(x, d)[0]
        path = [y]
        while path[-1] != u:
            path.append(parent[path[-1]])
        paths.append(tuple(reversed(path)))

    used = set()
    for p in paths:
        es = path_edges(G, p)
        if used.intersection(es):
            raise InvariantViolation("escape paths share an edge")
        if (F & F_new).intersection(es):
            raise InvariantViolation("escape path uses a pebbled edge")
        if not _far(G, p[-1], F_new, d):
            raise InvariantViolation("endpoint violates the distance invariant")
        used.update(es)
    if len(paths) != ell:
        raise InvariantViolation("wrong number of escape paths")
    return paths


@dataclass(frozen=True)
class GirthStrategy:
    """Robber certificate from the girth argument: positions satisfying the
    distance invariant are treated as safe."""

    graph: OrderedGraph
    d: int

    def is_safe(self, F: Iterable[int], u: int) -> bool:
        return invariant_star(self.graph, u, F, self.d)

    def escape_paths(self, F, u, F_new):
        return robber_girth_move(self.graph, self.d, (F, u), F_new)
