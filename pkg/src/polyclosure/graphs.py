"""Ordered simple graphs, girth and distance queries, regular-graph search,
and edge-disjoint path systems."""
from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import PreconditionError
from .structures import Structure, Vocabulary, find_isomorphism

ORBIT_LIMIT = 8  # up to this many vertices, isomorphism dedupe stores whole relabelling orbits


@dataclass(frozen=True)
class OrderedGraph:
    """Simple undirected graph on ``0..n-1``; the vertex order is the
    integer order, so ``v0 = 0``.

    Edges are stored as sorted pairs ``(u, v)`` with ``u < v``; the edge
    index is the position in the sorted edge list.  The edges around a
    vertex are ordered by the index of their other endpoint.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        norm = []
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {(u, v)} leaves vertex range {self.n}")
            norm.append((min(u, v), max(u, v)))
        if len(set(norm)) != len(norm):
            raise ValueError("multi-edges are not allowed")
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "OrderedGraph":
        return cls(n, tuple((int(u), int(v)) for u, v in edges))

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    def edge_id(self, u: int, v: int) -> int:
        return self.edge_index[(min(u, v), max(u, v))]

    @cached_property
    def _adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adjacency[v]

    def degree(self, v: int) -> int:
        return len(self._adjacency[v])

    def incident_edges(self, v: int) -> tuple[int, ...]:
        """Edge indices of E(v), ordered by the other endpoint."""
        return tuple(self.edge_id(v, w) for w in self._adjacency[v])

    def other_end(self, e: int, v: int) -> int:
        a, b = self.edges[e]
        return b if a == v else a

    def is_regular(self, ell: int | None = None) -> bool:
        degs = {self.degree(v) for v in range(self.n)}
        if ell is None:
            return len(degs) <= 1
        return degs <= {ell} and (self.n == 0 or degs == {ell})

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            parent[find(u)] = find(v)
        return len({find(x) for x in range(self.n)}) == 1

    @property
    def degree_ell(self) -> int:
        return self.degree(0) if self.n else 0


def graph_structure(G: OrderedGraph) -> Structure:
    """G as a structure with one symmetric binary relation ``E``."""
    rel = [(u, v) for u, v in G.edges] + [(v, u) for u, v in G.edges]
    return Structure(Vocabulary.of(("E", 2)), G.n, {"E": rel})


def graph_from_structure(S: Structure, symbol: str = "E") -> OrderedGraph:
    return OrderedGraph.from_edges(S.n, sorted({(min(u, v), max(u, v)) for u, v in S[symbol] if u != v}))


# ---- named graphs ----------------------------------------------------------

def complete_graph(n: int) -> OrderedGraph:
    return OrderedGraph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def complete_bipartite(a: int, b: int) -> OrderedGraph:
    return OrderedGraph.from_edges(a + b, [(u, a + v) for u in range(a) for v in range(b)])


def cycle_graph(n: int) -> OrderedGraph:
    return OrderedGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> OrderedGraph:
    return OrderedGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen_graph() -> OrderedGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return OrderedGraph.from_edges(10, outer + spokes + inner)


def disjoint_union(G: OrderedGraph, H: OrderedGraph) -> OrderedGraph:
    return OrderedGraph.from_edges(G.n + H.n, list(G.edges) + [(u + G.n, v + G.n) for u, v in H.edges])


def named_graph(name: str) -> OrderedGraph:
    name = name.lower()
    if name == "petersen":
        return petersen_graph()
    if name.startswith("k") and "," in name:
        a, b = name[1:].split(",")
        return complete_bipartite(int(a), int(b))
    if name.startswith("k") and name[1:].isdigit():
        return complete_graph(int(name[1:]))
    if name.startswith("c") and name[1:].isdigit():
        return cycle_graph(int(name[1:]))
    raise ValueError(f"unknown graph name {name!r}")


# ---- distances -------------------------------------------------------------

def bfs_distances(G: OrderedGraph, source: int) -> dict[int, int]:
    dist = {source: 0}
    q = deque([source])
    while q:
        x = q.popleft()
        for y in G.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


def distance(G: OrderedGraph, a: int, b: int) -> float:
    return bfs_distances(G, a).get(b, math.inf)


def ball(G: OrderedGraph, u: int, d: int) -> set[int]:
    return {x for x, k in bfs_distances(G, u).items() if k <= d}


def girth(G: OrderedGraph) -> float:
    """Length of a shortest cycle (``math.inf`` for forests)."""
    best = math.inf
    for s in range(G.n):
        dist = {s: 0}
        parent = {s: None}
        q = deque([s])
        while q:
            x = q.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for y in G.neighbors(x):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    q.append(y)
                elif parent[x] != y:
                    best = min(best, dist[x] + dist[y] + 1)
    return best


# ---- random regular graphs -------------------------------------------------

class _Multigraph:
    def __init__(self, n, edges):
        self.n = n
        self.edges = list(edges)
        self.adj = [[] for _ in range(n)]
        for i, (u, v) in enumerate(self.edges):
            self.adj[u].append(i)
            if v != u:
                self.adj[v].append(i)

    def swap(self, i, j, cross):
        (a, b), (c, d) = self.edges[i], self.edges[j]
        new_i, new_j = ((a, c), (b, d)) if cross else ((a, d), (b, c))
        for k, (old, new) in ((i, ((a, b), new_i)), (j, ((c, d), new_j))):
            for x in set(old):
                self.adj[x].remove(k)
            self.edges[k] = new
            self.adj[new[0]].append(k)
            if new[1] != new[0]:
                self.adj[new[1]].append(k)

    def on_short_cycle(self, i, g):
        u, v = self.edges[i]
        if u == v:
            return True
        limit = g - 2
        dist = {u: 0}
        q = deque([u])
        while q:
            x = q.popleft()
            if dist[x] >= limit:
                continue
            for k in self.adj[x]:
                if k == i:
                    continue
                a, b = self.edges[k]
                y = b if a == x else a
                if y == v:
                    return True
                if y not in dist:
                    dist[y] = dist[x] + 1
                    q.append(y)
        return False

    def components(self):
        seen = [-1] * self.n
        c = 0
        for s in range(self.n):
            if seen[s] >= 0:
                continue
            seen[s] = c
            stack = [s]
            while stack:
                x = stack.pop()
                for k in self.adj[x]:
                    a, b = self.edges[k]
                    for y in (a, b):
                        if seen[y] < 0:
                            seen[y] = c
                            stack.append(y)
            c += 1
        return seen, c

    def defects(self, g):
        return [i for i in range(len(self.edges)) if self.on_short_cycle(i, g)]


def generate_regular(ell: int, vertex_count: int, min_girth: int = 3, seed: int = 0,
                     budget: int = 200_000) -> OrderedGraph | None:
    """Random connected ell-regular simple graph with girth >= min_girth.

    Pairing model followed by double-edge swaps that never increase the
    number of defective edges (loops, multi-edges, edges on short cycles)
    plus disconnected components.  ``budget`` bounds the total number of
    swap attempts across restarts; each restart uses a seed derived from
    ``seed``.  Returns None when the budget runs out.
    """
    if (ell * vertex_count) % 2:
        raise PreconditionError("ell * vertex_count must be even")
    if ell < 1 or ell >= vertex_count:
        return None
    min_girth = max(min_girth, 3)
    spent = 0
    attempt = 0
    per_attempt = max(200, 40 * ell * vertex_count)
    while spent < budget:
        rng = random.Random(f"{seed}:{attempt}")
        attempt += 1
        stubs = [v for v in range(vertex_count) for _ in range(ell)]
        rng.shuffle(stubs)
        mg = _Multigraph(vertex_count, zip(stubs[::2], stubs[1::2]))
        m = len(mg.edges)

        def score():
            bad = mg.defects(min_girth)
            _, comps = mg.components()
            return len(bad) + comps - 1, bad

        cur, bad = score()
        steps = 0
        while cur > 0 and steps < per_attempt and spent < budget:
            steps += 1
            spent += 1
            i = rng.choice(bad) if bad else rng.randrange(m)
            j = rng.randrange(m)
            if j == i:
                continue
            cross = rng.random() < 0.5
            mg.swap(i, j, cross)
            new, new_bad = score()
            if new <= cur:
                cur, bad = new, new_bad
            else:
                # a crossing swap on the new pair restores either kind of swap
                mg.swap(i, j, True)
        if cur == 0:
            G = OrderedGraph.from_edges(vertex_count, mg.edges)
            if G.is_regular(ell) and G.is_connected() and girth(G) >= min_girth:
                return G
    return None


def regular_graphs(n: int, ell: int, *, connected: bool = False) -> list[OrderedGraph]:
    """All ell-regular simple graphs on n vertices, one per isomorphism class.

    Labelled graphs are generated by backtracking (each vertex in turn picks
    its missing neighbours among later vertices) and then deduplicated with
    :func:`find_isomorphism` inside buckets of a cheap invariant.
    """
    if (n * ell) % 2 or ell >= n:
        return []
    deg = [0] * n
    edges = []
    found = []

    def rec(v):
        if v == n:
            found.append(tuple(edges))
            return
        need = ell - deg[v]
        if need == 0:
            rec(v + 1)
            return
        cands = [w for w in range(v + 1, n) if deg[w] < ell]
        for chosen in itertools.combinations(cands, need):
            for w in chosen:
                deg[w] += 1
                edges.append((v, w))
            deg[v] += need
            rec(v + 1)
            deg[v] -= need
            for w in chosen:
                deg[w] -= 1
                edges.pop()

    rec(0)
    reps: dict = {}
    seen = set()
    out = []
    for es in found:
        if es in seen:
            continue
        G = OrderedGraph.from_edges(n, es)
        if connected and not G.is_connected():
            continue
        if n <= ORBIT_LIMIT:
            # store the whole relabelling orbit so later copies are skipped
            for perm in itertools.permutations(range(n)):
                seen.add(tuple(sorted((min(perm[a], perm[b]), max(perm[a], perm[b])) for a, b in es)))
            out.append(G)
            continue
        key = _graph_invariant(G)
        S = graph_structure(G)
        bucket = reps.setdefault(key, [])
        if any(find_isomorphism(S, T) is not None for T in bucket):
            continue
        bucket.append(S)
        out.append(G)
    return out


def _graph_invariant(G):
    profile = []
    for v in range(G.n):
        d = bfs_distances(G, v)
        counts = [0] * (G.n + 1)
        for x in d.values():
            counts[x] += 1
        profile.append((len(d), tuple(counts)))
    return (girth(G), tuple(sorted(profile)))


# ---- path systems ------------------------------------------------------------

def path_edges(G: OrderedGraph, path: Sequence[int]) -> list[int]:
    return [G.edge_id(a, b) for a, b in zip(path, path[1:])]


def _simple_paths(G, start, first, blocked, targets, minimal):
    """Simple paths (vertex tuples) beginning ``start, first`` whose edges
    avoid ``blocked``.  With ``targets``, only paths ending in targets are
    produced; ``minimal`` stops each path at its first target vertex."""
    stack = [((start, first), {start, first})]
    while stack:
        path, seen = stack.pop()
        end = path[-1]
        hit = targets is None or end in targets
        if hit:
            yield path
            if minimal and targets is not None:
                continue
        nexts = [w for w in G.neighbors(end)
                 if w not in seen and G.edge_id(end, w) not in blocked]
        for w in reversed(nexts):
            stack.append((path + (w,), seen | {w}))


def disjoint_path_systems(G: OrderedGraph, u: int, forbidden: Iterable[int], ell: int, *,
                          targets: Iterable[int] | None = None,
                          minimal: bool = False) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Systems of ``ell`` simple paths from u, each with at least one edge,
    pairwise edge-disjoint, avoiding the ``forbidden`` edge indices.

    Paths are vertex tuples starting at u.  Systems are produced once up to
    reordering: their first vertices are strictly increasing.  ``targets``
    restricts endpoints; ``minimal`` additionally cuts every path at its
    first target (enough when only the endpoints matter).  Every yielded
    system is re-validated before it is handed out.
    """
    forbidden = frozenset(forbidden)
    targets = None if targets is None else frozenset(targets) - {u}
    if any(e in forbidden for e in G.incident_edges(u)):
        return
    firsts = [w for w in G.neighbors(u)]
    if len(firsts) < ell:
        return

    def rec(i, last, used, acc):
        if i == ell:
            yield tuple(acc)
            return
        for w in firsts:
            if w <= last:
                continue
            if sum(1 for x in firsts if x > w) < ell - i - 1:
                break
            e0 = G.edge_id(u, w)
            if e0 in used:
                continue
            for p in _simple_paths(G, u, w, forbidden | used, targets, minimal):
                es = path_edges(G, p)
                if used.intersection(es):
                    continue
                acc.append(p)
                yield from rec(i + 1, w, used | set(es), acc)
                acc.pop()

    for system in rec(0, -1, frozenset(), []):
        _validate_system(G, u, forbidden, system)
        yield system


def _validate_system(G, u, forbidden, system):
    seen = set()
    for p in system:
        if p[0] != u or len(p) < 2 or len(set(p)) != len(p):
            raise AssertionError(f"malformed path {p}")
        es = path_edges(G, p)
        if seen.intersection(es) or forbidden.intersection(es):
            raise AssertionError(f"path system {system} is not disjoint/avoiding")
        seen.update(es)


def edge_disjoint_paths_to(G: OrderedGraph, u: int, targets: Iterable[int],
                           blocked: Iterable[int], count: int) -> list[tuple[int, ...]] | None:
    """``count`` pairwise edge-disjoint simple paths from u to vertices of
    ``targets - {u}`` avoiding ``blocked`` edges, or None if impossible.

    Unit-capacity augmenting paths on the undirected graph, then a flow
    decomposition whose walks are shortcut to simple paths and cut at the
    first target they reach.  Several paths may share an endpoint.
    """
    targets = set(targets) - {u}
    blocked = set(blocked)
    if not targets or count <= 0:
        return [] if count <= 0 else None
    flow = {}

    def residual(x, y):
        return 1 - flow.get((x, y), 0)

    for _ in range(count):
        prev = {u: None}
        q = deque([u])
        hit = None
        while q and hit is None:
            x = q.popleft()
            for y in G.neighbors(x):
                if y in prev or G.edge_id(x, y) in blocked or residual(x, y) <= 0:
                    continue
                prev[y] = x
                if y in targets:
                    hit = y
                    break
                q.append(y)
        if hit is None:
            return None
        y = hit
        while prev[y] is not None:
            x = prev[y]
            flow[(x, y)] = flow.get((x, y), 0) + 1
            flow[(y, x)] = flow.get((y, x), 0) - 1
            y = x

    out_arcs = {}
    for (x, y), f in flow.items():
        if f == 1:
            out_arcs.setdefault(x, []).append(y)
    sink = {t: 0 for t in targets}
    for t in targets:
        inflow = sum(1 for x in out_arcs for y in out_arcs[x] if y == t)
        sink[t] = inflow - len(out_arcs.get(t, []))
    for x in out_arcs:
        out_arcs[x].sort()
    paths = []
    for _ in range(count):
        walk = [u]
        x = u
        while not (x in targets and sink[x] > 0):
            y = out_arcs[x].pop(0)
            walk.append(y)
            x = y
        sink[x] -= 1
        paths.append(_shortcut(walk, targets))
    _validate_system(G, u, frozenset(blocked), paths)
    return paths


def _shortcut(walk, targets):
    path = []
    pos = {}
    for x in walk:
        if x in pos:
            cut = pos[x]
            for y in path[cut + 1:]:
                del pos[y]
            path = path[:cut + 1]
        else:
            pos[x] = len(path)
            path.append(x)
    for i, x in enumerate(path[1:], start=1):
        if x in targets:
            return tuple(path[:i + 1])
    return tuple(path)
