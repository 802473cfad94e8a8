"""One-dimensional colour refinement on a binary relation."""
from __future__ import annotations

from collections import Counter

from ..structures import Structure


def _refine(n: int, out_nb, in_nb, colors: list) -> list[int]:
    while True:
        sigs = [(colors[v],
                 tuple(sorted(Counter(colors[w] for w in out_nb[v]).items())),
                 tuple(sorted(Counter(colors[w] for w in in_nb[v]).items())))
                for v in range(n)]
        palette = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [palette[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _neighbourhoods(A: Structure, symbol: str):
    if A.vocab.arity(symbol) != 2:
        raise ValueError(f"colour refinement needs a binary symbol, {symbol!r} has arity {A.vocab.arity(symbol)}")
    out_nb = [[] for _ in range(A.n)]
    in_nb = [[] for _ in range(A.n)]
    loops = [0] * A.n
    for u, v in A[symbol]:
        if u == v:
            loops[u] = 1
        else:
            out_nb[u].append(v)
            in_nb[v].append(u)
    return out_nb, in_nb, loops


def color_refinement(A: Structure, symbol: str = "E") -> list[int]:
    """Stable colouring of A's elements (colours are ranks of signatures,
    so they are only meaningful within this one run)."""
    out_nb, in_nb, loops = _neighbourhoods(A, symbol)
    return _refine(A.n, out_nb, in_nb, loops)


def stable_partition(A: Structure, symbol: str = "E") -> list[list[int]]:
    colors = color_refinement(A, symbol)
    classes: dict = {}
    for v, c in enumerate(colors):
        classes.setdefault(c, []).append(v)
    return sorted(classes.values())


def distinguishes(A: Structure, B: Structure, symbol: str = "E") -> bool:
    """Whether refinement run on the disjoint union separates A from B."""
    if A.n != B.n:
        return True
    oa, ia, la = _neighbourhoods(A, symbol)
    ob, ib, lb = _neighbourhoods(B, symbol)
    n = A.n
    out_nb = oa + [[w + n for w in x] for x in ob]
    in_nb = ia + [[w + n for w in x] for x in ib]
    colors = _refine(2 * n, out_nb, in_nb, la + lb)
    return Counter(colors[:n]) != Counter(colors[n:])
