"""Finite relational structures and the maps between them.

Universes are always the integer prefix ``0..n-1``.  Relations are stored as
frozensets of integer tuples, with a lexicographically sorted copy kept for
deterministic iteration.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import BudgetExceeded, VocabularyMismatch

POWER_UNIVERSE_CAP = 1 << 20


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int


@dataclass(frozen=True)
class Vocabulary:
    """An ordered list of relation symbols with unique names."""

    symbols: tuple[Symbol, ...]

    def __post_init__(self):
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate symbol names in {names}")
        for s in self.symbols:
            if not isinstance(s.arity, int) or s.arity < 1:
                raise ValueError(f"symbol {s.name!r} has arity {s.arity}; must be >= 1")

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "Vocabulary":
        return cls(tuple(Symbol(name, arity) for name, arity in pairs))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.symbols)

    def arity(self, name: str) -> int:
        for s in self.symbols:
            if s.name == name:
                return s.arity
        raise KeyError(name)

    @property
    def max_arity(self) -> int:
        return max((s.arity for s in self.symbols), default=0)

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)


class Structure:
    """A finite relational structure over ``vocab`` with universe ``range(n)``.

    Instances are immutable; every operation returns a new structure.
    """

    __slots__ = ("vocab", "n", "_rel", "_sorted", "_hash")

    def __init__(self, vocab: Vocabulary, n: int,
                 relations: Mapping[str, Iterable[Sequence[int]]] | None = None,
                 *, validate: bool = True):
        if n < 0:
            raise ValueError("universe size must be non-negative")
        relations = relations or {}
        unknown = set(relations) - set(vocab.names)
        if unknown:
            raise VocabularyMismatch(f"relations {sorted(unknown)} not in vocabulary")
        rel = {}
        for sym in vocab:
            ts = frozenset(tuple(t) for t in relations.get(sym.name, ()))
            if validate:
                for t in ts:
                    if len(t) != sym.arity:
                        raise ValueError(f"tuple {t} in {sym.name} has length {len(t)}, arity is {sym.arity}")
                    for x in t:
                        if not 0 <= x < n:
                            raise ValueError(f"tuple {t} in {sym.name} leaves universe of size {n}")
            rel[sym.name] = ts
        self.vocab = vocab
        self.n = n
        self._rel = rel
        self._sorted = {}
        self._hash = None

    def __getitem__(self, name: str) -> frozenset:
        return self._rel[name]

    def tuples(self, name: str) -> tuple[tuple[int, ...], ...]:
        """Relation ``name`` as a lexicographically sorted tuple."""
        got = self._sorted.get(name)
        if got is None:
            got = self._sorted[name] = tuple(sorted(self._rel[name]))
        return got

    @property
    def relations(self) -> dict[str, frozenset]:
        return dict(self._rel)

    @property
    def universe(self) -> range:
        return range(self.n)

    def tuple_count(self) -> int:
        return sum(len(ts) for ts in self._rel.values())

    def replace(self, **relations) -> "Structure":
        rel = dict(self._rel)
        rel.update(relations)
        return Structure(self.vocab, self.n, rel)

    def relabel(self, perm: Sequence[int]) -> "Structure":
        """Image of this structure under the bijection ``i -> perm[i]``."""
        return Structure(self.vocab, self.n,
                         {name: {tuple(perm[x] for x in t) for t in ts}
                          for name, ts in self._rel.items()}, validate=False)

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return self.vocab == other.vocab and self.n == other.n and self._rel == other._rel

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vocab, self.n, tuple(self._rel[s] for s in self.vocab.names)))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{name}={list(self.tuples(name))}" for name in self.vocab.names)
        return f"Structure(n={self.n}, {body})"


def empty_structure(vocab: Vocabulary, n: int) -> Structure:
    return Structure(vocab, n, {})


def _same_vocab(A: Structure, B: Structure):
    if A.vocab != B.vocab:
        raise VocabularyMismatch(f"{A.vocab.names} vs {B.vocab.names}")


def is_partial_isomorphism(A: Structure, B: Structure, m: Mapping[int, int]) -> bool:
    """True iff ``m`` is an isomorphism between the substructures induced on
    its domain and its image."""
    _same_vocab(A, B)
    for a, b in m.items():
        if not 0 <= a < A.n or not 0 <= b < B.n:
            raise ValueError(f"pair {a}->{b} leaves the universes")
    if len(set(m.values())) != len(m):
        return False
    inv = {b: a for a, b in m.items()}
    dom = sorted(m)
    for sym in A.vocab:
        RA, RB = A[sym.name], B[sym.name]
        combos = len(dom) ** sym.arity
        if combos <= len(RA) + len(RB):
            for t in itertools.product(dom, repeat=sym.arity):
                if (t in RA) != (tuple(m[x] for x in t) in RB):
                    return False
        else:
            for t in RA:
                if all(x in m for x in t) and tuple(m[x] for x in t) not in RB:
                    return False
            for s in RB:
                if all(y in inv for y in s) and tuple(inv[y] for y in s) not in RA:
                    return False
    return True


def is_homomorphism(A: Structure, B: Structure, h: Mapping[int, int]) -> bool:
    _same_vocab(A, B)
    if any(a not in h for a in range(A.n)):
        return False
    return all(tuple(h[x] for x in t) in B[sym.name] for sym in A.vocab for t in A[sym.name])


def leq(A: Structure, B: Structure) -> bool:
    """``A <= B``: same universe and every relation of A contained in B's."""
    _same_vocab(A, B)
    return A.n == B.n and all(A[s] <= B[s] for s in A.vocab.names)


def union(A: Structure, B: Structure) -> Structure:
    """Relation-wise union; the universe is the larger of the two prefixes."""
    _same_vocab(A, B)
    return Structure(A.vocab, max(A.n, B.n),
                     {s: A[s] | B[s] for s in A.vocab.names}, validate=False)


def transpose(tuples: Sequence[Sequence]) -> list[tuple]:
    """Turn ``n`` tuples of length ``m`` into ``m`` tuples of length ``n``."""
    tuples = [tuple(t) for t in tuples]
    if not tuples:
        return []
    m = len(tuples[0])
    if any(len(t) != m for t in tuples):
        raise ValueError("ragged input: all tuples must have the same length")
    return [tuple(t[i] for t in tuples) for i in range(m)]


def encode_tuple(t: Sequence[int], n: int) -> int:
    code = 0
    for x in t:
        code = code * n + x
    return code


def decode_tuple(code: int, n: int, length: int) -> tuple[int, ...]:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        code, out[i] = divmod(code, n)
    return tuple(out)


def power(B: Structure, m: int, *, cap: int = POWER_UNIVERSE_CAP) -> Structure:
    """The m-th direct power of B.  Element ``(x_1..x_m)`` is encoded as the
    base-``n`` integer ``x_1 x_2 .. x_m``."""
    if m < 1:
        raise ValueError("power exponent must be >= 1")
    size = B.n ** m
    if size > cap:
        raise BudgetExceeded(f"|B|^m = {size} exceeds cap {cap}")
    rel = {}
    for sym in B.vocab:
        out = set()
        for rows in itertools.product(B.tuples(sym.name), repeat=m):
            out.add(tuple(encode_tuple(col, B.n) for col in transpose(rows)))
        rel[sym.name] = out
    return Structure(B.vocab, size, rel, validate=False)


# --------------------------------------------------------------------------
# backtracking search for homomorphisms and isomorphisms


def _occurrences(A: Structure):
    occ = [[] for _ in range(A.n)]
    for sym in A.vocab:
        for t in A.tuples(sym.name):
            for x in set(t):
                occ[x].append((sym.name, t))
    return occ


def _compatible(t, targets, doms):
    """Tuples of ``targets`` consistent with the domains at every position of
    ``t`` and with its equality pattern."""
    out = []
    for s in targets:
        ok = True
        seen = {}
        for x, y in zip(t, s):
            if y not in doms[x] or seen.setdefault(x, y) != y:
                ok = False
                break
        if ok:
            out.append(s)
    return out


def _restrict(t, compat, doms):
    """Narrow domains of the entries of ``t`` to the supports in ``compat``.
    Returns the list of changed entries, or None on a wipe-out."""
    changed = []
    for j, x in enumerate(t):
        support = {s[j] for s in compat}
        cur = doms[x]
        if not cur <= support:
            new = cur & support
            if not new:
                return None
            doms[x] = new
            changed.append(x)
    return changed


class _Search:
    """Most-constrained-variable-first backtracking with forward checking.

    Ties are broken by element index and values are tried in increasing
    order, so witnesses are reproducible.
    """

    def __init__(self, A: Structure, B: Structure, domains, injective: bool):
        self.A, self.B = A, B
        self.occ = _occurrences(A)
        self.injective = injective
        self.domains = domains

    def initial(self):
        doms = [set(d) for d in self.domains]
        for sym in self.A.vocab:
            targets = self.B.tuples(sym.name)
            for t in self.A.tuples(sym.name):
                compat = _compatible(t, targets, doms)
                if not compat or _restrict(t, compat, doms) is None:
                    return None
        return doms

    def propagate(self, doms, var, val):
        doms = list(doms)
        doms[var] = {val}
        queue = [var]
        if self.injective:
            for x in range(len(doms)):
                if x != var and val in doms[x]:
                    doms[x] = doms[x] - {val}
                    if not doms[x]:
                        return None
                    if len(doms[x]) == 1:
                        queue.append(x)
        seen = set()
        while queue:
            x = queue.pop()
            if x in seen:
                continue
            seen.add(x)
            for name, t in self.occ[x]:
                local = {y: doms[y] for y in t}
                compat = _compatible(t, self.B.tuples(name), local)
                if not compat:
                    return None
                before = {y: local[y] for y in t}
                changed = _restrict(t, compat, local)
                if changed is None:
                    return None
                for y in changed:
                    doms[y] = local[y]
                    if len(local[y]) == 1 and len(before[y]) > 1:
                        queue.append(y)
        return doms

    def run(self):
        doms = self.initial()
        if doms is None:
            return None
        return self._rec(doms, {})

    def _rec(self, doms, h):
        if len(h) == len(doms):
            return dict(h)
        var = min((x for x in range(len(doms)) if x not in h),
                  key=lambda x: (len(doms[x]), x))
        used = set(h.values()) if self.injective else ()
        for val in sorted(doms[var]):
            if val in used:
                continue
            nd = self.propagate(doms, var, val)
            if nd is None:
                continue
            h[var] = val
            got = self._rec(nd, h)
            if got is not None:
                return got
            del h[var]
        return None


def find_homomorphism(A: Structure, B: Structure) -> dict[int, int] | None:
    """Some total homomorphism ``A -> B``, or None when none exists."""
    _same_vocab(A, B)
    if A.n == 0:
        return {}
    if B.n == 0:
        return None
    domains = [set(range(B.n)) for _ in range(A.n)]
    return _Search(A, B, domains, injective=False).run()


def element_colors(*structures: Structure) -> list[list[int]]:
    """Stable colouring of the elements of several structures at once.

    Each round recolours an element by its old colour plus the multiset of
    (symbol, position, colours of the whole tuple) over tuples containing it.
    Colours are shared across the structures, so they are comparable.
    """
    colors = [[0] * S.n for S in structures]
    occs = [_occurrences(S) for S in structures]
    n_classes = 1
    while True:
        sigs = []
        for S, occ, col in zip(structures, occs, colors):
            row = []
            for x in range(S.n):
                items = sorted((name, tuple(i for i, y in enumerate(t) if y == x),
                                tuple(col[y] for y in t)) for name, t in occ[x])
                row.append((col[x], tuple(items)))
            sigs.append(row)
        palette = {sig: i for i, sig in enumerate(sorted({s for row in sigs for s in row}))}
        colors = [[palette[s] for s in row] for row in sigs]
        if len(palette) == n_classes:
            return colors
        n_classes = len(palette)


def find_isomorphism(A: Structure, B: Structure) -> dict[int, int] | None:
    """Some isomorphism ``A -> B`` or None.

    A bijective homomorphism between structures with equally many tuples in
    every relation is an isomorphism, so the search only has to look for an
    injective homomorphism under colour-class domains.
    """
    _same_vocab(A, B)
    if A.n != B.n or any(len(A[s]) != len(B[s]) for s in A.vocab.names):
        return None
    if A.n == 0:
        return {}
    ca, cb = element_colors(A, B)
    if sorted(ca) != sorted(cb):
        return None
    by_color = {}
    for y, c in enumerate(cb):
        by_color.setdefault(c, set()).add(y)
    domains = [by_color[c] for c in ca]
    iso = _Search(A, B, domains, injective=True).run()
    if iso is not None and not is_partial_isomorphism(A, B, iso):
        raise AssertionError("isomorphism search returned a non-isomorphism")
    return iso


def are_isomorphic(A: Structure, B: Structure) -> bool:
    return find_isomorphism(A, B) is not None


# --------------------------------------------------------------------------
# enumeration of small structures


def _all_slots(vocab: Vocabulary, n: int):
    return [(sym.name, t) for sym in vocab for t in itertools.product(range(n), repeat=sym.arity)]


def canonical_key(S: Structure, perm: Sequence[int] | None = None):
    """Sort key of the relabelled structure; the minimum over all
    permutations is an isomorphism invariant."""
    if perm is None:
        return tuple(tuple(sorted(S[name])) for name in S.vocab.names)
    return tuple(tuple(sorted(tuple(perm[x] for x in t) for t in S[name]))
                 for name in S.vocab.names)


def is_canonical(S: Structure) -> bool:
    key = canonical_key(S)
    return all(key <= canonical_key(S, p) for p in itertools.permutations(range(S.n)))


def enumerate_structures(vocab: Vocabulary, n: int, *, max_tuples: int | None = None,
                         canonical: bool = True) -> Iterator[Structure]:
    """All structures on universe size ``n`` with at most ``max_tuples``
    tuples in total, one per isomorphism class when ``canonical``.

    Order: by tuple count, then lexicographically by the chosen slots.
    """
    slots = _all_slots(vocab, n)
    top = len(slots) if max_tuples is None else min(max_tuples, len(slots))
    for size in range(top + 1):
        for chosen in itertools.combinations(slots, size):
            rel = {name: [] for name in vocab.names}
            for name, t in chosen:
                rel[name].append(t)
            S = Structure(vocab, n, rel, validate=False)
            if not canonical or is_canonical(S):
                yield S
