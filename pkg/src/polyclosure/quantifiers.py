"""Classes of structures standing in for quantifiers, and bounded searches
for closure properties.

Every verdict here is relative to a finite census of structures: "holds"
means no counterexample was found among the tested instances.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .csp import is_c_ell, parse_target, solve_csp
from .errors import BudgetExceeded, PreconditionError
from .families import PartialFunctionFamily, apply_to_structure
from .structures import (Structure, Vocabulary, _all_slots, enumerate_structures,
                         find_isomorphism, union)

SUBSET_CAP = 6          # enumerate every substructure when there are at most this many tuples
FULL_SLOT_LIMIT = 16    # enumerate every structure when there are at most this many tuple slots
CENSUS_CAP = 200_000


@dataclass(frozen=True)
class StructureClass:
    vocab: Vocabulary
    membership: Callable[[Structure], bool] = field(repr=False, compare=False)
    description: str = ""

    def __contains__(self, A: Structure) -> bool:
        if A.vocab != self.vocab:
            return False
        return bool(self.membership(A))


def _cached(fn):
    cache = {}

    def member(A):
        hit = cache.get(A)
        if hit is None:
            hit = cache[A] = fn(A)
        return hit

    return member


def csp_class(target: Structure) -> StructureClass:
    """Structures with a homomorphism into ``target`` (elimination for the
    parity templates, backtracking otherwise)."""
    kind = "parity" if is_c_ell(target) else "backtracking"
    return StructureClass(target.vocab, _cached(lambda A: solve_csp(A, target) is not None),
                          f"CSP of a {target.n}-element template ({kind})")


def explicit_class(members: Iterable[Structure], description: str = "explicit class") -> StructureClass:
    """The isomorphism closure of finitely many structures."""
    members = list(members)
    if not members:
        raise ValueError("explicit class needs at least one member")
    vocab = members[0].vocab

    def member(A):
        return any(B.n == A.n and B.tuple_count() == A.tuple_count()
                   and find_isomorphism(A, B) is not None for B in members)

    return StructureClass(vocab, _cached(member), description)


def predicate_class(vocab: Vocabulary, predicate: Callable[[Structure], bool],
                    description: str = "predicate class") -> StructureClass:
    return StructureClass(vocab, predicate, description)


def empty_relation_class(vocab: Vocabulary, symbol: str) -> StructureClass:
    vocab.arity(symbol)
    return StructureClass(vocab, lambda A: not A[symbol], f"{symbol} is empty")


def nonempty_relation_class(vocab: Vocabulary, symbol: str) -> StructureClass:
    vocab.arity(symbol)
    return StructureClass(vocab, lambda A: bool(A[symbol]), f"{symbol} is nonempty")


def parse_class(spec: str) -> StructureClass:
    """``csp:<target>`` with a target accepted by :func:`parse_target`."""
    kind, _, rest = spec.partition(":")
    if kind == "csp" and rest:
        return csp_class(parse_target(rest))
    raise ValueError(f"unknown class {spec!r}")


def imhof_star(K: StructureClass) -> StructureClass:
    """Adds a partner ``co_R`` for every symbol R.  Members keep every R
    disjoint from its partner and either restrict to a member of K or have
    some pair R, co_R that fails to cover all tuples."""
    arities = {s.arity for s in K.vocab}
    if len(arities) != 1:
        raise PreconditionError("the star transform needs a vocabulary of uniform arity")
    r = arities.pop()
    names = K.vocab.names
    star = Vocabulary.of(*[(s, r) for s in names], *[(f"co_{s}", r) for s in names])

    def member(A):
        if any(A[s] & A[f"co_{s}"] for s in names):
            return False
        full = A.n ** r
        if any(len(A[s]) + len(A[f"co_{s}"]) != full for s in names):
            return True
        base = Structure(K.vocab, A.n, {s: A[s] for s in names}, validate=False)
        return base in K

    return StructureClass(star, member, f"star of ({K.description})")


# ---- censuses ----------------------------------------------------------------

@dataclass
class Census:
    items: list
    description: str

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)


def exhaustive_census(vocab: Vocabulary, max_n: int, *, max_tuples: int = 3,
                      full_slot_limit: int = FULL_SLOT_LIMIT) -> Census:
    """Structures of sizes 1..max_n up to isomorphism.  Sizes with at most
    ``full_slot_limit`` tuple slots are enumerated completely, larger sizes
    up to ``max_tuples`` tuples in total."""
    items = []
    parts = []
    for n in range(1, max_n + 1):
        slots = len(_all_slots(vocab, n))
        cap = None if slots <= full_slot_limit else max_tuples
        parts.append(f"n={n}:" + ("all" if cap is None else f"<={cap} tuples"))
        for S in enumerate_structures(vocab, n, max_tuples=cap):
            items.append(S)
            if len(items) > CENSUS_CAP:
                raise BudgetExceeded(f"census larger than {CENSUS_CAP}")
    return Census(items, "exhaustive " + ", ".join(parts))


def random_census(vocab: Vocabulary, count: int, max_n: int, seed: int = 0,
                  max_tuples_per_relation: int = 8) -> Census:
    """Seeded random structures: universe size uniform in 1..max_n, then per
    relation a uniform tuple count and uniformly chosen tuples."""
    rng = random.Random(seed)
    items = []
    for _ in range(count):
        n = rng.randint(1, max_n)
        rel = {}
        for sym in vocab:
            space = n ** sym.arity
            t = rng.randint(0, min(space, max_tuples_per_relation))
            codes = rng.sample(range(space), t)
            rel[sym.name] = [_decode(c, n, sym.arity) for c in codes]
        items.append(Structure(vocab, n, rel, validate=False))
    return Census(items, f"random count={count} max_n={max_n} seed={seed}")


def _decode(code, n, arity):
    out = []
    for _ in range(arity):
        code, d = divmod(code, n)
        out.append(d)
    return tuple(reversed(out))


def make_census(vocab: Vocabulary, mode: str, max_n: int, *, count: int = 1000,
                seed: int = 0, max_tuples: int = 3) -> Census:
    if mode == "exhaustive":
        return exhaustive_census(vocab, max_n, max_tuples=max_tuples)
    if mode == "random":
        return random_census(vocab, count, max_n, seed)
    raise ValueError(f"unknown census mode {mode!r}")


# ---- verdicts --------------------------------------------------------------------

@dataclass
class Verdict:
    property: str
    holds: bool
    census: str
    tested: int = 0
    candidates: int = 0
    counterexample: tuple | None = None
    notes: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        cx = None
        if self.counterexample is not None:
            cx = {name: _structure_dict(S) for name, S in zip(("B", "A"), self.counterexample)}
        return {"property": self.property, "holds": self.holds, "census": self.census,
                "tested": self.tested, "candidates": self.candidates,
                "counterexample": cx, **self.notes}


def _structure_dict(S):
    return {"n": S.n, "relations": {s: [list(t) for t in S.tuples(s)] for s in S.vocab.names}}


def substructures(C: Structure, cap: int = SUBSET_CAP) -> Iterable[Structure]:
    """Structures A <= C on C's universe: all of them when C has at most
    ``cap`` tuples, otherwise C itself, the empty one and every single-tuple
    deletion."""
    flat = [(s, t) for s in C.vocab.names for t in C.tuples(s)]
    if len(flat) <= cap:
        choices = itertools.chain.from_iterable(
            itertools.combinations(flat, r) for r in range(len(flat), -1, -1))
    else:
        choices = itertools.chain([tuple(flat)],
                                  (tuple(flat[:i] + flat[i + 1:]) for i in range(len(flat))),
                                  [()])
    for chosen in choices:
        rel = {s: [] for s in C.vocab.names}
        for s, t in chosen:
            rel[s].append(t)
        yield Structure(C.vocab, C.n, rel, validate=False)


def _check_vocab(K, census):
    for B in census:
        if B.vocab != K.vocab:
            raise ValueError("census and class use different vocabularies")
        break


def _closure_search(K, census, extend, name):
    _check_vocab(K, census)
    v = Verdict(name, True, census.description)
    for B in census:
        if B not in K:
            continue
        v.tested += 1
        for A in substructures(extend(B)):
            v.candidates += 1
            if A not in K:
                v.holds = False
                v.counterexample = (B, A)
                return v
    return v


def one_step(P: PartialFunctionFamily, B: Structure) -> Structure:
    return union(B, apply_to_structure(P, B))


def is_p_closed(K: StructureClass, P: PartialFunctionFamily, census: Census) -> Verdict:
    """Search for B in K and A <= p(B) u B with A outside K.  The census
    order fixes which counterexample is reported."""
    return _closure_search(K, census, lambda B: one_step(P, B), f"{P.name}-closed")


def is_downwards_monotone(K: StructureClass, census: Census) -> Verdict:
    return _closure_search(K, census, lambda B: B, "downwards monotone")


def gamma_equivalence_check(K: StructureClass, P: PartialFunctionFamily, census: Census) -> Verdict:
    """Compare one-step closure with closure under the full fixpoint.

    The census is first extended by every iterate p(B) u B, p(p(B) u B) u ...
    of its members, so that one-step closedness on the extended census
    implies closedness under the fixpoint.  The verdict holds when both
    searches agree; it records both outcomes.
    """
    _check_vocab(K, census)
    extended = []
    seen = set()
    for B in census:
        cur = B
        while cur not in seen:
            seen.add(cur)
            extended.append(cur)
            if cur not in K:
                break
            nxt = one_step(P, cur)
            if nxt == cur:
                break
            cur = nxt
    ext = Census(extended, census.description + " + closure iterates")

    def omega(B):
        cur = B
        while True:
            nxt = one_step(P, cur)
            if nxt == cur:
                return cur
            cur = nxt

    one = _closure_search(K, ext, lambda B: one_step(P, B), "one-step")
    full = _closure_search(K, ext, omega, "fixpoint")
    v = Verdict("closure characterization", one.holds == full.holds, ext.description,
                tested=one.tested, candidates=one.candidates + full.candidates)
    v.counterexample = one.counterexample or full.counterexample
    v.notes = {"one_step_holds": one.holds, "fixpoint_holds": full.holds}
    return v


def isomorphism_spot_check(K: StructureClass, census: Census, seed: int = 0, trials: int = 100) -> bool:
    """Membership agrees on random relabellings of census members."""
    rng = random.Random(seed)
    items = list(census)
    for _ in range(min(trials, len(items) * 4)):
        A = rng.choice(items)
        perm = list(range(A.n))
        rng.shuffle(perm)
        if (A in K) != (A.relabel(perm) in K):
            return False
    return True
