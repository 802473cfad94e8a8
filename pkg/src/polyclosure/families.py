"""Families of partial functions and their action on relations.

A family is given intensionally: one evaluator ``(n, args) -> value | None``
covers every universe size.  Built-in families also carry a vectorised
evaluator that works on integer arrays (``-1`` marks "undefined"), which is
what :func:`apply_to_relation` uses when it is available.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded
from .structures import Structure, union

INVARIANCE_GUARD = 5
_BLOCK = 1 << 18


@dataclass(frozen=True)
class PartialFunctionFamily:
    name: str
    arity: int
    fn: Callable[[int, tuple], int | None] = field(repr=False, compare=False)
    vectorized: Callable[[int, np.ndarray], np.ndarray] | None = field(
        default=None, repr=False, compare=False)

    def __call__(self, n: int, args: Sequence[int]) -> int | None:
        return eval_family(self, n, args)

    @property
    def is_nowhere(self) -> bool:
        return self.name == "nowhere"


def eval_family(P: PartialFunctionFamily, n: int, args: Sequence[int]) -> int | None:
    """Value of ``p_A(args)`` for ``|A| = n``, or None where undefined."""
    args = tuple(args)
    if len(args) != P.arity:
        raise ValueError(f"{P.name} takes {P.arity} arguments, got {len(args)}")
    if any(not 0 <= a < n for a in args):
        raise ValueError(f"arguments {args} leave universe of size {n}")
    return P.fn(n, args)


# ---- built-in families ----------------------------------------------------

def _maltsev(n, args):
    a, b, c = args
    if a == b:
        return c
    if b == c:
        return a
    return None


def _maltsev_vec(n, x):
    a, b, c = x[..., 0], x[..., 1], x[..., 2]
    return np.where(a == b, c, np.where(b == c, a, -1))


def maltsev() -> PartialFunctionFamily:
    """M(a,b,b) = M(b,b,a) = a, undefined unless a = b or b = c."""
    return PartialFunctionFamily("maltsev", 3, _maltsev, _maltsev_vec)


def near_unanimity(ell: int) -> PartialFunctionFamily:
    """The ell-ary partial near-unanimity family: value ``a`` exactly when at
    least ``ell - 1`` arguments equal ``a``."""
    if ell < 3:
        raise ValueError("near-unanimity families need arity >= 3")

    def fn(n, args):
        value, count = Counter(args).most_common(1)[0]
        return value if count >= ell - 1 else None

    def vec(n, x):
        # after sorting, a block of ell - 1 equal values covers index 1
        s = np.sort(x, axis=-1)
        ok = (s[..., 0] == s[..., ell - 2]) | (s[..., 1] == s[..., ell - 1])
        return np.where(ok, s[..., 1], -1)

    return PartialFunctionFamily(f"nu:{ell}", ell, fn, vec)


def majority() -> PartialFunctionFamily:
    return near_unanimity(3)


def nowhere(arity: int = 1) -> PartialFunctionFamily:
    """The everywhere-undefined family."""
    return PartialFunctionFamily("nowhere", arity, lambda n, args: None,
                                 lambda n, x: np.full(x.shape[:-1], -1))


def parse_family(spec: str) -> PartialFunctionFamily:
    """Selector strings: ``maltsev``, ``nu:<ell>``, ``majority``, ``nowhere``."""
    s = spec.strip().lower()
    if s == "maltsev":
        return maltsev()
    if s in ("majority", "mj"):
        return majority()
    if s == "nowhere":
        return nowhere()
    if s.startswith("nu:"):
        return near_unanimity(int(s[3:]))
    raise ValueError(f"unknown family selector {spec!r}")


# ---- action on relations ---------------------------------------------------

def _apply_python(P, n, rows):
    out = set()
    for choice in itertools.product(rows, repeat=P.arity):
        img = []
        for col in zip(*choice):
            v = P.fn(n, col)
            if v is None:
                break
            img.append(v)
        else:
            out.add(tuple(img))
    return out


def _apply_numpy(P, n, rows):
    arr = np.asarray(rows, dtype=np.int64)
    m = len(rows)
    total = m ** P.arity
    out = set()
    for start in range(0, total, _BLOCK):
        flat = np.arange(start, min(total, start + _BLOCK))
        idx = np.stack(np.unravel_index(flat, (m,) * P.arity), axis=1)
        args = arr[idx].transpose(0, 2, 1)          # (K, r, arity)
        val = P.vectorized(n, args)                 # (K, r)
        val = val[(val >= 0).all(axis=1)]
        if len(val):
            out.update(map(tuple, np.unique(val, axis=0).tolist()))
    return out


def apply_to_relation(P: PartialFunctionFamily, n: int,
                      R: Iterable[Sequence[int]]) -> frozenset:
    """``p(R)``: coordinatewise images of all ``arity``-sequences of tuples
    of R, keeping only the fully defined ones."""
    rows = sorted({tuple(t) for t in R})
    if not rows:
        return frozenset()
    if P.is_nowhere:
        return frozenset()
    if P.vectorized is not None:
        return frozenset(_apply_numpy(P, n, rows))
    return frozenset(_apply_python(P, n, rows))


def apply_to_structure(P: PartialFunctionFamily, A: Structure) -> Structure:
    return Structure(A.vocab, A.n,
                     {s: apply_to_relation(P, A.n, A[s]) for s in A.vocab.names},
                     validate=False)


def is_partial_polymorphism(P: PartialFunctionFamily, A: Structure) -> bool:
    """Every relation of A is closed under ``p_A``."""
    return all(apply_to_relation(P, A.n, A[s]) <= A[s] for s in A.vocab.names)


@dataclass(frozen=True)
class ClosureTrace:
    stages: tuple[Structure, ...]
    fixpoint_index: int


def gamma_closure(P: PartialFunctionFamily, A: Structure) -> tuple[Structure, ClosureTrace]:
    """Iterate ``C <- p(C) u C`` to its fixpoint, recording every stage."""
    stages = [A]
    cur = A
    while True:
        nxt = union(cur, apply_to_structure(P, cur))
        if nxt == cur:
            return cur, ClosureTrace(tuple(stages), len(stages) - 1)
        stages.append(nxt)
        cur = nxt


def gamma_closure_relation(P: PartialFunctionFamily, n: int, R: Iterable[Sequence[int]]) -> frozenset:
    cur = frozenset(tuple(t) for t in R)
    if P.is_nowhere:
        return cur
    while True:
        nxt = cur | apply_to_relation(P, n, cur)
        if nxt == cur:
            return cur
        cur = nxt


# ---- family properties -----------------------------------------------------

@dataclass
class InvarianceReport:
    family: str
    max_n: int
    invariant: bool = True
    strongly_invariant: bool = True
    projective: bool = True
    partial_choice: bool = True
    counterexamples: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "family": self.family, "max_n": self.max_n,
            "invariant": self.invariant, "strongly_invariant": self.strongly_invariant,
            "projective": self.projective, "partial_choice": self.partial_choice,
            "counterexamples": self.counterexamples,
        }


def check_invariance(P: PartialFunctionFamily, max_n: int, *,
                     guard: int = INVARIANCE_GUARD) -> InvarianceReport:
    """Exhaustively test the bijection / injection / all-functions conditions
    and the partial-choice property for universes of size 1..max_n.

    Projectivity is reported as strong invariance plus preservation by
    arbitrary functions.  The first counterexample found for each property
    (sizes, map, arguments in lexicographic order) is recorded.
    """
    if max_n > guard:
        raise BudgetExceeded(f"max_n={max_n} above invariance guard {guard}")
    rep = InvarianceReport(P.name, max_n)
    tables = {a: {args: P.fn(a, args) for args in itertools.product(range(a), repeat=P.arity)}
              for a in range(1, max_n + 1)}

    for a, table in tables.items():
        for args, v in table.items():
            if v is not None and v not in args:
                rep.partial_choice = False
                rep.counterexamples.setdefault("partial_choice", {"n": a, "args": list(args), "value": v})
                break

    functions_ok = True
    for a in range(1, max_n + 1):
        for b in range(1, max_n + 1):
            pa, pb = tables[a], tables[b]
            for f in itertools.product(range(b), repeat=a):
                injective = len(set(f)) == a
                bijective = injective and a == b
                for args, v in pa.items():
                    lhs = pb[tuple(f[x] for x in args)]
                    rhs = None if v is None else f[v]
                    if lhs != rhs:
                        where = {"from": a, "to": b, "map": list(f), "args": list(args),
                                 "lhs": lhs, "rhs": rhs}
                        if bijective and rep.invariant:
                            rep.invariant = False
                            rep.counterexamples["invariant"] = where
                        if injective and rep.strongly_invariant:
                            rep.strongly_invariant = False
                            rep.counterexamples["strongly_invariant"] = where
                    if v is not None and lhs != f[v] and functions_ok:
                        functions_ok = False
                        rep.counterexamples["projective"] = {
                            "from": a, "to": b, "map": list(f), "args": list(args),
                            "lhs": lhs, "rhs": f[v]}
    rep.projective = rep.strongly_invariant and functions_ok
    if not rep.strongly_invariant and "projective" not in rep.counterexamples:
        rep.counterexamples["projective"] = rep.counterexamples["strongly_invariant"]
    return rep
