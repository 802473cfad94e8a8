"""Duplicator's strategy on the even/odd CFI pair, driven by a Robber
certificate for the Cops&Robber game.

The state keeps a good bijection f (as a switch set) with the current
pebble position contained in it, its twist safe for the pebbled edges.
Every step re-checks this invariant, the legality of the served response
set and the bookkeeping of pebbled edges; any failure raises
:class:`InvariantViolation`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from ..cfi import CFIInstance, SwitchSet, V0, build_cfi, edges_of
from ..errors import BudgetExceeded, InvariantViolation, PreconditionError
from ..families import gamma_closure_relation, near_unanimity
from ..graphs import OrderedGraph
from ..structures import is_partial_isomorphism
from .pebble import LEFT, RIGHT

MOVE_BUDGET = 5_000_000


class RobberCertificate(Protocol):
    def is_safe(self, F, u) -> bool: ...

    def escape_paths(self, F, u, F_new) -> list: ...


@dataclass(frozen=True)
class DuplicatorState:
    """``alpha``/``beta`` hold one entry per pebble slot (None if unused)."""

    switch_set: SwitchSet
    alpha: tuple
    beta: tuple

    @classmethod
    def initial(cls, G: OrderedGraph, k: int) -> "DuplicatorState":
        return cls(SwitchSet.identity(G), (None,) * k, (None,) * k)

    def pebbled_edges(self) -> frozenset:
        return edges_of(a for a in self.alpha if a is not None)

    def pairs(self) -> dict[int, int]:
        return {a: b for a, b in zip(self.alpha, self.beta) if a is not None}

    def key(self):
        return (self.switch_set.switched, self.alpha, self.beta)


@dataclass
class Round:
    """One answered Spoiler round, for traces and the interactive mode."""

    side: str
    ys: tuple
    spoiler_tuple: tuple
    served_bijection: SwitchSet
    paths: list
    response: list
    pick: int
    before: DuplicatorState
    after: DuplicatorState


class CFIGame:
    """The pair (even, odd) over one graph plus the near-unanimity family
    of the graph's degree."""

    def __init__(self, G: OrderedGraph, k: int, cert: RobberCertificate):
        self.graph = G
        self.k = k
        self.cert = cert
        self.ev: CFIInstance = build_cfi(G, ())
        self.od: CFIInstance = build_cfi(G, (V0,))
        self.ell = self.ev.ell
        self.family = near_unanimity(self.ell) if self.ell >= 3 else None
        self.n = self.ev.n

    # -- invariant ----------------------------------------------------------
    def check_invariant(self, st: DuplicatorState) -> None:
        f = st.switch_set
        F = st.pebbled_edges()
        if not f.is_good():
            raise InvariantViolation(f"switch set {f.to_list()} is not good")
        if not f.is_good_for(F):
            raise InvariantViolation(f"twist {f.twist()} touches a pebbled edge")
        for a, b in zip(st.alpha, st.beta):
            if (a is None) != (b is None):
                raise InvariantViolation("alpha and beta have different domains")
            if a is not None and f(a) != b:
                raise InvariantViolation(f"pebble pair {a}->{b} not contained in f")
        if not self.cert.is_safe(F, f.twist()):
            raise InvariantViolation(f"twist {f.twist()} not certified safe for {sorted(F)}")
        if not is_partial_isomorphism(self.ev.structure, self.od.structure, st.pairs()):
            raise InvariantViolation("pebbled position is not a partial isomorphism")

    # -- one round ----------------------------------------------------------
    def serve(self, st: DuplicatorState, side: str, ys: Sequence[int]) -> SwitchSet:
        """The bijection played for a move on variables ys: f^-1 = f for
        left moves, f for right moves (switch sets are involutions)."""
        self._check_move(side, ys)
        return st.switch_set.inverse() if side == LEFT else st.switch_set

    def respond(self, st: DuplicatorState, side: str, ys: Sequence[int], tup: Sequence[int]):
        """Escape paths and the response set P for Spoiler's tuple."""
        ys, tup = tuple(ys), tuple(tup)
        self._check_move(side, ys)
        if len(tup) != len(ys) or any(not 0 <= x < self.n for x in tup):
            raise PreconditionError("spoiler tuple does not match the variables")
        f = st.switch_set
        new_side = list(st.beta if side == LEFT else st.alpha)
        for y, x in zip(ys, tup):
            new_side[y] = x
        F_new = edges_of(x for x in new_side if x is not None)
        paths = self.cert.escape_paths(st.pebbled_edges(), f.twist(), F_new)
        if len(paths) != self.ell:
            raise InvariantViolation("certificate returned the wrong number of paths")
        switched = [f.along_path(p) for p in paths]
        response = [g.apply(tup) for g in switched]
        target = f.apply(tup)
        self._check_legal(response, target)
        return paths, switched, response, F_new

    def _check_legal(self, response, target):
        for j, want in enumerate(target):
            column = tuple(t[j] for t in response)
            if self.family(self.n, column) != want:
                raise InvariantViolation(f"near-unanimity image differs from f(tuple) at coordinate {j}")
        closure = gamma_closure_relation(self.family, self.n, response)
        if tuple(target) not in closure:
            raise InvariantViolation("served set does not generate f(tuple)")

    def step(self, st: DuplicatorState, side: str, ys: Sequence[int], tup: Sequence[int],
             pick: int) -> Round:
        self.check_invariant(st)
        ys, tup = tuple(ys), tuple(tup)
        served = self.serve(st, side, ys)
        paths, switched, response, F_new = self.respond(st, side, ys, tup)
        if not 0 <= pick < len(response):
            raise PreconditionError("pick must index the served set")
        alpha, beta = list(st.alpha), list(st.beta)
        for y, x, z in zip(ys, tup, response[pick]):
            if side == LEFT:
                alpha[y], beta[y] = z, x
            else:
                alpha[y], beta[y] = x, z
        nxt = DuplicatorState(switched[pick], tuple(alpha), tuple(beta))
        if nxt.pebbled_edges() != F_new:
            raise InvariantViolation("pebbled edges after the round differ from F'")
        self.check_invariant(nxt)
        return Round(side, ys, tup, served, paths, response, pick, st, nxt)

    def _check_move(self, side, ys):
        if side not in (LEFT, RIGHT):
            raise PreconditionError(f"side must be {LEFT!r} or {RIGHT!r}")
        if not ys or len(set(ys)) != len(ys) or any(not 0 <= y < self.k for y in ys):
            raise PreconditionError(f"variables must be distinct slots in 0..{self.k - 1}")


def duplicator_strategy_step(game: CFIGame, st: DuplicatorState, side: str, ys, tup, pick) -> DuplicatorState:
    return game.step(st, side, ys, tup, pick).after


@dataclass
class VerifyReport:
    ok: bool
    states: int = 0
    steps: int = 0
    failure: str | None = None
    trace: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "states": self.states, "steps": self.steps,
                "failure": self.failure,
                "trace": [{"side": r.side, "ys": list(r.ys), "tuple": list(r.spoiler_tuple),
                           "pick": r.pick} for r in self.trace]}


def spoiler_moves(k: int, n: int):
    for r in range(1, k + 1):
        for ys in itertools.combinations(range(k), r):
            for side in (LEFT, RIGHT):
                for tup in itertools.product(range(n), repeat=r):
                    yield side, ys, tup


def adversarial_verify(G: OrderedGraph, k: int, rounds: int, cert: RobberCertificate,
                       budget: int = MOVE_BUDGET) -> VerifyReport:
    """Play every Spoiler continuation of up to ``rounds`` rounds against
    the strategy from the initial position, checking every visited state."""
    game = CFIGame(G, k, cert)
    if game.family is None:
        raise PreconditionError("the CFI game needs a graph of degree >= 3")
    if not cert.is_safe(frozenset(), V0):
        raise PreconditionError("certificate does not mark v0 safe for the empty set")
    start = DuplicatorState.initial(G, k)
    report = VerifyReport(ok=True)
    done: dict = {}
    path: list = []

    def visit(st, left):
        if done.get(st.key(), -1) >= left:
            return True
        report.states += 1
        if left > 0:
            for side, ys, tup in spoiler_moves(k, game.n):
                for pick in range(game.ell):
                    report.steps += 1
                    if report.steps > budget:
                        raise BudgetExceeded(f"more than {budget} strategy steps")
                    try:
                        rnd = game.step(st, side, ys, tup, pick)
                    except InvariantViolation as exc:
                        report.ok = False
                        report.failure = str(exc)
                        report.trace = list(path)
                        return False
                    path.append(rnd)
                    ok = visit(rnd.after, left - 1)
                    path.pop()
                    if not ok:
                        return False
        done[st.key()] = left
        return True

    try:
        game.check_invariant(start)
    except InvariantViolation as exc:
        return VerifyReport(ok=False, failure=str(exc))
    visit(start, rounds)
    return report


def random_play(G: OrderedGraph, k: int, rounds: int, cert: RobberCertificate, rng) -> list[Round]:
    """One seeded random Spoiler play; every step is invariant-checked."""
    game = CFIGame(G, k, cert)
    st = DuplicatorState.initial(G, k)
    out = []
    for _ in range(rounds):
        r = rng.randint(1, k)
        ys = tuple(sorted(rng.sample(range(k), r)))
        side = rng.choice((LEFT, RIGHT))
        tup = tuple(rng.randrange(game.n) for _ in range(r))
        rnd = game.step(st, side, ys, tup, rng.randrange(game.ell))
        out.append(rnd)
        st = rnd.after
    return out
