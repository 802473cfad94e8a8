"""Exact solver for the k-pebble game with partial-function quantifier moves.

A position assigns to each of the k variable slots either nothing or a
pair ``(a, b)`` with ``a`` in A and ``b`` in B.  Slot values are coded as
``0`` (empty) or ``1 + a * |B| + b`` and the set of Duplicator-safe
positions is held as a boolean array of shape ``(1 + |A||B|,) * k``.

The solver computes the greatest fixpoint of the one-round operator.  For
a left move on variables ``ys`` and a Spoiler tuple ``b``, Duplicator's
best response is the set ``Good_b`` of all tuples ``a`` whose continuation
is safe: any legal safe response is a subset of it and closure is
monotone, so the move succeeds iff some bijection ``f: B -> A`` satisfies
``f(b) in closure(Good_b)`` for every ``b``.  Right moves are symmetric.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import BudgetExceeded, PreconditionError
from ..families import PartialFunctionFamily, gamma_closure_relation
from ..structures import Structure, _same_vocab, is_partial_isomorphism

FULL_BIJECTION_GUARD = 6
POSITION_CAP = 1 << 21

LEFT, RIGHT = "left", "right"
Position = tuple  # k entries, each None or (a, b)


@dataclass(frozen=True)
class PGConfig:
    """Game parameters.

    ``bijections`` restricts Duplicator to the given maps; each entry is a
    permutation list ``f`` read as ``B -> A`` in left moves and inverted for
    right moves.  ``round_bound`` stops the fixpoint after that many rounds
    and yields a bounded verdict.
    """

    k: int
    family: PartialFunctionFamily
    move_arities: tuple[int, ...] | None = None
    bijections: tuple[tuple[int, ...], ...] | None = None
    round_bound: int | None = None
    guard: int = FULL_BIJECTION_GUARD

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        ar = tuple(range(1, self.k + 1)) if self.move_arities is None else tuple(sorted(set(self.move_arities)))
        if not ar or ar[0] < 1 or ar[-1] > self.k:
            raise ValueError(f"move arities must lie in 1..{self.k}")
        object.__setattr__(self, "move_arities", ar)
        if self.bijections is not None:
            object.__setattr__(self, "bijections", tuple(tuple(int(x) for x in f) for f in self.bijections))


def encode_position(pos: Sequence, nB: int) -> tuple[int, ...]:
    return tuple(0 if s is None else 1 + s[0] * nB + s[1] for s in pos)


def decode_position(code: Sequence[int], nB: int) -> Position:
    return tuple(None if c == 0 else divmod(int(c) - 1, nB) for c in code)


def position_map(pos: Position) -> dict[int, int] | None:
    """The relation alpha -> beta as a dict, or None if it is not a function
    or not injective."""
    m = {}
    for s in pos:
        if s is None:
            continue
        a, b = s
        if m.get(a, b) != b:
            return None
        m[a] = b
    if len(set(m.values())) != len(m):
        return None
    return m


def _perm_inverse(f):
    inv = [0] * len(f)
    for i, x in enumerate(f):
        inv[x] = i
    return tuple(inv)


def _perfect_matching(allowed: np.ndarray) -> list[int] | None:
    """Kuhn's algorithm; ``allowed[x, y]`` says x may map to y."""
    n = allowed.shape[0]
    match_y = [-1] * allowed.shape[1]
    adj = [np.flatnonzero(allowed[x]).tolist() for x in range(n)]

    def augment(x, seen):
        for y in adj[x]:
            if y in seen:
                continue
            seen.add(y)
            if match_y[y] < 0 or augment(match_y[y], seen):
                match_y[y] = x
                return True
        return False

    for x in range(n):
        if not augment(x, set()):
            return None
    f = [0] * n
    for y, x in enumerate(match_y):
        if x >= 0:
            f[x] = y
    return f


class PebbleSolver:
    def __init__(self, A: Structure, B: Structure, cfg: PGConfig):
        _same_vocab(A, B)
        self.A, self.B, self.cfg = A, B, cfg
        self.nA, self.nB = A.n, B.n
        self.S = 1 + self.nA * self.nB
        if self.S ** cfg.k > POSITION_CAP:
            raise BudgetExceeded(f"{self.S ** cfg.k} positions exceed the cap {POSITION_CAP}")
        self.moves = [(side, ys) for r in cfg.move_arities
                      for ys in itertools.combinations(range(cfg.k), r)
                      for side in (LEFT, RIGHT)]
        self._closure_cache: dict = {}
        self._perm_cache: dict = {}
        self.same_size = self.nA == self.nB
        if cfg.bijections is not None:
            for f in cfg.bijections:
                if sorted(f) != list(range(self.nA)) or len(f) != self.nB:
                    raise ValueError("supplied bijections must be permutations B -> A")
        elif self.same_size and max(cfg.move_arities) > 1 and self.nA > cfg.guard:
            raise BudgetExceeded(f"full bijection enumeration limited to universes <= {cfg.guard}")

    # -- positions --------------------------------------------------------
    def pi_array(self) -> np.ndarray:
        k, S = self.cfg.k, self.S
        W = np.zeros((S,) * k, dtype=bool)
        cache = {}
        for code in itertools.product(range(S), repeat=k):
            pos = decode_position(code, self.nB)
            m = position_map(pos)
            if m is None:
                continue
            key = frozenset(m.items())
            if key not in cache:
                cache[key] = is_partial_isomorphism(self.A, self.B, m)
            W[code] = cache[key]
        return W

    # -- one move -------------------------------------------------------------
    def _sub(self, W, code, side, ys):
        """Safety of all continuations, axes (spoiler tuple, response tuple)."""
        idx = list(code)
        for y in ys:
            idx[y] = slice(1, None)
        sub = W[tuple(idx)]
        r = len(ys)
        sub = sub.reshape([self.nA, self.nB] * r)
        a_axes = [2 * j for j in range(r)]
        b_axes = [2 * j + 1 for j in range(r)]
        return sub.transpose(b_axes + a_axes if side == LEFT else a_axes + b_axes)

    def _closure(self, n, good: np.ndarray) -> np.ndarray:
        if self.cfg.family.is_nowhere:
            return good
        key = (n, good.shape, good.tobytes())
        hit = self._closure_cache.get(key)
        if hit is None:
            tuples = [tuple(t) for t in np.argwhere(good).tolist()]
            closed = gamma_closure_relation(self.cfg.family, n, tuples)
            hit = np.zeros_like(good)
            for t in closed:
                hit[t] = True
            self._closure_cache[key] = hit
        return hit

    def reach(self, W, code, side, ys) -> np.ndarray:
        """``reach[s, t]``: response tuple t lies in the closure of Good_s,
        with s the Spoiler tuple and t the tuple on the other side, both
        flattened."""
        sub = self._sub(W, code, side, ys)
        r = len(ys)
        n_sp = self.nB if side == LEFT else self.nA
        n_re = self.nA if side == LEFT else self.nB
        flat = sub.reshape((n_sp ** r,) + (n_re,) * r)
        out = np.zeros((n_sp ** r, n_re ** r), dtype=bool)
        for i in range(n_sp ** r):
            out[i] = self._closure(n_re, flat[i]).reshape(-1)
        return out

    def _bijection_pool(self, side):
        """Candidate maps (spoiler universe -> response universe) as an int
        array, or None for the matching path."""
        bij = self.cfg.bijections
        if bij is not None:
            key = ("given", side)
            if key not in self._perm_cache:
                maps = bij if side == LEFT else [_perm_inverse(f) for f in bij]
                self._perm_cache[key] = np.asarray(maps, dtype=np.int64).reshape(len(maps), -1)
            return self._perm_cache[key]
        key = ("all", self.nA)
        if key not in self._perm_cache:
            if self.nA > self.cfg.guard:
                raise BudgetExceeded(f"full bijection enumeration limited to universes <= {self.cfg.guard}")
            self._perm_cache[key] = np.asarray(list(itertools.permutations(range(self.nA))),
                                               dtype=np.int64).reshape(-1, self.nA)
        return self._perm_cache[key]

    def find_bijection(self, reach: np.ndarray, r: int, side: str) -> list[int] | None:
        """A map f from the Spoiler universe to the response universe with
        ``f(s)`` reachable for every Spoiler tuple s."""
        n_sp = self.nB if side == LEFT else self.nA
        n_re = self.nA if side == LEFT else self.nB
        if n_sp != n_re:
            return None
        n = n_sp
        if r == 1 and self.cfg.bijections is None:
            return _perfect_matching(reach)
        pool = self._bijection_pool(side)
        spoiler = np.asarray(list(itertools.product(range(n), repeat=r)), dtype=np.int64).reshape(-1, r)
        weights = n ** np.arange(r - 1, -1, -1)
        s_idx = spoiler @ weights                                  # (n^r,)
        images = pool[:, spoiler]                                  # (P, n^r, r)
        t_idx = images @ weights                                   # (P, n^r)
        ok = reach[s_idx[None, :], t_idx].all(axis=1)
        hits = np.flatnonzero(ok)
        return pool[hits[0]].tolist() if len(hits) else None

    def move_ok(self, W, code, side, ys) -> bool:
        if not self.same_size:
            return False
        return self.find_bijection(self.reach(W, code, side, ys), len(ys), side) is not None

    # -- fixpoint ---------------------------------------------------------------
    def solve(self) -> "PGResult":
        W = self.pi_array()
        depth = np.where(W, -1, 0).astype(np.int64)
        start = (0,) * self.cfg.k
        bound = self.cfg.round_bound
        passes = 0
        while bound is None or passes < bound:
            memo = {}
            new = W.copy()
            changed = False
            for code in map(tuple, np.argwhere(W).tolist()):
                for side, ys in self.moves:
                    red = list(code)
                    for y in ys:
                        red[y] = 0
                    key = (side, ys, tuple(red))
                    if key not in memo:
                        memo[key] = self.move_ok(W, code, side, ys)
                    if not memo[key]:
                        new[code] = False
                        depth[code] = passes + 1
                        changed = True
                        break
            passes += 1
            W = new
            if not changed:
                break
        converged = passes > 0 and not changed
        winner_dup = bool(W[start])
        if not self.same_size:
            reason = "no bijection"
        elif not winner_dup:
            reason = "spoiler forces a non-partial-isomorphism"
        else:
            reason = "fixpoint" if converged else f"survives {passes} rounds"
        return PGResult(
            winner="Duplicator" if winner_dup else "Spoiler",
            reason=reason,
            bounded=not converged and winner_dup,
            passes=passes,
            W=W,
            depth=depth,
            solver=self,
        )


@dataclass
class PGResult:
    winner: str
    reason: str
    bounded: bool
    passes: int
    W: np.ndarray = field(repr=False)
    depth: np.ndarray = field(repr=False)
    solver: PebbleSolver = field(repr=False)

    @property
    def k(self) -> int:
        return self.solver.cfg.k

    def code(self, pos: Position) -> tuple[int, ...]:
        return encode_position(pos, self.solver.nB)

    def is_safe(self, pos: Position) -> bool:
        return bool(self.W[self.code(pos)])

    def spoiler_depth(self, pos: Position) -> int | None:
        """Rounds within which Spoiler wins from pos, None if Spoiler cannot."""
        d = int(self.depth[self.code(pos)])
        return None if d < 0 else d

    def winning_region(self) -> list[Position]:
        nB = self.solver.nB
        return [decode_position(c, nB) for c in np.argwhere(self.W).tolist()]

    def region_size(self) -> int:
        return int(self.W.sum())

    def as_dict(self) -> dict:
        start = (None,) * self.k
        return {
            "winner": self.winner, "reason": self.reason, "bounded": self.bounded,
            "rounds": self.passes, "winning_region_size": self.region_size(),
            "spoiler_depth": self.spoiler_depth(start),
        }

    # -- Duplicator strategy --------------------------------------------------
    def duplicator_response(self, pos: Position, side: str, ys: Sequence[int]):
        """Bijection and canonical response sets for a move from a safe
        position: ``(f, respond)`` where ``respond(s)`` is the set served
        against Spoiler tuple s."""
        sv = self.solver
        code = self.code(pos)
        if not self.W[code]:
            raise PreconditionError("position is not Duplicator-safe")
        ys = tuple(ys)
        reach = sv.reach(self.W, code, side, ys)
        f = sv.find_bijection(reach, len(ys), side)
        if f is None:
            raise AssertionError("safe position without a bijection")
        sub = sv._sub(self.W, code, side, ys)

        def respond(s):
            return {tuple(t) for t in np.argwhere(sub[tuple(s)]).tolist()}

        return f, respond

    # -- Spoiler strategy ------------------------------------------------------
    def _level(self, pos):
        d = self.spoiler_depth(pos)
        if d is None:
            raise PreconditionError("Duplicator wins from this position")
        # positions safe for d - 1 more rounds
        return d, (self.depth < 0) | (self.depth > d - 1)

    def spoiler_move(self, pos: Position):
        """A move (side, ys) from which Spoiler wins in fewer rounds, or None
        when pos already fails to be a partial isomorphism."""
        d, Wprev = self._level(pos)
        if d == 0:
            return None
        sv = self.solver
        code = self.code(pos)
        for side, ys in sv.moves:
            if not sv.move_ok(Wprev, code, side, ys):
                return side, ys
        raise AssertionError("no winning Spoiler move found")

    def spoiler_tuple(self, pos: Position, side: str, ys: Sequence[int], f: Sequence[int]):
        """Against Duplicator's map f, a Spoiler tuple whose image is not
        reachable from safe continuations."""
        d, Wprev = self._level(pos)
        sv = self.solver
        code = self.code(pos)
        ys = tuple(ys)
        r = len(ys)
        reach = sv.reach(Wprev, code, side, ys)
        n = len(f)
        for s in itertools.product(range(n), repeat=r):
            t = tuple(f[x] for x in s)
            if not reach[np.ravel_multi_index(s, (n,) * r), np.ravel_multi_index(t, (n,) * r)]:
                return s
        return None

    def spoiler_pick(self, pos: Position, side: str, ys: Sequence[int], s: Sequence[int], P):
        """From a response set P, a tuple leading to a position of smaller
        Spoiler depth."""
        d, _ = self._level(pos)
        best = None
        for t in sorted(P):
            nxt = list(pos)
            for y, x, z in zip(ys, s, t):
                nxt[y] = (z, x) if side == LEFT else (x, z)
            dd = self.spoiler_depth(tuple(nxt))
            if dd is not None and dd < d and (best is None or dd < best[0]):
                best = (dd, t)
        return None if best is None else best[1]


def solve_pebble_game(A: Structure, B: Structure, cfg: PGConfig) -> PGResult:
    return PebbleSolver(A, B, cfg).solve()


def switch_set_bijections(n_edges: int) -> list[tuple[int, ...]]:
    """All edge-preserving bijections of a CFI universe with n_edges edges."""
    out = []
    for mask in range(1 << n_edges):
        out.append(tuple(a ^ 1 if mask >> (a // 2) & 1 else a for a in range(2 * n_edges)))
    return out
