import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from polyclosure.errors import BudgetExceeded, PreconditionError
from polyclosure.families import majority, maltsev, nowhere
from polyclosure.games import (LEFT, RIGHT, PGConfig, distinguishes, solve_pebble_game,
                               switch_set_bijections)
from polyclosure.games.pebble import decode_position, encode_position, position_map
from polyclosure.graphs import cycle_graph, disjoint_union, graph_structure, star_graph
from polyclosure.structures import Structure, Vocabulary, is_partial_isomorphism

from conftest import random_structure
from oracles import naive_pebble_winner

E = Vocabulary.of(("E", 2))


def gs(G):
    return graph_structure(G)


def test_position_coding():
    pos = (None, (2, 1), (0, 0))
    assert decode_position(encode_position(pos, 3), 3) == pos
    assert position_map(((0, 1), (0, 2))) is None
    assert position_map(((0, 1), (2, 1))) is None
    assert position_map(((0, 1), None, (0, 1))) == {0: 1}


def test_config_validation():
    with pytest.raises(ValueError):
        PGConfig(0, nowhere())
    with pytest.raises(ValueError):
        PGConfig(2, nowhere(), move_arities=(3,))


def test_identical_structures_are_a_duplicator_win():
    rng = random.Random(3)
    A = random_structure(rng, E, 4, 0.4)
    for fam in (nowhere(), majority(), maltsev()):
        assert solve_pebble_game(A, A, PGConfig(2, fam)).winner == "Duplicator"


def test_different_sizes():
    res = solve_pebble_game(gs(cycle_graph(3)), gs(cycle_graph(4)), PGConfig(2, nowhere()))
    assert res.winner == "Spoiler" and res.reason == "no bijection"


def test_refinement_equivalent_cycles():
    A, B = gs(cycle_graph(6)), gs(disjoint_union(cycle_graph(3), cycle_graph(3)))
    assert not distinguishes(A, B)
    res = solve_pebble_game(A, B, PGConfig(2, nowhere(), move_arities=(1,)))
    assert res.winner == "Duplicator" and res.reason == "fixpoint"
    assert solve_pebble_game(A, B, PGConfig(3, nowhere(), move_arities=(1,))).winner == "Spoiler"


def test_path_versus_star():
    path = Structure(E, 4, {"E": [(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2)]})
    star = gs(star_graph(3))
    assert distinguishes(path, star)
    res = solve_pebble_game(path, star, PGConfig(2, nowhere(), move_arities=(1,)))
    assert res.winner == "Spoiler"
    assert res.spoiler_depth((None, None)) >= 1


def test_round_bound_gives_bounded_verdict():
    A, B = gs(cycle_graph(6)), gs(disjoint_union(cycle_graph(3), cycle_graph(3)))
    res = solve_pebble_game(A, B, PGConfig(3, nowhere(), move_arities=(1,), round_bound=1))
    assert res.winner == "Duplicator" and res.bounded and res.passes == 1


def test_full_bijection_guard():
    A = gs(cycle_graph(7))
    with pytest.raises(BudgetExceeded):
        solve_pebble_game(A, A, PGConfig(2, majority()))
    # unary moves use matchings and are not limited by the guard
    assert solve_pebble_game(A, A, PGConfig(2, majority(), move_arities=(1,))).winner == "Duplicator"


def test_restricted_bijections():
    A = gs(cycle_graph(4))
    ident = [tuple(range(4))]
    res = solve_pebble_game(A, A, PGConfig(2, nowhere(), bijections=ident))
    assert res.winner == "Duplicator"
    rotation = [(1, 2, 3, 0)]
    # a single rotation is an automorphism too
    assert solve_pebble_game(A, A, PGConfig(2, nowhere(), bijections=rotation)).winner == "Duplicator"
    swap = [(1, 0, 2, 3)]
    assert solve_pebble_game(A, A, PGConfig(2, nowhere(), bijections=swap)).winner == "Spoiler"
    with pytest.raises(ValueError):
        solve_pebble_game(A, A, PGConfig(2, nowhere(), bijections=[(0, 0, 1, 2)]))


def test_switch_set_bijections():
    maps = switch_set_bijections(2)
    assert len(maps) == 4
    assert (1, 0, 3, 2) in maps and (0, 1, 2, 3) in maps


def _instance(rng):
    r = rng.choice([1, 2])
    voc = Vocabulary.of(("R", r))
    n = rng.randint(1, 4)
    A = random_structure(rng, voc, n, rng.choice([0.2, 0.4, 0.6]))
    kind = rng.random()
    if kind < 0.35:
        perm = list(range(n))
        rng.shuffle(perm)
        B = A.relabel(perm)
    elif kind < 0.7:
        t = tuple(rng.randrange(n) for _ in range(r))
        B = A.replace(R=set(A["R"]) ^ {t})
    else:
        B = random_structure(rng, voc, n, rng.choice([0.2, 0.4, 0.6]))
    return A, B


FAMS = {"nowhere": (nowhere(), True), "majority": (majority(), False), "maltsev": (maltsev(), False)}


@settings(max_examples=80)
@given(st.integers(0, 100_000), st.sampled_from(sorted(FAMS)), st.integers(1, 2), st.booleans())
def test_solver_matches_naive_oracle(seed, fam, k, unary_only):
    rng = random.Random(seed)
    A, B = _instance(rng)
    P, is_nowhere = FAMS[fam]
    arities = (1,) if unary_only else tuple(range(1, k + 1))
    res = solve_pebble_game(A, B, PGConfig(k, P, move_arities=arities))
    want = naive_pebble_winner(A, B, k, P.fn, P.arity, arities, nowhere=is_nowhere)
    assert res.winner == want


def _solved(seed):
    rng = random.Random(seed)
    A, B = _instance(rng)
    return A, B, solve_pebble_game(A, B, PGConfig(2, majority()))


@settings(max_examples=40)
@given(st.integers(0, 100_000))
def test_winning_region_is_a_fixpoint(seed):
    A, B, res = _solved(seed)
    if A.n != B.n:
        return
    sv = res.solver
    for pos in res.winning_region():
        assert is_partial_isomorphism(A, B, position_map(pos))
        code = res.code(pos)
        for side, ys in sv.moves:
            assert sv.move_ok(res.W, code, side, ys)
            f, respond = res.duplicator_response(pos, side, ys)
            n = A.n
            for s in itertools.product(range(n), repeat=len(ys)):
                P = respond(s)
                for t in P:
                    nxt = list(pos)
                    for y, x, z in zip(ys, s, t):
                        nxt[y] = (z, x) if side == LEFT else (x, z)
                    assert res.is_safe(tuple(nxt))


@settings(max_examples=40)
@given(st.integers(0, 100_000), st.booleans())
def test_spoiler_strategy_wins_within_depth(seed, grab_all):
    A, B, res = _solved(seed)
    if A.n != B.n or res.winner == "Duplicator":
        return
    rng = random.Random(seed)
    n = A.n
    pos = (None, None)
    d = res.spoiler_depth(pos)
    for _ in range(d):
        side, ys = res.spoiler_move(pos)
        f = list(range(n))
        rng.shuffle(f)
        s = res.spoiler_tuple(pos, side, ys, f)
        assert s is not None
        target = tuple(f[x] for x in s)
        P = set(itertools.product(range(n), repeat=len(ys))) if grab_all else {target}
        t = res.spoiler_pick(pos, side, ys, s, P)
        assert t is not None
        nxt = list(pos)
        for y, x, z in zip(ys, s, t):
            nxt[y] = (z, x) if side == LEFT else (x, z)
        pos = tuple(nxt)
        nd = res.spoiler_depth(pos)
        assert nd is not None and nd < d
        d = nd
        if d == 0:
            break
    m = position_map(pos)
    assert m is None or not is_partial_isomorphism(A, B, m)


def test_duplicator_response_requires_safe_position():
    A = gs(cycle_graph(4))
    B = gs(star_graph(3))
    res = solve_pebble_game(A, B, PGConfig(2, nowhere(), move_arities=(1,)))
    with pytest.raises(PreconditionError):
        res.duplicator_response(((0, 0), (1, 1)), RIGHT, (0,))


@settings(max_examples=40)
@given(st.integers(0, 100_000))
def test_unary_nowhere_game_matches_colour_refinement(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    def rand_graph():
        edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5]
        rel = edges + [(b, a) for a, b in edges]
        return Structure(E, n, {"E": rel})
    A = rand_graph()
    B = A.relabel(rng.sample(range(n), n)) if rng.random() < 0.3 else rand_graph()
    res = solve_pebble_game(A, B, PGConfig(2, nowhere(), move_arities=(1,)))
    assert (res.winner == "Spoiler") == distinguishes(A, B)
    assert res.as_dict()["winner"] == res.winner
    assert isinstance(res.as_dict()["winning_region_size"], int)
