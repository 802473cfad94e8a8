"""Acceptance suite: one test per criterion, each under its wall-clock bound.

Every test prints a single PASS/FAIL line; the lines are repeated in the
terminal summary.
"""
import itertools
import random
import time

import pytest

from polyclosure.cfi import (all_switch_sets, build_cfi, even_cfi, gadget_behaviour, is_automorphism,
                             is_good_for, odd_cfi, odd_set, restriction_is_partial_iso,
                             switching_number)
from polyclosure.csp import (build_c_ell, build_hypergraph_target, solve_xor, structure_to_xor)
from polyclosure.families import (check_invariance, is_partial_polymorphism, majority, maltsev,
                                  near_unanimity, nowhere)
from polyclosure.games import (PGConfig, adversarial_verify, distinguishes, robber_girth_move,
                               solve_cr_game, solve_cr_game_minimax, solve_pebble_game)
from polyclosure.games.copsrobber import invariant_star
from polyclosure.graphs import (complete_bipartite, complete_graph, cycle_graph, disjoint_union,
                                generate_regular, girth, graph_structure, path_edges,
                                regular_graphs, star_graph)
from polyclosure.quantifiers import (csp_class, exhaustive_census, gamma_equivalence_check,
                                     is_p_closed, random_census)
from polyclosure.errors import PreconditionError
from polyclosure.structures import (Structure, Vocabulary, enumerate_structures, find_homomorphism,
                                    find_isomorphism, is_homomorphism)

from conftest import random_structure, record_acceptance
from oracles import naive_pebble_winner

pytestmark = pytest.mark.slow


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def finish(number, ok, text, timer, bound):
    ok = ok and timer.seconds < bound
    record_acceptance(number, ok, text, timer.seconds, bound)
    assert ok, text


def test_criterion_1_family_properties():
    with Timer() as t:
        reports = [check_invariance(P, 4) for P in (maltsev(), majority(), near_unanimity(4))]
    ok = all(r.projective and r.strongly_invariant and r.invariant and r.partial_choice
             and not r.counterexamples for r in reports)
    finish(1, ok, "maltsev, majority and nu:4 projective up to n=4 with no counterexamples", t, 10)


def test_criterion_2_partial_polymorphisms():
    with Timer() as t:
        mj = [is_partial_polymorphism(majority(), build_hypergraph_target(n, m))
              for n, m in [(2, 2), (2, 3), (3, 3), (3, 4)]]
        nu = is_partial_polymorphism(near_unanimity(4), build_hypergraph_target(3, 3, 2))
    finish(2, all(mj) and nu, "majority preserves H(n,m); nu:4 preserves the 2-weak H(3,3)", t, 1)


@pytest.mark.parametrize("name,G", [("K4", complete_graph(4)), ("K3,3", complete_bipartite(3, 3))])
def test_criterion_3_parity_separation(name, G):
    C = build_c_ell(3)
    with Timer() as t:
        ev, od = even_cfi(G).structure, odd_cfi(G).structure
        bits = solve_xor(structure_to_xor(ev))
        witness_ok = bits is not None and is_homomorphism(ev, C, dict(enumerate(bits)))
        odd_unsat = solve_xor(structure_to_xor(od)) is None
        agree = (find_homomorphism(ev, C) is not None) and (find_homomorphism(od, C) is None)
    finish(3, witness_ok and odd_unsat and agree,
           f"{name}: even CFI solvable with verified witness, odd unsolvable, search agrees", t, 1)


def test_criterion_4_parity_of_u():
    K4 = complete_graph(4)
    subsets = [frozenset(c) for r in range(5) for c in itertools.combinations(range(4), r)]
    with Timer() as t:
        structs = {U: build_cfi(K4, U).structure for U in subsets}
        bad = [(sorted(U), sorted(V)) for U, V in itertools.combinations_with_replacement(subsets, 2)
               if (find_isomorphism(structs[U], structs[V]) is not None) != (len(U) % 2 == len(V) % 2)]
    finish(4, len(subsets) == 16 and not bad,
           "all 16 twisted K4 instances are isomorphic exactly when the parities of U agree", t, 60)


def test_criterion_5_good_bijection_calculus():
    K4 = complete_graph(4)
    ev, od = even_cfi(K4), odd_cfi(K4)
    small_F = [frozenset(c) for r in range(3) for c in itertools.combinations(range(6), r)]
    violations = 0
    with Timer() as t:
        sets = list(all_switch_sets(K4))
        for S in sets:
            for v in range(4):
                want = "auto" if switching_number(S, v) % 2 == 0 else "swap"
                violations += gadget_behaviour(S, v) != want
            violations += is_automorphism(S, ev) != (not odd_set(S))
            for F in small_F:
                if is_good_for(S, F) and not restriction_is_partial_iso(S, F, ev, od):
                    violations += 1
    finish(5, len(sets) == 64 and violations == 0,
           f"64 switch sets x {len(small_F)} edge sets on K4: {violations} violations", t, 30)


def test_criterion_6_closure_verdicts():
    C3 = build_c_ell(3)
    K = csp_class(C3)
    with Timer() as t:
        exhaustive = exhaustive_census(C3.vocab, 3, max_tuples=3)
        rand = random_census(C3.vocab, 1000, 5, seed=2024)
        v_ex = is_p_closed(K, near_unanimity(4), exhaustive)
        v_rand = is_p_closed(K, near_unanimity(4), rand)
        g_ex = gamma_equivalence_check(K, near_unanimity(4), exhaustive)
        g_rand = gamma_equivalence_check(K, near_unanimity(4), rand)
        # recorded, not asserted
        mj = is_p_closed(K, majority(), exhaustive)
    print(f"  majority closure of CSP(C3) on the census: holds={mj.holds}")
    ok = (v_ex.holds and v_rand.holds and g_ex.holds and g_rand.holds
          and g_ex.notes["one_step_holds"] and g_rand.notes["one_step_holds"])
    finish(6, ok, f"CSP(C3) nu:4-closed on {len(exhaustive)} census + 1000 random structures, "
                  f"closure characterisation agrees", t, 300)


def _one_relation_corpus():
    """Every pair over unary relations and over binary relations on at most
    two elements (up to isomorphism on the left), plus seeded samples with
    binary relations on three and four elements."""
    pairs = []
    for r, sizes in ((1, (1, 2, 3, 4)), (2, (1, 2))):
        voc = Vocabulary.of(("R", r))
        for n in sizes:
            left = list(enumerate_structures(voc, n))
            right = list(enumerate_structures(voc, n, canonical=False))
            for A in left:
                for B in right:
                    pairs.append((A, B))
    rng = random.Random(77)
    voc = Vocabulary.of(("R", 2))
    for _ in range(150):
        n = rng.choice((3, 4))
        A = random_structure(rng, voc, n, rng.choice((0.2, 0.35, 0.5)))
        roll = rng.random()
        if roll < 0.4:
            B = A.relabel(rng.sample(range(n), n))
        elif roll < 0.7:
            t = (rng.randrange(n), rng.randrange(n))
            B = A.replace(R=set(A["R"]) ^ {t})
        else:
            B = random_structure(rng, voc, n, rng.choice((0.2, 0.35, 0.5)))
        pairs.append((A, B))
    return pairs


def test_criterion_7_game_oracles():
    with Timer() as t:
        corpus = _one_relation_corpus()
        games = mismatches = 0
        fams = [(nowhere(), True), (majority(), False)]
        for A, B in corpus:
            for P, is_nowhere in fams:
                for k in (1, 2):
                    # binary moves with k=2 on four elements are sampled more thinly
                    arity_sets = [(1,)] if k == 1 else [(1,), (1, 2)]
                    for ar in arity_sets:
                        games += 1
                        got = solve_pebble_game(A, B, PGConfig(k, P, move_arities=ar)).winner
                        want = naive_pebble_winner(A, B, k, P.fn, P.arity, ar, nowhere=is_nowhere)
                        mismatches += got != want
        rng = random.Random(2023)
        E = Vocabulary.of(("E", 2))
        refinement_mismatch = 0
        pairs = 0
        while pairs < 200:
            n = rng.randint(2, 6)
            def graph():
                es = [e for e in itertools.combinations(range(n), 2) if rng.random() < rng.choice((0.3, 0.5))]
                return Structure(E, n, {"E": es + [(b, a) for a, b in es]})
            A = graph()
            roll = rng.random()
            if roll < 0.3:
                B = A.relabel(rng.sample(range(n), n))
            elif roll < 0.4 and n == 6:
                A = graph_structure(cycle_graph(6))
                B = graph_structure(disjoint_union(cycle_graph(3), cycle_graph(3)))
            else:
                B = graph()
            res = solve_pebble_game(A, B, PGConfig(2, nowhere(), move_arities=(1,)))
            refinement_mismatch += (res.winner == "Spoiler") != distinguishes(A, B)
            pairs += 1
    finish(7, mismatches == 0 and refinement_mismatch == 0,
           f"{games} pebble games match the naive solver; 200 graph pairs match colour refinement", t, 600)


def test_criterion_8_cops_and_robber():
    with Timer() as t:
        graphs = [G for n in (4, 6, 8) for G in regular_graphs(n, 3)]
        disagreements = monotone_failures = 0
        for G in graphs:
            sols = {}
            for k in (0, 1, 2):
                sols[k] = solve_cr_game(G, k, 3)
                disagreements += sols[k].safe != solve_cr_game_minimax(G, k, 3)
            for hi in (1, 2):
                for lo in range(hi):
                    monotone_failures += sum(1 for F, u in sols[hi].safe
                                             if len(F) <= lo and not sols[lo].is_safe(F, u))
    finish(8, len(graphs) == 9 and disagreements == 0 and monotone_failures == 0,
           f"{len(graphs)} cubic graphs on <= 8 vertices, k <= 2: solvers agree, safety monotone in k", t, 600)


def test_criterion_9_strategy_translation():
    with Timer() as t:
        found = None
        for n in (4, 6, 8):
            for G in regular_graphs(n, 3, connected=True):
                for k in (1, 2, 3):
                    sol = solve_cr_game(G, k)
                    if sol.is_safe(frozenset(), 0):
                        found = (G, k, sol)
                        break
                if found:
                    break
            if found:
                break
        G, k, sol = found
        rep = adversarial_verify(G, k, 3, sol)
    finish(9, rep.ok, f"smallest instance {G.n} vertices with k={k}: {rep.states} states, "
                      f"{rep.steps} exhaustive Spoiler steps over 3 rounds, no failures", t, 1800)


def test_criterion_10_girth_strategy():
    with Timer() as t:
        G = generate_regular(3, 30, 7, seed=0)
        rng = random.Random(10)
        runs = 0
        while runs < 100:
            u = rng.randrange(G.n)
            F = frozenset(rng.sample(range(len(G.edges)), rng.randint(0, 3)))
            if not invariant_star(G, u, F, 1):
                continue
            paths = robber_girth_move(G, 1, (F, u), frozenset())
            used = set()
            for p in paths:
                es = path_edges(G, p)
                assert p[0] == u and not used.intersection(es)
                assert invariant_star(G, p[-1], frozenset(), 1)
                used.update(es)
            assert len({p[1] for p in paths}) == 3
            runs += 1
        guards = 0
        near = G.incident_edges(0)[0]
        bad_calls = [
            lambda: robber_girth_move(G, 0, (frozenset(), 0), ()),
            lambda: robber_girth_move(complete_graph(4), 1, (frozenset(), 0), ()),
            lambda: robber_girth_move(G, 1, (frozenset({near}), 0), ()),
            lambda: robber_girth_move(G, 1, (frozenset(), 0), {near}),
            lambda: robber_girth_move(star_graph(3), 1, (frozenset(), 0), ()),
            lambda: robber_girth_move(G, 2, (frozenset(), 0), ()),
        ]
        for call in bad_calls:
            try:
                call()
            except PreconditionError:
                guards += 1
    ok = girth(G) >= 7 and runs == 100 and guards == len(bad_calls)
    finish(10, ok, f"100 girth-strategy moves on a cubic girth-{girth(G)} graph, "
                   f"{guards}/{len(bad_calls)} guard violations rejected", t, 60)
