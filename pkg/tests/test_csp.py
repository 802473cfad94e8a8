import itertools
import random

import pytest
from hypothesis import given, strategies as st

from polyclosure.cfi import build_cfi, element, even_cfi, odd_cfi
from polyclosure.csp import (XorSystem, build_c_ell, build_hypergraph_target, c_ell_vocabulary,
                             parse_target, solve_csp, solve_xor, structure_to_xor)
from polyclosure.graphs import complete_bipartite, complete_graph, petersen_graph
from polyclosure.structures import Structure, find_homomorphism, is_homomorphism

from conftest import random_structure
from oracles import brute_homomorphism_exists, brute_xor_solvable


def test_c3_sizes():
    C3 = build_c_ell(3)
    assert len(C3["R0"]) == 4 and len(C3["R1"]) == 4
    assert (0, 0, 0) in C3["R0"]
    assert (1, 1, 1) in C3["R1"]
    with pytest.raises(ValueError):
        build_c_ell(1)


def test_hypergraph_targets():
    assert build_hypergraph_target(2, 2)["R"] == {(0, 1), (1, 0)}
    assert len(build_hypergraph_target(3, 3)["R"]) == 6
    assert build_hypergraph_target(3, 4, 1) == build_hypergraph_target(3, 4)
    with pytest.raises(ValueError):
        build_hypergraph_target(1, 3)
    with pytest.raises(ValueError):
        build_hypergraph_target(3, 1)


@pytest.mark.parametrize("n,m,k", [(3, 3, 1), (4, 3, 2), (4, 2, 3), (5, 3, 2)])
def test_weak_colouring_template_matches_subset_condition(n, m, k):
    want = {t for t in itertools.product(range(m), repeat=n)
            if all(len({t[i] for i in I}) >= 2 for I in itertools.combinations(range(n), k + 1))}
    assert build_hypergraph_target(n, m, k)["R"] == want


def test_parse_target():
    assert parse_target("c3") == build_c_ell(3)
    assert parse_target("h:3:3") == build_hypergraph_target(3, 3)
    with pytest.raises(ValueError):
        parse_target("q7")


def test_encoding_cancels_duplicates():
    voc = c_ell_vocabulary(3)
    A = Structure(voc, 6, {"R1": [(3, 3, 5)], "R0": [(0, 1, 2)]})
    sys = structure_to_xor(A)
    assert set(sys.equations) == {((5,), 1), ((0, 1, 2), 0)}
    empty = structure_to_xor(Structure(voc, 2, {}))
    assert empty.equations == () and solve_xor(empty) == [0, 0]


def test_encoding_rejects_other_vocabularies():
    with pytest.raises(ValueError):
        structure_to_xor(build_hypergraph_target(3, 3))


def test_small_systems():
    assert solve_xor(XorSystem.build(2, [([0], 1), ([0, 1], 0)])) == [1, 1]
    assert solve_xor(XorSystem.build(1, [([0], 0), ([0], 1)])) is None


def test_text_roundtrip():
    sys = XorSystem.build(6, [([3, 5], 1), ([0], 0), ([], 0)])
    text = sys.to_text()
    assert "v3 v5 = 1" in text
    assert XorSystem.from_text(text) == sys
    with pytest.raises(ValueError):
        XorSystem.from_text("x1 = 1\n")


def test_support_must_be_canonical():
    with pytest.raises(ValueError):
        XorSystem(3, (((2, 1), 0),))
    with pytest.raises(ValueError):
        XorSystem(2, (((0, 5), 0),))


@given(st.integers(0, 10_000))
def test_elimination_matches_brute_force(seed):
    rng = random.Random(seed)
    nv = rng.randint(1, 7)
    eqs = [(rng.sample(range(nv), rng.randint(0, nv)), rng.randint(0, 1))
           for _ in range(rng.randint(0, 9))]
    sys = XorSystem.build(nv, eqs)
    bits = solve_xor(sys)
    assert (bits is not None) == brute_xor_solvable(nv, sys.equations)
    if bits is not None:
        assert sys.is_satisfied_by(bits)


@given(st.integers(0, 10_000), st.integers(2, 3))
def test_elimination_agrees_with_search(seed, ell):
    rng = random.Random(seed)
    A = random_structure(rng, c_ell_vocabulary(ell), rng.randint(1, 6), 0.04)
    C = build_c_ell(ell)
    h = solve_csp(A, C)
    assert (h is not None) == (find_homomorphism(A, C) is not None)
    if h is not None:
        assert is_homomorphism(A, C, h)
    if A.n <= 4:
        assert (h is not None) == brute_homomorphism_exists(A, C)


@pytest.mark.parametrize("G", [complete_graph(4), complete_bipartite(3, 3), petersen_graph()],
                         ids=["k4", "k33", "petersen"])
def test_cfi_parity(G):
    C3 = build_c_ell(3)
    assert solve_xor(structure_to_xor(odd_cfi(G).structure)) is None
    h = solve_csp(even_cfi(G).structure, C3)
    assert h is not None and is_homomorphism(even_cfi(G).structure, C3, h)


def test_cfi_parity_depends_only_on_size_of_u():
    K4 = complete_graph(4)
    for r in range(5):
        for U in itertools.combinations(range(4), r):
            sat = solve_xor(structure_to_xor(build_cfi(K4, U).structure)) is not None
            assert sat == (r % 2 == 0)


@given(st.integers(0, 10_000))
def test_double_counting_identity(seed):
    rng = random.Random(seed)
    G = complete_graph(4) if seed % 2 else petersen_graph()
    g = {}
    for e in range(len(G.edges)):
        b = rng.randint(0, 1)
        g[element(e, 1)], g[element(e, 2)] = b, 1 - b
    total = 0
    for v in range(G.n):
        total += sum(g[element(e, 2)] for e in G.incident_edges(v))
    assert total == 2 * sum(g[element(e, 2)] for e in range(len(G.edges)))
