import itertools
import math
import random
from fractions import Fraction as Q

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from indexsys.cocyclic import (
    FactorError,
    WordError,
    build_homgraph,
    cycle_product,
    detect_orbit,
    disjoint_subgraph,
    empty_up_to,
    enumerate_cycles,
    first_zero_subword,
    graph_factor,
    periodic_allowed,
    search_words,
    shift_factor,
    spectral_lower_bound,
    word_allowed,
)
from indexsys.fixtures import doubling_map, doubling_system, tent_map, tent_system, tent_trivial_system
from indexsys.geometry import disjoint


@pytest.fixture(scope="module")
def graphs():
    return {
        "tent": build_homgraph(tent_system(), tent_map()),
        "doubling": build_homgraph(doubling_system(), doubling_map()),
        "trivial": build_homgraph(tent_trivial_system(), tent_map()),
    }


def brute_product(G, w):
    """Plain sympy product along w in each degree, no normalisation."""
    out = []
    for k in (0, 1):
        d = G.vertices[w[0]].dim(k)
        M = sympy.eye(d)
        for a, b in zip(w, w[1:]):
            T = G.edges[(a, b)].matrices[k]
            rows, cols = G.vertices[b].dim(k), G.vertices[a].dim(k)
            M = sympy.Matrix(rows, cols, [x for r in T for x in r]) * M
        out.append(M)
    return out


def brute_allowed(G, w):
    if not G.allowable(w):
        return False
    if len(w) == 1:
        return not G.vertices[w[0]].is_zero
    return any(M.shape[0] * M.shape[1] and not M.is_zero_matrix for M in brute_product(G, w))


def paths(G, n):
    out = [[a] for a in G.labels]
    for _ in range(n - 1):
        out = [p + [b] for p in out for b in G.successors(p[-1])]
    return out


def random_path(G, rng, n):
    w = [rng.choice(G.labels)]
    while len(w) < n:
        w.append(rng.choice(G.successors(w[-1])))
    return w


@pytest.mark.parametrize("name", ["tent", "doubling", "trivial"])
def test_word_allowed_matches_brute_product(graphs, name):
    G = graphs[name]
    for n in range(1, 5):
        for w in paths(G, n):
            assert word_allowed(G, w) == brute_allowed(G, w)


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from(["tent", "doubling", "trivial"]), st.integers(1, 9), st.randoms(use_true_random=False))
def test_subword_closure(graphs, name, n, rng):
    G = graphs[name]
    w = random_path(G, rng, n)
    if word_allowed(G, w):
        for i, j in itertools.combinations(range(len(w) + 1), 2):
            assert word_allowed(G, w[i:j])


@pytest.mark.parametrize("name,bound", [("tent", 6), ("doubling", 5), ("trivial", 6)])
def test_emptiness_matches_enumeration(graphs, name, bound):
    G = graphs[name]
    for L in range(2, bound + 1):
        empty, witness = empty_up_to(G, L)
        assert empty == (not any(brute_allowed(G, w) for w in paths(G, L)))
        if witness:
            assert len(witness) == L and brute_allowed(G, witness)


def test_trivial_is_empty_at_three(graphs):
    G = graphs["trivial"]
    assert not empty_up_to(G, 2)[0]
    assert empty_up_to(G, 3) == (True, None)
    assert first_zero_subword(G, ["0", "0", "0"]) == (0, 3)


@pytest.mark.parametrize("name", ["tent", "doubling", "trivial"])
def test_periodic_admissibility_via_charpoly(graphs, name):
    G = graphs[name]
    lam = sympy.Symbol("lam")
    for c in enumerate_cycles(G, 6):
        M = cycle_product(G, c)
        nonnil = False
        for k in (0, 1):
            d = G.vertices[c[0]].dim(k)
            if d:
                A = sympy.Matrix(d, d, [x for r in M[k] for x in r])
                nonnil |= A.charpoly(lam).as_expr() != lam**d
        assert periodic_allowed(G, c) == nonnil


def test_cycle_enumeration_counts(graphs):
    import networkx as nx
    for G in graphs.values():
        D = nx.DiGraph(list(G.edges))
        expect = sum(1 for c in nx.simple_cycles(D) if len(c) <= 5)
        assert len(enumerate_cycles(G, 5)) == expect


def test_disjoint_subgraph(graphs):
    verts, edges = disjoint_subgraph(graphs["tent"])
    assert verts == ["1", "2", "3", "4"] and len(edges) == 8
    G = graphs["doubling"]
    verts, _ = disjoint_subgraph(G)
    best = max(len(c) for r in range(1, 11) for c in itertools.combinations(G.labels, r)
               if all(disjoint(G.core_sets[a], G.core_sets[b]) for a, b in itertools.combinations(c, 2)))
    assert len(verts) == best == 3


def test_tent_graph_factor(graphs):
    cert = graph_factor(graphs["tent"], ["1", "2", "3", "4"])
    assert cert.growth == 2
    assert math.isclose(cert.entropy_bound, math.log(2))


def test_doubling_shift_factor(graphs):
    G = graphs["doubling"]
    words = [["1", "1", "1"], ["1", "3", "5"]]
    cert = shift_factor(G, 3, words)
    assert cert.growth == 2 and cert.n == 3
    assert math.isclose(cert.entropy_bound, math.log(2) / 3)
    rng = random.Random(3)
    for _ in range(200):
        seq = [rng.choice(words) for _ in range(rng.randint(1, 8))]
        assert brute_allowed(G, sum(seq, []))


def test_search_words_certifies(graphs):
    G = graphs["doubling"]
    words = search_words(G, 3)
    cert = shift_factor(G, 3, words)
    assert cert.growth == len(words) >= 2


def test_shift_factor_rejects_overlapping_words(graphs):
    with pytest.raises(FactorError):
        shift_factor(graphs["doubling"], 3, [["1", "1", "1"], ["1", "2", "3"]])


def test_spectral_bound_is_a_lower_bound():
    A = [[1, 1], [1, 0]]
    b = spectral_lower_bound(A)
    assert b <= (1 + sympy.sqrt(5)) / 2 and b > Q(16, 10)


class TestOrbits:
    def test_doubling_period(self, graphs):
        cert = detect_orbit(graphs["doubling"], ["1", "3", "5"])
        assert cert.certified

    def test_trivial_has_no_certificate(self, graphs):
        cert = detect_orbit(graphs["trivial"], ["0"])
        assert not cert.certified and "NO-CERTIFICATE" in cert.reason

    def test_preperiodic_word(self, graphs):
        cert = detect_orbit(graphs["doubling"], ["0"], ["1", "2", "5"])
        assert cert.certified

    def test_bad_transition(self, graphs):
        with pytest.raises(WordError, match="3 -> 1"):
            detect_orbit(graphs["doubling"], ["1", "3", "1"])


def test_single_word_is_trivial(graphs):
    cert = shift_factor(graphs["doubling"], 3, [["1", "3", "5"]])
    assert cert.growth == 1 and cert.entropy_bound == 0
