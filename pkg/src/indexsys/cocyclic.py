"""Bounded analysis of the cocyclic subshift generated by an index system.

A word is admissible when it is a path in the precedes graph and every
finite composition of induced maps along it is nonzero in some degree.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import networkx as nx

from .dynamics import PLMap
from .geometry import RegionSet, disjoint
from .homology import (
    GradedSpace,
    InducedMap,
    Matrix,
    identity,
    induced_map,
    is_zero,
    matmul,
    mpow,
    pair_homology,
    scale_normal,
)
from .index_core import IndexSystem, _label_key

DEFAULT_CYCLE_CAP = 12
DEGREES = (0, 1)

Graded = tuple[Matrix, ...]


class WordError(ValueError):
    pass


class FactorError(ValueError):
    pass


@dataclass
class HomGraph:
    vertices: dict[str, GradedSpace]
    edges: dict[tuple[str, str], InducedMap]
    core_sets: dict[str, RegionSet]

    @property
    def labels(self) -> list[str]:
        return sorted(self.vertices, key=_label_key)

    def successors(self, a: str) -> list[str]:
        return sorted((b for x, b in self.edges if x == a), key=_label_key)

    def edge_list(self) -> list[tuple[str, str]]:
        return sorted(self.edges, key=lambda e: (_label_key(e[0]), _label_key(e[1])))

    def allowable(self, word: Sequence[str]) -> bool:
        return all((a, b) in self.edges for a, b in zip(word, word[1:]))

    def unit(self, a: str) -> Graded:
        return tuple(identity(self.vertices[a].dim(k)) for k in DEGREES)

    def step(self, state: Graded, a: str, b: str) -> Graded:
        T = self.edges[(a, b)].matrices
        return tuple(matmul(T[k], state[k]) for k in DEGREES)


def _nonzero(state: Graded) -> bool:
    return any(not is_zero(M) for M in state)


def _normal(state: Graded) -> Graded:
    return tuple(scale_normal(M) for M in state)


def build_homgraph(S: IndexSystem, f: PLMap) -> HomGraph:
    vertices = {a: pair_homology(S.pairs[a]).space for a in S.labels}
    edges = {(a, b): induced_map(S.pairs[a], S.pairs[b], f) for a, b in S.sorted_edges()}
    return HomGraph(vertices, edges, S.cores())


def _check_word(G: HomGraph, w: Sequence[str]) -> list[str]:
    w = [str(x) for x in w]
    for a in w:
        if a not in G.vertices:
            raise WordError(f"unknown label {a!r}")
    for a, b in zip(w, w[1:]):
        if (a, b) not in G.edges:
            raise WordError(f"not allowable: {a} -> {b} is not an edge")
    return w


def graded_product(G: HomGraph, w: Sequence[str]) -> Graded:
    w = _check_word(G, w)
    state = G.unit(w[0])
    for a, b in zip(w, w[1:]):
        state = G.step(state, a, b)
    return state


def word_product(G: HomGraph, w: Sequence[str], k: int) -> Matrix:
    if len(w) < 2:
        raise WordError("a product needs at least one edge")
    return graded_product(G, w)[k]


def word_allowed(G: HomGraph, w: Sequence[str]) -> bool:
    """Allowable, and the product along w is nonzero in some degree.

    A zero product on any subword forces a zero full product, so the full
    word is the only one that needs testing.
    """
    w = [str(x) for x in w]
    if not w or not G.allowable(w) or any(a not in G.vertices for a in w):
        return False
    if len(w) == 1:
        return not G.vertices[w[0]].is_zero
    return _nonzero(graded_product(G, w))


def first_zero_subword(G: HomGraph, w: Sequence[str]) -> tuple[int, int] | None:
    """Shortest (start, stop) slice of w whose product vanishes in every degree."""
    w = _check_word(G, w)
    for length in range(2, len(w) + 1):
        for i in range(len(w) - length + 1):
            if not _nonzero(graded_product(G, w[i:i + length])):
                return i, i + length
    return None


def cycle_product(G: HomGraph, cycle: Sequence[str]) -> Graded:
    cycle = [str(x) for x in cycle]
    if not cycle:
        raise WordError("empty cycle")
    return graded_product(G, cycle + cycle[:1])


def periodic_allowed(G: HomGraph, cycle: Sequence[str]) -> bool:
    """True iff the return map around the cycle is not nilpotent in some degree."""
    M = cycle_product(G, cycle)
    v = str(cycle[0])
    return any(
        G.vertices[v].dim(k) > 0 and not is_zero(mpow(M[k], G.vertices[v].dim(k)))
        for k in DEGREES
    )


def empty_up_to(G: HomGraph, length: int) -> tuple[bool, list[str] | None]:
    """Is there no admissible word of the given length?

    Breadth-first over (end vertex, product up to scalar) states; returns
    one surviving word when the answer is no.
    """
    if length < 2:
        raise ValueError("length bound must be at least 2")
    layer: dict[tuple[str, Graded], list[str]] = {}
    for a, b in G.edge_list():
        st = G.step(G.unit(a), a, b)
        if _nonzero(st):
            layer.setdefault((b, _normal(st)), [a, b])
    for _ in range(length - 2):
        nxt: dict[tuple[str, Graded], list[str]] = {}
        for (v, st), word in layer.items():
            for b in G.successors(v):
                new = G.step(st, v, b)
                if _nonzero(new):
                    nxt.setdefault((b, _normal(new)), word + [b])
        layer = nxt
        if not layer:
            break
    if not layer:
        return True, None
    return False, min(layer.values(), key=lambda w: [_label_key(x) for x in w])


def enumerate_cycles(G: HomGraph, cap: int = DEFAULT_CYCLE_CAP) -> list[list[str]]:
    """Simple cycles of the graph with at most ``cap`` vertices."""
    D = nx.DiGraph(list(G.edges))
    out = [list(c) for c in nx.simple_cycles(D, length_bound=cap)]
    for c in out:
        k = min(range(len(c)), key=lambda i: _label_key(c[i]))
        c[:] = c[k:] + c[:k]
    return sorted(out, key=lambda c: (len(c), [_label_key(x) for x in c]))


def distinguishable(G: HomGraph, w1: Sequence[str], w2: Sequence[str]) -> bool:
    if len(w1) != len(w2):
        raise WordError("words of different length")
    return any(disjoint(G.core_sets[str(a)], G.core_sets[str(b)]) for a, b in zip(w1, w2))


# -- certificates ---------------------------------------------------------------

@dataclass
class FactorCertificate:
    """f^n on the union of the word cores factors onto a shift.

    ``growth`` is an exact lower bound for the growth rate of the target
    shift (k symbols for a full shift); the entropy bound for f is
    log(growth) / n.
    """

    kind: str
    n: int
    symbols: list[list[str]]
    growth: Fraction
    states: int
    matrices: dict[str, list] = field(default_factory=dict)

    @property
    def entropy_bound(self) -> float:
        return math.log(self.growth) / self.n if self.growth > 0 else 0.0

    def describe(self) -> str:
        g = self.growth
        gs = str(g.numerator) if g.denominator == 1 else f"{g.numerator}/{g.denominator}"
        return f"entropy >= log({gs})/{self.n} = {self.entropy_bound:.6f} ({self.kind})"


def _closure(G: HomGraph, starts, moves, cap: int) -> tuple[bool, int, object]:
    """Explore normalised products reachable from ``starts`` under ``moves``.

    Returns (closed, number of states, offending path or None).  A zero
    product anywhere aborts with the path that produced it.
    """
    seen = {}
    queue = deque()
    for key, st, path in starts:
        if not _nonzero(st):
            return False, 0, path
        node = (key, _normal(st))
        if node not in seen:
            seen[node] = path
            queue.append((key, st, path, 0))
    while queue:
        key, st, path, depth = queue.popleft()
        if depth >= cap:
            return False, len(seen), None
        for nkey, nst, npath in moves(key, st, path):
            if not _nonzero(nst):
                return False, len(seen), npath
            node = (nkey, _normal(nst))
            if node not in seen:
                seen[node] = npath
                queue.append((nkey, _normal(nst), npath, depth + 1))
    return True, len(seen), None


def shift_factor(G: HomGraph, n: int, words: Sequence[Sequence[str]], cap: int = 64) -> FactorCertificate:
    """Certify that f^n factors onto the full shift over ``words``."""
    words = [[str(x) for x in w] for w in words]
    if not words:
        raise FactorError("no candidate words")
    for w in words:
        if len(w) != n:
            raise FactorError(f"word {w} does not have length {n}")
        _check_word(G, w)
    for w1, w2 in itertools.combinations(words, 2):
        if not distinguishable(G, w1, w2):
            raise FactorError(f"words {w1} and {w2} are not distinguishable")
    for w1, w2 in itertools.product(words, repeat=2):
        if not word_allowed(G, w1 + w2):
            raise FactorError(f"concatenation {w1}+{w2} is not admissible")

    prods = [graded_product(G, w) for w in words]

    def moves(i, st, path):
        for j, w in enumerate(words):
            bridge = G.step(st, words[i][-1], w[0])
            new = tuple(matmul(prods[j][k], bridge[k]) for k in DEGREES)
            yield j, new, path + [j]

    closed, states, bad = _closure(G, [(i, prods[i], [i]) for i in range(len(words))], moves, cap)
    if not closed:
        if bad is None:
            raise FactorError(f"product semigroup did not close within {cap} steps")
        raise FactorError(f"zero product along word sequence {[words[i] for i in bad]}")
    mats = {"".join(w) if all(len(x) == 1 for x in w) else ",".join(w): [_render(M) for M in p]
            for w, p in zip(words, prods)}
    return FactorCertificate("full shift", n, words, Fraction(len(words)), states, mats)


def _render(M: Matrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in M]


def spectral_lower_bound(adj: Sequence[Sequence[int]]) -> Fraction:
    """Exact lower bound for the spectral radius of a nonnegative matrix.

    Collatz-Wielandt: for any positive vector v, min_i (A v)_i / v_i is a
    lower bound.  v is a rationalised power-iteration estimate, so the
    bound is tight up to rounding of v yet still exact.
    """
    import numpy as np

    A = np.array(adj, dtype=float)
    n = len(adj)
    if n == 0:
        return Fraction(0)
    v = np.ones(n)
    for _ in range(200):
        w = A @ v + 1e-12
        v = w / w.max()
    best = Fraction(0)
    for cand in (np.ones(n), v):
        q = [Fraction(float(x)).limit_denominator(10**6) or Fraction(1, 10**6) for x in cand]
        q = [x if x > 0 else Fraction(1, 10**6) for x in q]
        ratio = min(sum(Fraction(adj[i][j]) * q[j] for j in range(n)) / q[i] for i in range(n))
        best = max(best, ratio)
    return best


def _essential(vertices: list[str], edges: set[tuple[str, str]]) -> list[str]:
    keep = set(vertices)
    while True:
        drop = {v for v in keep
                if not any((v, b) in edges for b in keep) or not any((a, v) in edges for a in keep)}
        if not drop:
            return sorted(keep, key=_label_key)
        keep -= drop


def graph_factor(G: HomGraph, vertices: Sequence[str], cap: int = 64) -> FactorCertificate:
    """Certify a factor onto the vertex shift of an induced subgraph.

    Requires pairwise disjoint cores and every path product nonzero (the
    cocyclic subshift then is the whole vertex shift).
    """
    vs = [str(v) for v in vertices]
    for a, b in itertools.combinations(vs, 2):
        if not disjoint(G.core_sets[a], G.core_sets[b]):
            raise FactorError(f"cores of {a} and {b} intersect")
    edges = {(a, b) for (a, b) in G.edges if a in vs and b in vs}
    core = _essential(vs, edges)
    sub = [(a, b) for (a, b) in sorted(edges) if a in core and b in core]

    def moves(v, st, path):
        for a, b in sub:
            if a == v:
                yield b, G.step(st, a, b), path + [b]

    starts = [(b, G.step(G.unit(a), a, b), [a, b]) for a, b in sub]
    closed, states, bad = _closure(G, starts, moves, cap)
    if not closed:
        if bad is None:
            raise FactorError(f"path products did not close within {cap} steps")
        raise FactorError(f"zero product along path {bad}")
    idx = {v: i for i, v in enumerate(core)}
    adj = [[0] * len(core) for _ in core]
    for a, b in sub:
        adj[idx[a]][idx[b]] = 1
    growth = spectral_lower_bound(adj) if core else Fraction(0)
    return FactorCertificate("vertex shift", 1, [[v] for v in core], growth, states)


def disjoint_subgraph(G: HomGraph, exhaustive_limit: int = 16) -> tuple[list[str], list[tuple[str, str]]]:
    """A largest vertex set with pairwise disjoint cores, plus its induced edges.

    Exhaustive for small graphs (ties broken toward the smallest labels),
    greedy beyond ``exhaustive_limit`` vertices.
    """
    labels = G.labels
    clash = {a: {b for b in labels if b != a and not disjoint(G.core_sets[a], G.core_sets[b])}
             for a in labels}
    if len(labels) <= exhaustive_limit:
        best: list[str] = []
        for size in range(len(labels), 0, -1):
            for combo in itertools.combinations(labels, size):
                if all(b not in clash[a] for a, b in itertools.combinations(combo, 2)):
                    best = list(combo)
                    break
            if best:
                break
    else:
        best = []
        for a in sorted(labels, key=lambda v: (len(clash[v]), _label_key(v))):
            if not any(b in clash[a] for b in best):
                best.append(a)
        best.sort(key=_label_key)
    edges = [(a, b) for (a, b) in G.edge_list() if a in best and b in best]
    return best, edges


def search_words(G: HomGraph, n: int, limit: int = 2000) -> list[list[str]]:
    """Greedy search for a large set of length-n words usable by :func:`shift_factor`."""
    cands = []
    for w in _paths(G, n):
        if (w[-1], w[0]) in G.edges and word_allowed(G, w + w[:1]):
            cands.append(w)
        if len(cands) >= limit:
            break
    compat = nx.Graph()
    compat.add_nodes_from(range(len(cands)))
    for i, j in itertools.combinations(range(len(cands)), 2):
        a, b = cands[i], cands[j]
        if ((a[-1], b[0]) in G.edges and (b[-1], a[0]) in G.edges and distinguishable(G, a, b)):
            compat.add_edge(i, j)
    best: list[int] = []
    for seed in range(len(cands)):
        clique = [seed]
        for j in sorted(compat[seed], key=lambda x: -compat.degree(x)):
            if all(compat.has_edge(j, c) for c in clique):
                clique.append(j)
        if len(clique) > len(best):
            best = clique
    return [cands[i] for i in sorted(best)]


def _paths(G: HomGraph, n: int):
    def grow(word):
        if len(word) == n:
            yield word
            return
        for b in G.successors(word[-1]):
            yield from grow(word + [b])

    for a in G.labels:
        yield from grow([a])


@dataclass
class OrbitCertificate:
    preperiod: list[str]
    period: list[str]
    certified: bool
    reason: str
    matrices: dict[str, list] = field(default_factory=dict)


def detect_orbit(G: HomGraph, period: Sequence[str], preperiod: Sequence[str] = ()) -> OrbitCertificate:
    """Check that the orbital Conley index along a word is nonzero.

    The word is bi-infinite: the period repeated backward, the preperiod,
    then the period repeated forward (for an empty preperiod simply the
    periodic word).  With M the return map of the cycle at period[0], d
    its dimension and P the product from period[0] through the preperiod
    back to period[0], every finite composition is nonzero iff
    M^d P M^d != 0 in some degree.  A zero means no certificate, never
    that the orbit does not exist.
    """
    v = [str(x) for x in period]
    u = [str(x) for x in preperiod]
    if not v:
        raise WordError("empty period")
    loop = v + u + v[:1] if u else v + v[:1]
    _check_word(G, loop)
    M = cycle_product(G, v)
    P = graded_product(G, loop)
    mats = {"cycle": [_render(m) for m in M], "transit": [_render(m) for m in P]}
    v0 = v[0]
    for k in DEGREES:
        d = G.vertices[v0].dim(k)
        if d == 0:
            continue
        Md = mpow(M[k], d)
        if not is_zero(matmul(Md, matmul(P[k], Md))):
            return OrbitCertificate(u, v, True, f"nonzero in degree {k}", mats)
    return OrbitCertificate(u, v, False, "NO-CERTIFICATE: some finite composition vanishes", mats)
