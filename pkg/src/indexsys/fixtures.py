"""Reference maps (doubling, tent) and hand-built index systems for them.

Every builder takes the margin ``eps``; the repository default is 1/100.
"""

from __future__ import annotations

from fractions import Fraction

from .dynamics import PLMap
from .geometry import CIRCLE, LINE, CompactPair, normalize, scalar
from .index_core import IndexSystem

EPS = Fraction(1, 100)


def doubling_map() -> PLMap:
    return PLMap([(0, 0), (1, 2)], CIRCLE, name="doubling")


def tent_map() -> PLMap:
    """3x left of 1/2, 3 - 3x right of it, on [-1/2, 3/2]."""
    return PLMap([(Fraction(-1, 2), Fraction(-3, 2)), (Fraction(1, 2), Fraction(3, 2)),
                  (Fraction(3, 2), Fraction(-3, 2))], LINE, name="tent")


def identity_map(space: str = LINE) -> PLMap:
    if space == CIRCLE:
        return PLMap([(0, 0), (1, 1)], CIRCLE, name="identity")
    return PLMap([(-1, -1), (2, 2)], LINE, name="identity")


def doubling_system(eps=EPS) -> IndexSystem:
    """Ten arcs of width 6/10 around i/10; P_i precedes P_j for j = 2i-1, 2i, 2i+1 mod 10."""
    e = scalar(eps)
    pairs = {}
    for i in range(10):
        lo, hi = (i - 3 - 3 * e) / 10, (i + 3 + 3 * e) / 10
        N = normalize([(lo, hi)], CIRCLE)
        L = normalize([(lo, (i - 1 - e) / 10), ((i + 1 + e) / 10, hi)], CIRCLE)
        pairs[str(i)] = CompactPair(N, L, str(i))
    edges = {(str(i), str((2 * i + d) % 10)) for i in range(10) for d in (-1, 0, 1)}
    return IndexSystem(pairs, frozenset(edges))


def tent_system(eps=EPS) -> IndexSystem:
    e = scalar(eps)
    t = Fraction(1, 3)
    N12 = [(-4 * e, t + 4 * e)]
    N34 = [(2 * t - 4 * e, 1 + 4 * e)]
    raw = {
        "1": (N12, [(-4 * e, -e), (Fraction(1, 9) + e, t + 4 * e)]),
        "2": (N12, [(-4 * e, Fraction(2, 9) - e), (t + e, t + 4 * e)]),
        "3": (N34, [(2 * t - 4 * e, 2 * t - e), (Fraction(7, 9) + e, 1 + 4 * e)]),
        "4": (N34, [(2 * t - 4 * e, Fraction(8, 9) - e), (1 + e, 1 + 4 * e)]),
    }
    pairs = {k: CompactPair(normalize(n), normalize(l), k) for k, (n, l) in raw.items()}
    edges = {(a, b) for a in ("1", "4") for b in ("1", "2")}
    edges |= {(a, b) for a in ("2", "3") for b in ("3", "4")}
    return IndexSystem(pairs, frozenset(edges))


def tent_trivial_system(eps=EPS) -> IndexSystem:
    """The single pair whose cocyclic subshift is empty."""
    e = scalar(eps)
    t = Fraction(1, 3)
    N = normalize([(-4 * e, 1 + 4 * e)])
    L = normalize([(-4 * e, -e), (t + e, 2 * t - e), (1 + e, 1 + 4 * e)])
    return IndexSystem({"0": CompactPair(N, L, "0")}, frozenset({("0", "0")}))
