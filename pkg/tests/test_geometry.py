from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cell_lists, rationals
from indexsys.geometry import (
    CIRCLE,
    LINE,
    CompactPair,
    GeometryError,
    RegionSet,
    SpaceMismatch,
    SquareSet,
    closed_hull_boxes,
    disjoint,
    normalize,
    open_hull_boxes,
    product,
    scalar,
    slice_at,
    subset_of_interior,
)


def member(cells, x):
    return any(a <= x <= b for a, b in cells)


def probes(*sets):
    """Endpoints, midpoints between consecutive endpoints, and points just outside."""
    pts = sorted({p for s in sets for c in s for p in c})
    out = set(pts)
    for a, b in zip(pts, pts[1:]):
        out.add((a + b) / 2)
    if pts:
        out.update({pts[0] - 1, pts[-1] + 1})
    return sorted(out)


class TestScalar:
    def test_accepts_exact_inputs(self):
        assert scalar("3/10") == Q(3, 10)
        assert scalar(2) == 2
        assert scalar(Q(1, 7)) == Q(1, 7)

    @pytest.mark.parametrize("bad", [0.5, True, "0.5", "1/0", None])
    def test_rejects_inexact(self, bad):
        with pytest.raises((TypeError, ValueError, ZeroDivisionError)):
            scalar(bad)


class TestNormalize:
    def test_merges_overlapping_and_touching(self):
        A = normalize([(Q(1, 2), 1), (0, Q(1, 2)), (2, 3), (Q(5, 2), Q(7, 2))])
        assert A.cells == ((0, 1), (2, Q(7, 2)))

    def test_rejects_reversed_cell(self):
        with pytest.raises(GeometryError, match="empty cell"):
            normalize([(1, 0)])

    def test_circle_wraps(self):
        A = normalize([(Q(9, 10), Q(11, 10))], CIRCLE)
        assert A.pieces() == [(0, Q(1, 10)), (Q(9, 10), 1)]
        assert A.measure() == Q(1, 5)

    def test_circle_long_arc_is_full(self):
        assert normalize([(Q(1, 3), Q(5, 3))], CIRCLE) == RegionSet.full_circle()

    @settings(max_examples=1000, deadline=None)
    @given(cell_lists())
    def test_idempotent_line(self, cells):
        A = normalize(cells)
        assert normalize(A.cells) == A
        for x in probes(cells):
            assert A.contains_point(x) == member(cells, x)

    @settings(max_examples=300, deadline=None)
    @given(cell_lists(0, 1, 24, 4))
    def test_idempotent_circle(self, cells):
        A = normalize(cells, CIRCLE)
        assert normalize(A.cells, CIRCLE) == A


class TestLineAlgebra:
    @settings(max_examples=300, deadline=None)
    @given(cell_lists(max_size=4), cell_lists(max_size=4))
    def test_boolean_ops_pointwise(self, a, b):
        A, B = normalize(a), normalize(b)
        U, I = A | B, A & B
        for x in probes(a, b):
            assert U.contains_point(x) == (member(a, x) or member(b, x))
            assert I.contains_point(x) == (member(a, x) and member(b, x))

    @settings(max_examples=300, deadline=None)
    @given(cell_lists(max_size=4), cell_lists(max_size=4))
    def test_difference_closure(self, a, b):
        A, B = normalize(a), normalize(b)
        D = A.difference_closure(B)
        assert D.issubset(A)
        pts = probes(a, b)
        # away from endpoints, closure changes nothing
        for x in ((p + q) / 2 for p, q in zip(pts, pts[1:])):
            assert D.contains_point(x) == (A.contains_point(x) and not B.contains_point(x))
        if A.is_regular():
            assert D.is_regular()

    def test_interior_subset(self):
        A, B = normalize([(0, 1)]), normalize([(0, 1)])
        assert not subset_of_interior(A, B)
        assert subset_of_interior(normalize([(Q(1, 4), Q(3, 4))]), B)
        assert subset_of_interior(normalize([(0, 1)]), normalize([(-1, 1), (1, 2)]))

    def test_disjoint_closed(self):
        assert not disjoint(normalize([(0, 1)]), normalize([(1, 2)]))
        assert disjoint(normalize([(0, 1)]), normalize([(Q(3, 2), 2)]))

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatch):
            normalize([(0, 1)]) | normalize([(0, Q(1, 2))], CIRCLE)


class TestCircleAlgebra:
    def test_wrap_intersection(self):
        A = normalize([(Q(9, 10), Q(11, 10))], CIRCLE)
        B = normalize([(0, Q(1, 2))], CIRCLE)
        assert (A & B).cells == ((0, Q(1, 10)),)

    def test_interior_of_full_circle(self):
        C = RegionSet.full_circle()
        assert subset_of_interior(C, C)

    @settings(max_examples=300, deadline=None)
    @given(cell_lists(0, 1, 24, 3), cell_lists(0, 1, 24, 3))
    def test_union_pointwise(self, a, b):
        A, B = normalize(a, CIRCLE), normalize(b, CIRCLE)
        U = A | B
        for k in range(24):
            x = Q(2 * k + 1, 48)
            assert U.contains_point(x) == (A.contains_point(x) or B.contains_point(x))


class TestCompactPair:
    def test_requires_L_in_N(self):
        with pytest.raises(GeometryError):
            CompactPair(normalize([(0, 1)]), normalize([(1, 2)]))

    def test_core(self):
        P = CompactPair(normalize([(0, 1)]), normalize([(0, Q(1, 4)), (Q(3, 4), 1)]))
        assert P.core().cells == ((Q(1, 4), Q(3, 4)),)


class TestSquare:
    def test_product_and_slices(self):
        S = product(normalize([(0, Q(1, 2))]), normalize([(0, Q(1, 4))]), 4)
        assert S.boxes == frozenset({(0, 0), (1, 0)})
        assert slice_at(S, Q(1, 8)).cells == ((0, Q(1, 4)),)
        assert slice_at(S, 1) == RegionSet.empty()

    def test_misaligned_product(self):
        with pytest.raises(GeometryError):
            product(normalize([(0, Q(1, 3))]), normalize([(0, 1)]), 4)

    def test_hulls(self):
        x, y = (Q(1, 4), Q(1, 2)), (0, Q(1, 8))
        assert set(open_hull_boxes(x, y, 4)) == {(1, 0)}
        assert set(closed_hull_boxes(x, y, 4)) == {(0, 0), (1, 0), (2, 0), (0, -1), (1, -1), (2, -1)}

    @given(st.sets(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=12),
           st.sets(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=12))
    def test_set_ops(self, a, b):
        A, B = SquareSet(6, True, frozenset(a)), SquareSet(6, True, frozenset(b))
        assert A.union(B).boxes == a | b
        assert A.intersection(B).boxes == a & b
        assert A.minus(B).boxes == a - b
        assert A.issubset(A.union(B))

    @given(rationals(0, 1, 12))
    def test_slice_matches_columns(self, x):
        S = SquareSet(4, False, frozenset({(0, 0), (1, 1), (1, 2)}))
        sl = S.slice(x)
        cols = [i for i in range(4) if Q(i, 4) <= x <= Q(i + 1, 4)]
        expect = normalize([(Q(j, 4), Q(j + 1, 4)) for i, j in S.boxes if i in cols])
        assert sl == expect
