"""Exact set algebra on finite unions of closed rational intervals.

Three spaces are supported: the real line, the circle R/Z, and the
grid-quantized square (unions of grid boxes, see :class:`SquareSet`).
Every endpoint is a :class:`fractions.Fraction`; nothing is ever rounded.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

LINE = "line"
CIRCLE = "circle"
SPACES = (LINE, CIRCLE)

Cell = tuple[Fraction, Fraction]

_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class GeometryError(ValueError):
    pass


class SpaceMismatch(GeometryError):
    pass


def scalar(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are refused: a binary float is almost never the rational the
    caller meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL.match(value)
        if not m:
            raise GeometryError(f"not a rational literal: {value!r}")
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise GeometryError(f"zero denominator: {value!r}")
        return Fraction(int(m.group(1)), den)
    raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")


def fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- line helpers -----------------------------------------------------------

def _merge(cells: Iterable[Cell]) -> list[Cell]:
    out: list[list[Fraction]] = []
    for a, b in sorted(cells):
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1][1] = b
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def _intersect(A: Sequence[Cell], B: Sequence[Cell]) -> list[Cell]:
    out = []
    i = j = 0
    while i < len(A) and j < len(B):
        lo = max(A[i][0], B[j][0])
        hi = min(A[i][1], B[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if A[i][1] < B[j][1]:
            i += 1
        else:
            j += 1
    return _merge(out)


def _open_gaps(B: Sequence[Cell]):
    """Open intervals making up the complement of B; None stands for infinity."""
    gaps = []
    prev = None
    for a, b in B:
        gaps.append((prev, a))
        prev = b
    gaps.append((prev, None))
    return gaps


def _diff_closure(A: Sequence[Cell], B: Sequence[Cell]) -> list[Cell]:
    out = []
    for g0, g1 in _open_gaps(B):
        for a, b in A:
            if (g1 is None or a < g1) and (g0 is None or g0 < b):
                lo = a if g0 is None else max(a, g0)
                hi = b if g1 is None else min(b, g1)
                if lo < hi or (lo == hi and a == b):
                    out.append((lo, hi))
    return _merge(out)


def _inside_interior(A: Sequence[Cell], B: Sequence[Cell]) -> bool:
    for a, b in A:
        if not any(c < a and b < d for c, d in B):
            return False
    return True


# -- circle helpers ---------------------------------------------------------

def _unwrap_arc(a: Fraction, b: Fraction) -> list[Cell]:
    if b - a >= 1:
        return [(Fraction(0), Fraction(1))]
    k = math.floor(a)
    a, b = a - k, b - k
    if b <= 1:
        return [(a, b)]
    return [(a, Fraction(1)), (Fraction(0), b - 1)]


def _wrap(pieces: Sequence[Cell]) -> tuple[Cell, ...]:
    """Turn merged pieces of [0, 1] into canonical circle arcs."""
    pieces = _merge((Fraction(0), Fraction(0)) if (a, b) == (1, 1) else (a, b) for a, b in pieces)
    if not pieces:
        return ()
    if pieces[0] == (0, 1):
        return ((Fraction(0), Fraction(1)),)
    if pieces[-1][1] == 1 and pieces[0][0] == 0 and len(pieces) > 1:
        p = pieces.pop()[0]
        q = pieces.pop(0)[1]
        pieces.append((p, 1 + q))
    return tuple(sorted(pieces))


def _lift(arcs: Sequence[Cell], lo: int = -1, hi: int = 2) -> list[Cell]:
    pieces = [c for a, b in arcs for c in _unwrap_arc(a, b)]
    return _merge((a + k, b + k) for k in range(lo, hi) for a, b in pieces)


# -- RegionSet --------------------------------------------------------------

@dataclass(frozen=True)
class RegionSet:
    """A finite union of closed intervals on the line or arcs on the circle.

    Cells are kept in canonical form: sorted, pairwise disjoint, with
    touching cells merged.  Circle arcs ``(a, b)`` have ``0 <= a < 1`` and
    ``a <= b <= a + 1``; ``(0, 1)`` is the whole circle.
    """

    space: str
    cells: tuple[Cell, ...]

    def __post_init__(self):
        if self.space not in SPACES:
            raise GeometryError(f"unknown space {self.space!r}")

    # construction
    @classmethod
    def empty(cls, space: str = LINE) -> "RegionSet":
        return cls(space, ())

    @classmethod
    def interval(cls, a, b, space: str = LINE) -> "RegionSet":
        return normalize([(a, b)], space)

    @classmethod
    def full_circle(cls) -> "RegionSet":
        return cls(CIRCLE, ((Fraction(0), Fraction(1)),))

    # queries
    def __bool__(self) -> bool:
        return bool(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def pieces(self) -> list[Cell]:
        """Cells as line intervals; circle arcs are cut at 0 into [0, 1] pieces."""
        if self.space == LINE:
            return list(self.cells)
        return _merge(c for a, b in self.cells for c in _unwrap_arc(a, b))

    def lifted(self, lo: int = -1, hi: int = 2) -> list[Cell]:
        if self.space == LINE:
            return list(self.cells)
        return _lift(self.cells, lo, hi)

    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.cells), Fraction(0))

    def contains_point(self, x) -> bool:
        x = scalar(x)
        if self.space == CIRCLE:
            x -= math.floor(x)
            return any(a <= x <= b for a, b in self.lifted())
        return any(a <= x <= b for a, b in self.cells)

    def hull(self) -> Cell:
        if not self.cells:
            raise GeometryError("empty set has no hull")
        return self.cells[0][0], max(b for _, b in self.cells)

    def is_regular(self) -> bool:
        return all(a < b for a, b in self.cells)

    def components(self) -> list["RegionSet"]:
        return [RegionSet(self.space, (c,)) for c in self.cells]

    # algebra
    def _check(self, other: "RegionSet"):
        if self.space != other.space:
            raise SpaceMismatch(f"{self.space} vs {other.space}")

    def union(self, other: "RegionSet") -> "RegionSet":
        self._check(other)
        return normalize(self.cells + other.cells, self.space)

    __or__ = union

    def intersection(self, other: "RegionSet") -> "RegionSet":
        self._check(other)
        if self.space == LINE:
            return RegionSet(LINE, tuple(_intersect(self.cells, other.cells)))
        return RegionSet(CIRCLE, _wrap(_intersect(self.pieces(), other.lifted())))

    __and__ = intersection

    def difference_closure(self, other: "RegionSet") -> "RegionSet":
        """cl(self \\ other)."""
        self._check(other)
        if self.space == LINE:
            return RegionSet(LINE, tuple(_diff_closure(self.cells, other.cells)))
        return RegionSet(CIRCLE, _wrap(_diff_closure(self.pieces(), other.lifted())))

    def interior_complement(self, bounds: Cell | None = None) -> "RegionSet":
        """The closed set X \\ Int(self); on the line it is clipped to ``bounds``."""
        if self.space == CIRCLE:
            return RegionSet.full_circle().difference_closure(self)
        if bounds is None:
            raise GeometryError("line complements need bounds")
        lo, hi = bounds
        body = [(a, b) for a, b in self.cells if a < b]
        out = []
        for g0, g1 in _open_gaps(body):
            a = lo if g0 is None else max(lo, g0)
            b = hi if g1 is None else min(hi, g1)
            if a <= b:
                out.append((a, b))
        return RegionSet(LINE, tuple(_merge(out)))

    def issubset(self, other: "RegionSet") -> bool:
        self._check(other)
        return self.intersection(other) == self

    __le__ = issubset

    def translate(self, t) -> "RegionSet":
        t = scalar(t)
        return normalize([(a + t, b + t) for a, b in self.cells], self.space)

    def __str__(self) -> str:
        if not self.cells:
            return "{}"
        return " u ".join(f"[{fmt(a)}, {fmt(b)}]" for a, b in self.cells)


def normalize(cells: Iterable, space: str = LINE) -> RegionSet:
    """Canonical RegionSet for a raw list of closed cells ``(a, b)``."""
    raw = []
    for cell in cells:
        a, b = (scalar(v) for v in cell)
        if a > b:
            raise GeometryError(f"empty cell [{fmt(a)}, {fmt(b)}]")
        raw.append((a, b))
    if space == LINE:
        return RegionSet(LINE, tuple(_merge(raw)))
    if space == CIRCLE:
        return RegionSet(CIRCLE, _wrap([c for a, b in raw for c in _unwrap_arc(a, b)]))
    raise GeometryError(f"unknown space {space!r}")


def pair_check(A: RegionSet, B: RegionSet):
    if A.space != B.space:
        raise SpaceMismatch(f"{A.space} vs {B.space}")


def subset_of_interior(A: RegionSet, B: RegionSet) -> bool:
    """True iff A lies in the topological interior of B."""
    pair_check(A, B)
    if A.space == LINE:
        return _inside_interior(A.cells, B.cells)
    return _inside_interior(A.pieces(), B.lifted())


def disjoint(A: RegionSet, B: RegionSet) -> bool:
    pair_check(A, B)
    return not A.intersection(B)


@dataclass(frozen=True)
class CompactPair:
    """A pair (N, L) with L inside N, both finite unions of nondegenerate cells."""

    N: RegionSet
    L: RegionSet
    label: str = ""

    def __post_init__(self):
        pair_check(self.N, self.L)
        if not (self.N.is_regular() and self.L.is_regular()):
            raise GeometryError(f"pair {self.label!r}: degenerate cells are not allowed")
        if not self.L.issubset(self.N):
            raise GeometryError(f"pair {self.label!r}: L is not contained in N")

    @property
    def space(self) -> str:
        return self.N.space

    def core(self) -> RegionSet:
        return pair_core(self)


def pair_core(P: CompactPair) -> RegionSet:
    """cl(N \\ L)."""
    return P.N.difference_closure(P.L)


# -- the gridded square -----------------------------------------------------

Box = tuple[int, int]


@dataclass(frozen=True)
class SquareSet:
    """A union of grid boxes [i/k, (i+1)/k] x [j/k, (j+1)/k] in X x X.

    When ``periodic`` the square is the torus (R/Z)^2 and indices live in
    range(k).
    """

    k: int
    periodic: bool
    boxes: frozenset[Box]

    def __post_init__(self):
        if self.k <= 0:
            raise GeometryError("grid step must be 1/k with k > 0")
        if self.periodic and any(not (0 <= i < self.k and 0 <= j < self.k) for i, j in self.boxes):
            object.__setattr__(self, "boxes", frozenset((i % self.k, j % self.k) for i, j in self.boxes))

    @property
    def delta(self) -> Fraction:
        return Fraction(1, self.k)

    @property
    def space(self) -> str:
        return CIRCLE if self.periodic else LINE

    def __bool__(self) -> bool:
        return bool(self.boxes)

    def __len__(self) -> int:
        return len(self.boxes)

    def __contains__(self, box) -> bool:
        return self._wrapbox(box) in self.boxes

    def _wrapbox(self, box: Box) -> Box:
        return (box[0] % self.k, box[1] % self.k) if self.periodic else box

    def with_boxes(self, boxes: Iterable[Box]) -> "SquareSet":
        return SquareSet(self.k, self.periodic, frozenset(self._wrapbox(b) for b in boxes))

    def _same_grid(self, other: "SquareSet"):
        if (self.k, self.periodic) != (other.k, other.periodic):
            raise SpaceMismatch("square sets on different grids")

    def union(self, other: "SquareSet") -> "SquareSet":
        self._same_grid(other)
        return self.with_boxes(self.boxes | other.boxes)

    def intersection(self, other: "SquareSet") -> "SquareSet":
        self._same_grid(other)
        return self.with_boxes(self.boxes & other.boxes)

    def minus(self, other: "SquareSet") -> "SquareSet":
        self._same_grid(other)
        return self.with_boxes(self.boxes - other.boxes)

    def issubset(self, other: "SquareSet") -> bool:
        self._same_grid(other)
        return self.boxes <= other.boxes

    def columns(self) -> dict[int, frozenset[int]]:
        cols: dict[int, set[int]] = {}
        for i, j in self.boxes:
            cols.setdefault(i, set()).add(j)
        return {i: frozenset(js) for i, js in cols.items()}

    def rows_to_set(self, rows: Iterable[int]) -> RegionSet:
        d = self.delta
        return normalize([(j * d, (j + 1) * d) for j in rows], self.space)

    def column_slice(self, i: int) -> RegionSet:
        i = i % self.k if self.periodic else i
        return self.rows_to_set(j for ii, j in self.boxes if ii == i)

    def slice(self, x) -> RegionSet:
        return slice_at(self, x)

    def meets_closed(self, other: "SquareSet") -> bool:
        """Closed boxes of self and other share at least one point."""
        self._same_grid(other)
        for i, j in self.boxes:
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    if self._wrapbox((i + di, j + dj)) in other.boxes:
                        return True
        return False


def _grid_index(q: Fraction, k: int) -> int:
    v = q * k
    if v.denominator != 1:
        raise GeometryError(f"{fmt(q)} is not aligned with grid step 1/{k}")
    return int(v)


def _cell_indices(a: Fraction, b: Fraction, k: int) -> list[int]:
    return list(range(_grid_index(a, k), _grid_index(b, k)))


def product(A: RegionSet, B: RegionSet, k: int) -> SquareSet:
    """A x B as a union of grid boxes at step 1/k; both factors must be grid aligned."""
    pair_check(A, B)
    periodic = A.space == CIRCLE
    rows_a = [i for a, b in A.cells for i in _cell_indices(a, b, k)]
    rows_b = [j for a, b in B.cells for j in _cell_indices(a, b, k)]
    return SquareSet(k, periodic, frozenset((i, j) for i in rows_a for j in rows_b))


def slice_at(S: SquareSet, x) -> RegionSet:
    """pi_2(({x} x X) n S)."""
    x = scalar(x)
    v = x * S.k
    if v.denominator == 1:
        cols = [int(v) - 1, int(v)]
    else:
        cols = [math.floor(v)]
    out = RegionSet.empty(S.space)
    for i in cols:
        out = out.union(S.column_slice(i))
    return out


def closed_hull_boxes(x: Cell, y: Cell, k: int) -> list[Box]:
    """Grid boxes whose closed box meets the closed rectangle x * y."""
    return [(i, j) for i in _closed_range(x, k) for j in _closed_range(y, k)]


def open_hull_boxes(x: Cell, y: Cell, k: int) -> list[Box]:
    """Grid boxes whose open interior meets the closed rectangle x * y."""
    return [(i, j) for i in _open_range(x, k) for j in _open_range(y, k)]


def _closed_range(c: Cell, k: int) -> range:
    lo, hi = c[0] * k, c[1] * k
    return range(math.ceil(lo) - 1, math.floor(hi) + 1)


def _open_range(c: Cell, k: int) -> range:
    lo, hi = c[0] * k, c[1] * k
    if lo == hi:
        # a degenerate side only meets interiors when it is off the grid
        if lo.denominator == 1:
            return range(0)
        return range(math.floor(lo), math.floor(lo) + 1)
    return range(math.floor(lo), math.ceil(hi))
