"""Continuous piecewise-linear maps with rational data, and their product maps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import (
    CIRCLE,
    LINE,
    Cell,
    GeometryError,
    RegionSet,
    SquareSet,
    closed_hull_boxes,
    fmt,
    normalize,
    open_hull_boxes,
    scalar,
)


class MapError(ValueError):
    pass


@dataclass(frozen=True)
class Piece:
    """x -> slope * x + offset on [left, right] (lift coordinates on the circle)."""

    left: Fraction
    right: Fraction
    slope: Fraction
    offset: Fraction

    def __call__(self, x: Fraction) -> Fraction:
        return self.slope * x + self.offset

    def image(self) -> Cell:
        u, v = self(self.left), self(self.right)
        return (u, v) if u <= v else (v, u)

    def solve(self, y: Fraction) -> Fraction:
        return (y - self.offset) / self.slope

    def restrict(self, a: Fraction, b: Fraction) -> "Piece":
        return Piece(max(a, self.left), min(b, self.right), self.slope, self.offset)

    def shifted(self, k: int, degree: int) -> "Piece":
        # the piece translated by k fundamental domains of a degree-d lift
        return Piece(self.left + k, self.right + k, self.slope, self.offset + k * degree - self.slope * k)


class PLMap:
    """A continuous piecewise-affine map given by the vertices of its graph.

    On the line the domain is ``[x_0, x_n]``.  On the circle the vertices
    describe a lift ``F`` on ``[0, 1]``; the degree is ``F(1) - F(0)`` and
    ``F(x + 1) = F(x) + degree``.
    """

    def __init__(self, vertices: Sequence, space: str = LINE, name: str = ""):
        pts = [(scalar(x), scalar(y)) for x, y in vertices]
        if len(pts) < 2:
            raise MapError("a PL map needs at least two vertices")
        if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
            raise MapError("vertex abscissae must be strictly increasing")
        if space not in (LINE, CIRCLE):
            raise MapError(f"unknown space {space!r}")
        self.space = space
        self.name = name
        self.vertices: tuple[tuple[Fraction, Fraction], ...] = tuple(pts)
        self.pieces: tuple[Piece, ...] = tuple(_piece(a, b) for a, b in zip(pts, pts[1:]))
        for p in self.pieces:
            if p.slope == 0:
                raise MapError(f"constant piece on [{fmt(p.left)}, {fmt(p.right)}]")
        if space == CIRCLE:
            if pts[0][0] != 0 or pts[-1][0] != 1:
                raise MapError("a circle lift must be given on [0, 1]")
            d = pts[-1][1] - pts[0][1]
            if d.denominator != 1:
                raise MapError("lift does not close up: F(1) - F(0) is not an integer")
            self.degree = int(d)
        else:
            self.degree = None

    @classmethod
    def from_pieces(cls, breakpoints: Sequence, rules: Sequence, space: str = LINE, name: str = "") -> "PLMap":
        """Build from breakpoints b_0 < ... < b_n and affine rules (m_i, c_i) on [b_i, b_{i+1}]."""
        bps = [scalar(b) for b in breakpoints]
        rules = [(scalar(m), scalar(c)) for m, c in rules]
        if len(rules) != len(bps) - 1:
            raise MapError("need exactly one rule per piece")
        for i in range(1, len(bps) - 1):
            left = rules[i - 1][0] * bps[i] + rules[i - 1][1]
            right = rules[i][0] * bps[i] + rules[i][1]
            if left != right:
                raise MapError(f"discontinuity at {fmt(bps[i])}: {fmt(left)} != {fmt(right)}")
        verts = [(b, rules[0][0] * b + rules[0][1]) for b in bps[:1]]
        verts += [(b, m * b + c) for b, (m, c) in zip(bps[1:], rules)]
        return cls(verts, space, name)

    # -- evaluation --------------------------------------------------------
    @property
    def domain(self) -> RegionSet:
        if self.space == CIRCLE:
            return RegionSet.full_circle()
        return RegionSet(LINE, ((self.vertices[0][0], self.vertices[-1][0]),))

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        return tuple(x for x, _ in self.vertices)

    def lift(self, x) -> Fraction:
        x = scalar(x)
        if self.space == CIRCLE:
            k = math.floor(x)
            return self._eval(x - k) + k * self.degree
        lo, hi = self.vertices[0][0], self.vertices[-1][0]
        if not lo <= x <= hi:
            raise MapError(f"{fmt(x)} is outside the domain [{fmt(lo)}, {fmt(hi)}]")
        return self._eval(x)

    def __call__(self, x) -> Fraction:
        y = self.lift(x)
        return y - math.floor(y) if self.space == CIRCLE else y

    def _eval(self, x: Fraction) -> Fraction:
        for p in self.pieces:
            if p.left <= x <= p.right:
                return p(x)
        raise MapError(f"{fmt(x)} not covered")

    def pieces_over(self, a: Fraction, b: Fraction) -> list[Piece]:
        """Affine pieces restricted to [a, b]; lift coordinates on the circle."""
        if self.space == LINE:
            lo, hi = self.vertices[0][0], self.vertices[-1][0]
            if a < lo or b > hi:
                raise MapError(f"[{fmt(a)}, {fmt(b)}] escapes the domain [{fmt(lo)}, {fmt(hi)}]")
            src: Iterable[Piece] = self.pieces
        else:
            src = (p.shifted(k, self.degree) for k in range(math.floor(a), math.floor(b) + 1) for p in self.pieces)
        out = []
        for p in src:
            if p.right < a or p.left > b:
                continue
            q = p.restrict(a, b)
            if q.left < q.right or a == b:
                out.append(q)
                if a == b:
                    break
        return out

    # -- set maps ----------------------------------------------------------
    def image(self, A: RegionSet) -> RegionSet:
        """The exact set f(A)."""
        if A.space != self.space:
            raise GeometryError(f"map on {self.space}, set on {A.space}")
        cells = [p.image() for a, b in A.cells for p in self.pieces_over(a, b)]
        return normalize(cells, self.space)

    def preimage(self, B: RegionSet) -> RegionSet:
        """The exact set f^{-1}(B), intersected with the domain."""
        if B.space != self.space:
            raise GeometryError(f"map on {self.space}, set on {B.space}")
        if not B:
            return RegionSet.empty(self.space)
        cells = []
        for p in self.pieces:
            u, v = p.image()
            if self.space == CIRCLE:
                targets = B.lifted(math.floor(u) - 1, math.ceil(v) + 1)
            else:
                targets = B.cells
            for c, d in targets:
                lo, hi = max(u, c), min(v, d)
                if lo <= hi:
                    x0, x1 = p.solve(lo), p.solve(hi)
                    cells.append((min(x0, x1), max(x0, x1)))
        return normalize(cells, self.space)

    def monotone_branches(self, a, b) -> list[tuple[Cell, int]]:
        """Maximal monotone subintervals of [a, b] with the sign of the slope."""
        out: list[list] = []
        for p in self.pieces_over(scalar(a), scalar(b)):
            s = 1 if p.slope > 0 else -1
            if out and out[-1][1] == s and out[-1][0][1] == p.left:
                out[-1][0] = (out[-1][0][0], p.right)
            else:
                out.append([(p.left, p.right), s])
        return [(tuple(c), s) for c, s in out]

    # -- algebra -----------------------------------------------------------
    def compose(self, inner: "PLMap") -> "PLMap":
        """self o inner."""
        if self.space != inner.space:
            raise MapError("cannot compose maps on different spaces")
        if self.space == CIRCLE:
            xs = set(inner.breakpoints)
            for p in inner.pieces:
                u, v = p.image()
                for k in range(math.floor(u), math.ceil(v) + 1):
                    for b in self.breakpoints:
                        y = b + k
                        if u <= y <= v:
                            xs.add(p.solve(y))
            xs = sorted(x for x in xs if 0 <= x <= 1)
            return PLMap([(x, self.lift(inner.lift(x))) for x in xs], CIRCLE, _cname(self, inner))
        dom = inner.preimage(self.domain)
        if len(dom.cells) != 1:
            raise MapError("composite domain is not an interval")
        a, b = dom.cells[0]
        xs = {a, b}
        for p in inner.pieces_over(a, b):
            xs.update((p.left, p.right))
            u, v = p.image()
            for y in self.breakpoints:
                if u <= y <= v:
                    xs.add(p.solve(y))
        xs = sorted(xs)
        return PLMap([(x, self.lift(inner.lift(x))) for x in xs], LINE, _cname(self, inner))

    def iterate(self, n: int) -> "PLMap":
        if n < 1:
            raise MapError("iterate needs n >= 1")
        g = self
        for _ in range(n - 1):
            g = self.compose(g)
        return g

    def iterate_pieces(self, n: int) -> list[Piece]:
        """Affine pieces of f^n on its natural domain (lift coordinates, x in [0, 1] on the circle).

        Unlike :meth:`iterate` this does not need the domain of f^n to be
        an interval.
        """
        if n < 1:
            raise MapError("iterate needs n >= 1")
        out = list(self.pieces)
        for _ in range(n - 1):
            nxt = []
            for p in out:
                u, v = p.image()
                if self.space == LINE:
                    lo, hi = self.vertices[0][0], self.vertices[-1][0]
                    u, v = max(u, lo), min(v, hi)
                    if u >= v:
                        continue
                for q in self.pieces_over(u, v):
                    x0, x1 = sorted((p.solve(q.left), p.solve(q.right)))
                    if x0 < x1:
                        nxt.append(Piece(x0, x1, q.slope * p.slope, q.slope * p.offset + q.offset))
            out = sorted(nxt, key=lambda p: p.left)
        return out

    def periodic_points(self, n: int) -> list[Fraction]:
        """All solutions of f^n(x) = x, solved exactly piece by piece."""
        sols: set[Fraction] = set()
        for p in self.iterate_pieces(n):
            if p.slope == 1:
                hit = p.offset == 0 if self.space == LINE else p.offset.denominator == 1
                if hit:
                    raise MapError(f"f^{n} fixes an interval; periodic points are not isolated")
                continue
            if self.space == LINE:
                ks = [0]
            else:
                # F(x) - x = j has solutions for the integers j between the end values
                e = sorted((p(p.left) - p.left, p(p.right) - p.right))
                ks = range(math.ceil(e[0]), math.floor(e[1]) + 1)
            for j in ks:
                x = (p.offset - j) / (1 - p.slope)
                if p.left <= x <= p.right:
                    sols.add(x - math.floor(x) if self.space == CIRCLE else x)
        return sorted(sols)

    def __eq__(self, other) -> bool:
        return isinstance(other, PLMap) and (self.space, self.vertices) == (other.space, other.vertices)

    def __hash__(self) -> int:
        return hash((self.space, self.vertices))

    def __repr__(self) -> str:
        label = self.name or "PLMap"
        return f"<{label} {self.space} with {len(self.pieces)} pieces>"


def _piece(a, b) -> Piece:
    (x0, y0), (x1, y1) = a, b
    m = (y1 - y0) / (x1 - x0)
    return Piece(x0, x1, m, y0 - m * x0)


def _cname(outer: PLMap, inner: PLMap) -> str:
    return f"{outer.name or 'f'}o{inner.name or 'f'}"


@dataclass(frozen=True)
class ProductMap:
    """(x, y) -> (f(x), f(y)) acting on gridded square sets."""

    factor: PLMap

    def box_rects(self, box: tuple[int, int], k: int) -> list[tuple[Piece, Piece]]:
        """Affine sub-rectangles of a grid box (the box is split at breakpoints)."""
        i, j = box
        d = Fraction(1, k)
        xs = self.factor.pieces_over(i * d, (i + 1) * d)
        ys = self.factor.pieces_over(j * d, (j + 1) * d)
        return [(px, py) for px in xs for py in ys]

    def box_image(self, A: SquareSet, closed: bool = False) -> SquareSet:
        """Grid-aligned outer enclosure of (f x f)(A).

        By default a box is included when its interior meets the exact
        image.  With ``closed=True`` every box touching the image is
        included, which is what interior-containment checks need.
        """
        hull = closed_hull_boxes if closed else open_hull_boxes
        out = set()
        for box in A.boxes:
            for px, py in self.box_rects(box, A.k):
                out.update(hull(px.image(), py.image(), A.k))
        return A.with_boxes(out)

    def __call__(self, x, y) -> tuple[Fraction, Fraction]:
        return self.factor(x), self.factor(y)


def box_image(F: ProductMap, A: SquareSet, delta=None) -> SquareSet:
    if delta is not None and scalar(delta) != A.delta:
        raise GeometryError("grid step does not match the square set")
    return F.box_image(A)
