"""Rational homology of 1-D pointed pairs and induced maps by degree counting.

For an interval pair (N, L) the pointed space N/L is a wedge of circles
plus some free components.  A component C of cl(N \\ L) with both ends in
L closes up into a circle (a degree-1 generator, oriented by increasing
coordinate); a component with neither end in L is a free point class
(a reduced degree-0 generator); one end in L makes C contractible onto
the basepoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .dynamics import PLMap
from .geometry import CIRCLE, Cell, CompactPair, RegionSet, pair_core
from .index_core import check_precedes

Matrix = tuple[tuple[Fraction, ...], ...]


class HomologyError(ValueError):
    pass


class Undecided(HomologyError):
    """A branch image touches a component boundary; refine the pair."""


# -- small exact matrix helpers ----------------------------------------------

def matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in r) for r in rows)


def zeros(n_rows: int, n_cols: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(n_cols)) for _ in range(n_rows))


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def shape(M: Matrix, n_cols: int | None = None) -> tuple[int, int]:
    return len(M), (len(M[0]) if M else (n_cols or 0))


def matmul(A: Matrix, B: Matrix, inner: int | None = None) -> Matrix:
    """A @ B.  ``inner`` gives the shared dimension when A has no rows."""
    cols = len(B[0]) if B else 0
    return tuple(
        tuple(sum((a * B[k][j] for k, a in enumerate(row)), Fraction(0)) for j in range(cols))
        for row in A
    )


def is_zero(M: Matrix) -> bool:
    return all(x == 0 for row in M for x in row)


def mpow(M: Matrix, n: int) -> Matrix:
    out = identity(len(M))
    for _ in range(n):
        out = matmul(M, out)
    return out


def scale_normal(M: Matrix) -> Matrix:
    """M divided by its first nonzero entry (zero stays zero)."""
    for row in M:
        for x in row:
            if x != 0:
                return tuple(tuple(y / x for y in r) for r in M)
    return M


# -- graded spaces -------------------------------------------------------------

@dataclass(frozen=True)
class GradedSpace:
    dims: tuple[int, ...]

    def dim(self, k: int) -> int:
        return self.dims[k] if k < len(self.dims) else 0

    @property
    def is_zero(self) -> bool:
        return not any(self.dims)

    def __str__(self) -> str:
        return "[" + ", ".join(map(str, self.dims)) + "]"


@dataclass(frozen=True)
class PairHomology:
    space: GradedSpace
    h0_basis: tuple[Cell, ...]
    h1_basis: tuple[Cell, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return self.space.dims


@dataclass(frozen=True)
class InducedMap:
    source: str
    target: str
    matrices: tuple[Matrix, Matrix]

    def degree(self, k: int) -> Matrix:
        return self.matrices[k]


def _ends_in_L(P: CompactPair, c: Cell) -> tuple[bool, bool]:
    return P.L.contains_point(c[0]), P.L.contains_point(c[1])


def pair_homology(P: CompactPair) -> PairHomology:
    if not (P.N.is_regular() and P.L.is_regular()):
        raise HomologyError("pair is not closed-regular")
    core = pair_core(P)
    h0, h1 = [], []
    for c in core.cells:
        if P.space == CIRCLE and c == (0, 1):
            # the whole circle: one loop, not attached to the basepoint
            h0.append(c)
            h1.append(c)
            continue
        lo_in, hi_in = _ends_in_L(P, c)
        if lo_in and hi_in:
            h1.append(c)
        elif not lo_in and not hi_in:
            h0.append(c)
    return PairHomology(GradedSpace((len(h0), len(h1))), tuple(h0), tuple(h1))


def degree_count(image: Cell, orientation: int, component: Cell) -> int:
    """Signed crossing number of one monotone branch over one target component.

    ``image`` is the exact branch image; +orientation when it passes
    over the whole component, 0 when it stays on one side or only
    dips in and back out.
    """
    u, v = image
    d0, d1 = component
    if u in (d0, d1) or v in (d0, d1):
        raise Undecided(f"branch image [{u}, {v}] touches component boundary [{d0}, {d1}]")
    if u < d0 and v > d1:
        return orientation
    return 0


def _translates(component: Cell, image: Cell, periodic: bool) -> list[Cell]:
    if not periodic:
        return [component]
    d0, d1 = component
    u, v = image
    return [(d0 + k, d1 + k) for k in range(math.floor(u - d1) - 1, math.ceil(v - d0) + 2)]


def degree_matrix(g: PLMap, Pa: CompactPair, Pb: CompactPair) -> InducedMap:
    """Degree-counting matrices of g: N_a/L_a -> N_b/L_b in degrees 0 and 1.

    Only needs the ends of each source loop to land outside the target
    core; :func:`induced_map` adds the full precedes check.
    """
    ha, hb = pair_homology(Pa), pair_homology(Pb)
    core_b = pair_core(Pb)
    periodic = g.space == CIRCLE
    m1 = [[Fraction(0)] * len(ha.h1_basis) for _ in hb.h1_basis]
    for i, (a0, a1) in enumerate(ha.h1_basis):
        if a1 - a0 >= 1:
            raise HomologyError("whole-circle cores are outside the degree-counting setting")
        for end in (a0, a1):
            if core_b.contains_point(g(end)):
                raise HomologyError(f"loop end {end} of {Pa.label} lands in the core of {Pb.label}")
        for (x0, x1), s in g.monotone_branches(a0, a1):
            y0, y1 = g.lift(x0), g.lift(x1)
            img = (min(y0, y1), max(y0, y1))
            for j, comp in enumerate(hb.h1_basis):
                for t in _translates(comp, img, periodic):
                    m1[j][i] += degree_count(img, s, t)
    m0 = [[Fraction(0)] * len(ha.h0_basis) for _ in hb.h0_basis]
    for i, c in enumerate(ha.h0_basis):
        img = g.image(RegionSet(Pa.space, (c,)))
        for j, d in enumerate(hb.h0_basis):
            if img.issubset(RegionSet(Pb.space, (d,))):
                m0[j][i] = Fraction(1)
    return InducedMap(Pa.label, Pb.label, (tuple(map(tuple, m0)), tuple(map(tuple, m1))))


def induced_map(Pa: CompactPair, Pb: CompactPair, f: PLMap) -> InducedMap:
    chk = check_precedes(Pa, Pb, f)
    if not chk.ok:
        raise HomologyError(f"{Pa.label} does not precede {Pb.label}")
    return degree_matrix(f, Pa, Pb)
