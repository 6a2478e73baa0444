"""Index systems from an index pair of f x f near the diagonal.

The pipeline: a gridded pair (N, L) in X x X, optionally produced by the
diagonal-strip template, is re-verified exactly, cut into vertical slabs,
and the finitely many distinct cross-sections become the pairs of an
index system whose edges follow the slab dynamics.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .dynamics import PLMap, ProductMap
from .geometry import (
    CIRCLE,
    Box,
    CompactPair,
    GeometryError,
    RegionSet,
    SquareSet,
    closed_hull_boxes,
    fmt,
    scalar,
)
from .index_core import IndexSystem, Status, check_precedes, verify

log = logging.getLogger(__name__)

MAX_GROWTH_ROUNDS = 256


class RefineDelta(RuntimeError):
    """The grid is too coarse for the margins of the pair; retry with ``suggested``."""

    def __init__(self, message: str, delta: Fraction):
        super().__init__(message)
        self.delta = delta
        self.suggested = delta / 3


class ConstructionError(RuntimeError):
    pass


@dataclass(frozen=True)
class ProductIndexPair:
    N: SquareSet
    L: SquareSet
    factor: PLMap

    @property
    def core(self) -> SquareSet:
        return self.N.minus(self.L)

    @property
    def k(self) -> int:
        return self.N.k


@dataclass
class ProductCheck:
    exit_ok: bool
    image_ok: bool
    isolation_ok: bool
    witnesses: dict[str, list[Box]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.exit_ok and self.image_ok and self.isolation_ok


@dataclass
class SliceFamily:
    slices: dict[str, CompactPair]
    slabs: dict[int, str]
    multiplicity: dict[str, int]
    empty_core: list[str]


@dataclass
class Assembly:
    system: IndexSystem
    derived_edges: set[tuple[str, str]]
    rejected_edges: set[tuple[str, str]]
    dropped: list[str]


# -- exact checks on the square --------------------------------------------------

def _closed_image(F: ProductMap, box: Box, k: int) -> set[Box]:
    out = set()
    for px, py in F.box_rects(box, k):
        out.update(closed_hull_boxes(px.image(), py.image(), k))
    return out


def check_product_pair(P: ProductIndexPair) -> ProductCheck:
    """Index-pair conditions for f x f, decided exactly on grid boxes.

    (a) the image of the core lies in Int N; (b) the image of L misses the
    core; (c) core n F^{-1}(core) lies in Int(core).  A closed rectangle is
    inside the interior of a box union iff every box touching it belongs
    to the union, which turns each condition into box bookkeeping.
    """
    F = ProductMap(P.factor)
    k = P.k
    core = P.core
    wrap = core._wrapbox
    w: dict[str, list[Box]] = {"exit": [], "image": [], "isolation": []}
    for box in sorted(core.boxes):
        if any(wrap(b) not in P.N.boxes for b in _closed_image(F, box, k)):
            w["exit"].append(box)
    for box in sorted(P.L.boxes):
        if any(wrap(b) in core.boxes for b in _closed_image(F, box, k)):
            w["image"].append(box)
    d = Fraction(1, k)
    for box in sorted(core.boxes):
        for px, py in F.box_rects(box, k):
            rx, ry = px.image(), py.image()
            for ci, cj in closed_hull_boxes(rx, ry, k):
                if wrap((ci, cj)) not in core.boxes:
                    continue
                xs = _pull(px, max(rx[0], ci * d), min(rx[1], (ci + 1) * d))
                ys = _pull(py, max(ry[0], cj * d), min(ry[1], (cj + 1) * d))
                if any(wrap(b) not in core.boxes for b in closed_hull_boxes(xs, ys, k)):
                    w["isolation"].append(box)
                    break
            else:
                continue
            break
    return ProductCheck(not w["exit"], not w["image"], not w["isolation"], w)


def _pull(p, lo: Fraction, hi: Fraction):
    a, b = p.solve(lo), p.solve(hi)
    return (min(a, b), max(a, b))


# -- template ----------------------------------------------------------------------

def _grid_k(delta) -> int:
    d = scalar(delta)
    if d <= 0 or d.numerator != 1:
        raise GeometryError(f"grid step must be 1/k, got {fmt(d)}")
    return d.denominator


def _span_cells(f: PLMap, k: int, span) -> range:
    if f.space == CIRCLE:
        return range(k)
    lo, hi = (scalar(v) for v in span) if span is not None else f.domain.hull()
    a, b = math.ceil(lo * k), math.floor(hi * k)
    if a >= b:
        raise GeometryError("span holds no grid cell")
    return range(a, b)


def _offset(i: int, j: int, k: int, periodic: bool) -> int:
    d = abs(i - j)
    return min(d, k - d) if periodic else d


def combinatorial_invariant(F: ProductMap, S: SquareSet) -> SquareSet:
    """Largest subset of S in which every box has a successor and a predecessor."""
    succ = {b: {c for c in F.box_image(S.with_boxes([b])).boxes if c in S.boxes} for b in S.boxes}
    pred: dict[Box, set[Box]] = {b: set() for b in S.boxes}
    for b, cs in succ.items():
        for c in cs:
            pred[c].add(b)
    alive = set(S.boxes)
    queue = [b for b in alive if not succ[b] or not pred[b]]
    out_deg = {b: len(succ[b]) for b in alive}
    in_deg = {b: len(pred[b]) for b in alive}
    while queue:
        b = queue.pop()
        if b not in alive:
            continue
        alive.discard(b)
        for c in succ[b]:
            if c in alive:
                in_deg[c] -= 1
                if in_deg[c] == 0:
                    queue.append(c)
        for a in pred[b]:
            if a in alive:
                out_deg[a] -= 1
                if out_deg[a] == 0:
                    queue.append(a)
    return S.with_boxes(alive)


def strip_template(f: PLMap, w, c, delta, span=None) -> ProductIndexPair:
    """Index pair for f x f grown from a diagonal strip.

    The strip {|x - y| < w}, gridded at step ``delta``, is a candidate
    isolating neighbourhood.  Its combinatorial invariant part seeds the
    core; boxes that the exact image of the core touches form L, and any
    L box whose image comes back to the core is absorbed into the core.
    The core may not grow more than ``c`` beyond the seed.  The result is
    re-verified exactly; failures ask for a finer grid.
    """
    k = _grid_k(delta)
    d = Fraction(1, k)
    w, c = scalar(w), scalar(c)
    if w <= 0 or c <= 0:
        raise GeometryError("strip width and collar must be positive")
    periodic = f.space == CIRCLE
    cells = _span_cells(f, k, span)
    F = ProductMap(f)
    S = SquareSet(k, periodic, frozenset(
        (i, j) for i in cells for j in cells if _offset(i, j, k, periodic) < w * k + 1))
    K = combinatorial_invariant(F, S)
    if not K:
        raise RefineDelta(f"strip holds no invariant boxes at delta={fmt(d)}", d)
    reach = math.ceil(c * k)
    collar = K.with_boxes((i + a, j + b) for i, j in K.boxes
                          for a in range(-reach, reach + 1) for b in range(-reach, reach + 1))
    inside = set(cells)
    core = set(K.boxes)
    for _ in range(MAX_GROWTH_ROUNDS):
        img = set()
        for box in core:
            img |= {K._wrapbox(b) for b in _closed_image(F, box, k)}
        L = img - core
        if not periodic and any(i not in inside or j not in inside for i, j in img):
            raise RefineDelta(f"pair leaves the span of the map at delta={fmt(d)}", d)
        back = {b for b in L if any(K._wrapbox(x) in core for x in _closed_image(F, b, k))}
        if not back:
            break
        if not back <= collar.boxes:
            raise RefineDelta(f"core escapes the collar at delta={fmt(d)}", d)
        core |= back
    else:
        raise RefineDelta("core growth did not settle", d)
    N = K.with_boxes(core | img)
    P = ProductIndexPair(N, N.minus(K.with_boxes(core)), f)
    chk = check_product_pair(P)
    if not chk.ok:
        bad = [name for name, boxes in chk.witnesses.items() if boxes]
        raise RefineDelta(f"template pair fails {', '.join(bad)} at delta={fmt(d)}", d)
    return P


# -- discretize, slice, assemble -----------------------------------------------------

def discretize(P: ProductIndexPair, delta) -> ProductIndexPair:
    """Coarsen a gridded pair to step ``delta`` (boxes whose interior meets N or L).

    ``delta`` must be a multiple of the pair's grid step.  The coarse
    pair is re-verified; a failure raises :class:`RefineDelta`.
    """
    k = _grid_k(delta)
    if P.k % k:
        raise GeometryError(f"grid 1/{P.k} does not refine 1/{k}")
    r = P.k // k
    N = SquareSet(k, P.N.periodic, frozenset((i // r, j // r) for i, j in P.N.boxes))
    L = SquareSet(k, P.N.periodic, frozenset((i // r, j // r) for i, j in P.L.boxes))
    Q = ProductIndexPair(N, L, P.factor)
    chk = check_product_pair(Q)
    if not chk.ok:
        bad = [name for name, boxes in chk.witnesses.items() if boxes]
        raise RefineDelta(f"discretized pair fails {', '.join(bad)} at delta={fmt(scalar(delta))}", scalar(delta))
    return Q


def slice_system(P: ProductIndexPair) -> SliceFamily:
    """Constant cross-sections over each open grid slab, deduplicated."""
    slices: dict[str, CompactPair] = {}
    seen: dict[tuple[RegionSet, RegionSet], str] = {}
    slabs: dict[int, str] = {}
    mult: dict[str, int] = {}
    ncols, lcols = P.N.columns(), P.L.columns()
    for i in sorted(ncols):
        N = P.N.rows_to_set(ncols[i])
        L = P.N.rows_to_set(lcols.get(i, ()))
        key = (N, L)
        if key not in seen:
            lab = str(len(seen))
            seen[key] = lab
            slices[lab] = CompactPair(N, L, lab)
        lab = seen[key]
        slabs[i] = lab
        mult[lab] = mult.get(lab, 0) + 1
    empty = [lab for lab, p in slices.items() if not p.core()]
    return SliceFamily(slices, slabs, mult, empty)


def _slab_targets(f: PLMap, i: int, k: int) -> set[int]:
    d = Fraction(1, k)
    out = set()
    for p in f.pieces_over(i * d, (i + 1) * d):
        u, v = p.image()
        out.update(range(math.floor(u * k), math.ceil(v * k)))
    return {t % k for t in out} if f.space == CIRCLE else out


def assemble(P: ProductIndexPair, family: SliceFamily, f: PLMap) -> Assembly:
    """Index system on the distinct slices, edges from slab dynamics filtered by precedes."""
    k = P.k
    derived: set[tuple[str, str]] = set()
    for i, a in family.slabs.items():
        for t in _slab_targets(f, i, k):
            b = family.slabs.get(t)
            if b is not None:
                derived.add((a, b))
    edges, rejected = set(), set()
    for a, b in derived:
        if check_precedes(family.slices[a], family.slices[b], f).ok:
            edges.add((a, b))
        else:
            rejected.add((a, b))
    labels = set(family.slices)
    dropped = []
    while True:
        dead = [a for a in labels if not any(e[0] == a and e[1] in labels for e in edges)]
        if not dead:
            break
        for a in dead:
            if family.slices[a].core():
                raise ConstructionError(f"slice {a} has a nonempty core but precedes nothing")
            labels.discard(a)
            dropped.append(a)
    pairs = {a: family.slices[a] for a in labels}
    S = IndexSystem(pairs, frozenset(e for e in edges if e[0] in labels and e[1] in labels))
    report = verify(S, f)
    if report.status is not Status.VERIFIED:
        raise ConstructionError("assembled system does not verify:\n" + report.render())
    return Assembly(S, derived, rejected, sorted(dropped, key=int))


def construct(f: PLMap, delta, w=None, c=None, pair: ProductIndexPair | None = None, span=None) -> tuple[Assembly, SliceFamily, ProductIndexPair]:
    """Run the whole pipeline from a template or a user pair."""
    if pair is None:
        if w is None or c is None:
            raise ValueError("need either a product pair or template parameters")
        pair = strip_template(f, w, c, delta, span)
    pair = discretize(pair, delta)
    family = slice_system(pair)
    return assemble(pair, family, f), family, pair
