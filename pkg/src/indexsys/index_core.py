"""Verification of index systems: the precedes relation and chain isolation."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .dynamics import PLMap
from .geometry import (
    LINE,
    CompactPair,
    RegionSet,
    disjoint,
    pair_core,
    subset_of_interior,
)

DEFAULT_STEP_CAP = 64


class IndexSystemError(ValueError):
    """Structural problems with an index system (dangling labels, dead ends)."""


class Status(enum.Enum):
    VERIFIED = "VERIFIED"
    FAILED = "FAILED"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class IndexSystem:
    pairs: Mapping[str, CompactPair]
    edges: frozenset[tuple[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset((str(a), str(b)) for a, b in self.edges))
        for a, b in self.edges:
            for lab in (a, b):
                if lab not in self.pairs:
                    raise IndexSystemError(f"edge ({a}, {b}) names unknown label {lab!r}")
        spaces = {p.space for p in self.pairs.values()}
        if len(spaces) > 1:
            raise IndexSystemError("pairs live in different spaces")

    @property
    def labels(self) -> list[str]:
        return sorted(self.pairs, key=_label_key)

    @property
    def space(self) -> str:
        return next(iter(self.pairs.values())).space if self.pairs else LINE

    def successors(self, a: str) -> list[str]:
        return sorted((b for x, b in self.edges if x == a), key=_label_key)

    def predecessors(self, b: str) -> list[str]:
        return sorted((a for a, y in self.edges if y == b), key=_label_key)

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges, key=lambda e: (_label_key(e[0]), _label_key(e[1])))

    def cores(self) -> dict[str, RegionSet]:
        return {a: pair_core(p) for a, p in self.pairs.items()}

    def allowable(self, word: Sequence[str]) -> bool:
        return all((a, b) in self.edges for a, b in zip(word, word[1:]))


def _label_key(label: str):
    return (0, int(label), "") if label.lstrip("-").isdigit() else (1, 0, label)


@dataclass
class EdgeCheck:
    source: str
    target: str
    exit_ok: bool
    exit_witness: RegionSet
    image_ok: bool
    image_witness: RegionSet

    @property
    def ok(self) -> bool:
        return self.exit_ok and self.image_ok


@dataclass
class ChainCheck:
    source: str
    target: str
    ok: bool
    witness: RegionSet


@dataclass
class VerificationReport:
    status: Status
    edge_checks: list[EdgeCheck] = field(default_factory=list)
    chain_checks: list[ChainCheck] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    degenerate: list[str] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.status is Status.VERIFIED

    def render(self) -> str:
        lines = [f"status: {self.status.value}"]
        for e in self.edge_checks:
            mark = "ok" if e.ok else "FAIL"
            lines.append(f"  precedes {e.source} -> {e.target}: {mark}")
            if not e.exit_ok:
                lines.append(f"    exit witness: {e.exit_witness}")
            if not e.image_ok:
                lines.append(f"    image witness: {e.image_witness}")
        for c in self.chain_checks:
            lines.append(f"  chain {c.source} -> {c.target}: {'ok' if c.ok else 'not isolated'}")
            if not c.ok:
                lines.append(f"    boundary witness: {c.witness}")
        for lab in self.degenerate:
            lines.append(f"  note: pair {lab} has an empty core")
        for msg in self.failures:
            lines.append(f"  failure: {msg}")
        return "\n".join(lines)


def _bounds_for(f: PLMap, A: RegionSet) -> tuple[Fraction, Fraction]:
    img = f.image(A)
    lo, hi = img.hull()
    return lo - 1, hi + 1


def exit_set(P: CompactPair, N_b: RegionSet, f: PLMap) -> RegionSet:
    """{x in N_a : f(x) not in Int N_b}, as a closed set."""
    if not P.N:
        return P.N
    outside = N_b.interior_complement(_bounds_for(f, P.N) if N_b.space == LINE else None)
    return P.N.intersection(f.preimage(outside))


def check_precedes(Pa: CompactPair, Pb: CompactPair, f: PLMap) -> EdgeCheck:
    """The two precedes conditions for the edge a -> b.

    The exit condition (L_a is a neighbourhood of the exit set in N_a) is decided through
    the equivalent form f(cl(N_a \\ L_a)) inside Int N_b.  The witness is the
    part of the core that lands outside Int N_b.
    """
    core_a, core_b = pair_core(Pa), pair_core(Pb)
    exit_ok = subset_of_interior(f.image(core_a), Pb.N)
    exit_w = RegionSet.empty(Pa.space) if exit_ok else exit_set(Pa, Pb.N, f).intersection(core_a)
    hit = f.image(Pa.L).intersection(core_b)
    return EdgeCheck(Pa.label, Pb.label, exit_ok, exit_w, not hit, hit)


def check_chain_edge(Ia: RegionSet, Ib: RegionSet, f: PLMap) -> tuple[bool, RegionSet]:
    """I_a n f^{-1}(I_b) inside Int(I_a); returns the offending part on failure."""
    part = Ia.intersection(f.preimage(Ib))
    if subset_of_interior(part, Ia):
        return True, RegionSet.empty(Ia.space)
    boundary = [c for c in part.cells if not subset_of_interior(RegionSet(Ia.space, (c,)), Ia)]
    return False, RegionSet(Ia.space, tuple(boundary))


def check_chain_isolation(S: IndexSystem, f: PLMap) -> tuple[bool, list[ChainCheck]]:
    """Sufficient per-edge test for the isolating-neighbourhood-chain condition.

    A False answer does not refute the condition; it only means this
    criterion could not establish it.
    """
    cores = S.cores()
    checks = []
    for a, b in S.sorted_edges():
        ok, w = check_chain_edge(cores[a], cores[b], f)
        checks.append(ChainCheck(a, b, ok, w))
    return all(c.ok for c in checks), checks


def verify(S: IndexSystem, f: PLMap) -> VerificationReport:
    report = VerificationReport(Status.VERIFIED)
    for a in S.labels:
        if not S.successors(a):
            report.failures.append(f"pair {a} precedes nothing")
        if not pair_core(S.pairs[a]):
            report.degenerate.append(a)
    for a, b in S.sorted_edges():
        chk = check_precedes(S.pairs[a], S.pairs[b], f)
        report.edge_checks.append(chk)
        if not chk.ok:
            report.failures.append(f"edge {a} -> {b} does not satisfy precedes")
    if report.failures:
        report.status = Status.FAILED
        return report
    ok, report.chain_checks = check_chain_isolation(S, f)
    if not ok:
        report.status = Status.UNDECIDED
    return report


def inv_m(S: IndexSystem, f: PLMap, m: int, step_cap: int = DEFAULT_STEP_CAP) -> dict[str, RegionSet]:
    """Inv^m at each label: points of I_a with a forward and a backward
    allowable orbit segment of length m.

    Forward and backward conditions are independent once the label at
    time 0 is fixed, so the per-label sets are exact.  Iteration stops
    early once both refinements stabilise.
    """
    cores = S.cores()
    fwd = dict(cores)
    bwd = dict(cores)
    for _ in range(min(m, step_cap)):
        new_fwd = {}
        new_bwd = {}
        for a in S.labels:
            reach = RegionSet.empty(S.space)
            for b in S.successors(a):
                reach = reach.union(f.preimage(fwd[b]))
            new_fwd[a] = cores[a].intersection(reach)
            came = RegionSet.empty(S.space)
            for b in S.predecessors(a):
                came = came.union(f.image(bwd[b]))
            new_bwd[a] = cores[a].intersection(came)
        if new_fwd == fwd and new_bwd == bwd:
            break
        fwd, bwd = new_fwd, new_bwd
    return {a: fwd[a].intersection(bwd[a]) for a in S.labels}


def inv_union(sets: Mapping[str, RegionSet]) -> RegionSet:
    out = None
    for s in sets.values():
        out = s if out is None else out.union(s)
    return out if out is not None else RegionSet.empty()


class WordError(ValueError):
    pass


def word_core(S: IndexSystem, f: PLMap, word: Sequence[str], cycles: int = 1) -> RegionSet:
    """Points x with f^i(x) in I_{w_i} for i = 0..n.

    With ``cycles > 1`` the word is repeated that many times, which
    shrinks the hull toward the f^{n+1}-invariant part for cyclic words.
    """
    word = [str(w) for w in word]
    if not word:
        raise WordError("empty word")
    if not S.allowable(word):
        bad = next((a, b) for a, b in zip(word, word[1:]) if (a, b) not in S.edges)
        raise WordError(f"word is not allowable: {bad[0]} -> {bad[1]} is not an edge")
    full = list(word)
    if cycles > 1:
        if (word[-1], word[0]) not in S.edges:
            raise WordError("word does not close up into a cycle")
        full = word * cycles
    cores = S.cores()
    W = cores[full[-1]]
    for lab in reversed(full[:-1]):
        W = cores[lab].intersection(f.preimage(W))
    return W


def follows(S: IndexSystem, f: PLMap, x, word: Iterable[str]) -> bool:
    """Does the forward orbit of x visit the cores named by ``word``?"""
    cores = S.cores()
    for lab in word:
        if not cores[str(lab)].contains_point(x):
            return False
        x = f(x)
    return True


def periodic_orbits(S: IndexSystem, f: PLMap, period: Sequence[str]) -> list[Fraction]:
    """Exact points x with f^p(x) = x whose orbit visits the cores of ``period``.

    Every solution of f^p(x) = x is found piece by piece on f^p, then
    filtered by the itinerary.
    """
    period = [str(a) for a in period]
    return [x for x in f.periodic_points(len(period)) if follows(S, f, x, period)]
