"""JSON-compatible text formats with exact rationals written as "p/q" strings.

Grammar (JSON values; ``Q`` is a rational string such as "3/10", "-1" or "0"):

    map      := {"space": "line" | "circle", "name"?: str, "vertices": [[Q, Q], ...]}
    region   := [[Q, Q], ...]
    system   := {"space": "line" | "circle",
                 "pairs": {label: {"N": region, "L": region}, ...},
                 "edges": [[label, label], ...]}
    product  := {"k": int, "periodic": bool, "N": [[int, int], ...], "L": [[int, int], ...],
                 "map"?: str}
    words    := {"period": [label, ...], "preperiod"?: [label, ...]}
              | {"n": int, "words": [[label, ...], ...]}

Serialization is canonical: sorted keys, sorted labels and edges, cells
in normal form, two-space indentation and a trailing newline.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

from .dynamics import MapError, PLMap
from .geometry import CIRCLE, LINE, CompactPair, GeometryError, RegionSet, SquareSet, fmt, normalize, scalar
from .index_core import IndexSystem, IndexSystemError, _label_key

_RATIONAL = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")


class ParseError(ValueError):
    """A malformed input file.  ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, line: int = 1, column: int = 1, source: str = "<input>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.line, self.column, self.source = line, column, source


def parse_rational(text: str) -> Fraction:
    """A "p/q" or integer literal; floats are refused."""
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ValueError(f"expected a rational string, got {text!r}")
    if isinstance(text, str) and not _RATIONAL.match(text):
        raise ValueError(f"not a rational literal: {text!r}")
    q = scalar(text.replace(" ", "") if isinstance(text, str) else text)
    return q


def _locate(text: str, needle: str) -> tuple[int, int]:
    pos = text.find(needle)
    if pos < 0:
        return 1, 1
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _load(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno, source) from None


class _Reader:
    """Turns semantic errors into located ParseErrors.

    JSON carries no positions after decoding, so the location is that of
    the first occurrence of the offending token in the source text.
    """

    def __init__(self, text: str, source: str):
        self.text, self.source = text, source

    def fail(self, message: str, token: Any = None):
        needle = json.dumps(token) if token is not None and not isinstance(token, (dict, list)) else None
        line, col = _locate(self.text, needle) if needle else (1, 1)
        raise ParseError(message, line, col, self.source)

    def get(self, obj: Any, key: str, kind: type, optional: bool = False):
        if not isinstance(obj, dict):
            self.fail("expected an object")
        if key not in obj:
            if optional:
                return None
            self.fail(f"missing key {key!r}")
        val = obj[key]
        if not isinstance(val, kind) or (kind is int and isinstance(val, bool)):
            self.fail(f"key {key!r} has the wrong type", key)
        return val

    def rational(self, v: Any) -> Fraction:
        try:
            return parse_rational(v)
        except (ValueError, TypeError) as e:
            self.fail(str(e), v)

    def cells(self, raw: Any) -> list[tuple[Fraction, Fraction]]:
        if not isinstance(raw, list):
            self.fail("a region must be a list of [a, b] cells")
        out = []
        for c in raw:
            if not (isinstance(c, list) and len(c) == 2):
                self.fail("a cell must be a pair [a, b]", c if not isinstance(c, list) else None)
            out.append((self.rational(c[0]), self.rational(c[1])))
        return out

    def space(self, obj: Any) -> str:
        sp = self.get(obj, "space", str)
        if sp not in (LINE, CIRCLE):
            self.fail(f"unknown space {sp!r}", sp)
        return sp


# -- maps -------------------------------------------------------------------------

def map_to_obj(f: PLMap) -> dict:
    obj = {"space": f.space, "vertices": [[fmt(x), fmt(y)] for x, y in f.vertices]}
    if f.name:
        obj["name"] = f.name
    return obj


def map_from_obj(obj: Any, text: str = "", source: str = "<input>") -> PLMap:
    r = _Reader(text, source)
    sp = r.space(obj)
    verts = r.cells(r.get(obj, "vertices", list))
    name = r.get(obj, "name", str, optional=True) or ""
    try:
        return PLMap(verts, sp, name=name)
    except (MapError, GeometryError, ValueError) as e:
        r.fail(str(e), "vertices")


def loads_map(text: str, source: str = "<input>") -> PLMap:
    return map_from_obj(_load(text, source), text, source)


# -- regions and systems --------------------------------------------------------

def region_to_obj(A: RegionSet) -> list:
    return [[fmt(a), fmt(b)] for a, b in A.cells]


def system_to_obj(S: IndexSystem) -> dict:
    return {
        "space": S.space,
        "pairs": {a: {"N": region_to_obj(S.pairs[a].N), "L": region_to_obj(S.pairs[a].L)} for a in S.labels},
        "edges": [[a, b] for a, b in S.sorted_edges()],
    }


def system_from_obj(obj: Any, text: str = "", source: str = "<input>") -> IndexSystem:
    r = _Reader(text, source)
    sp = r.space(obj)
    raw_pairs = r.get(obj, "pairs", dict)
    pairs = {}
    for lab, p in raw_pairs.items():
        try:
            N = normalize(r.cells(r.get(p, "N", list)), sp)
            L = normalize(r.cells(r.get(p, "L", list)), sp)
            pairs[lab] = CompactPair(N, L, lab)
        except (GeometryError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            r.fail(f"pair {lab}: {e}", lab)
    edges = []
    for e in r.get(obj, "edges", list):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e)):
            r.fail("an edge must be a pair of labels [a, b]")
        edges.append(tuple(e))
    try:
        return IndexSystem(pairs, frozenset(edges))
    except IndexSystemError as e:
        r.fail(str(e), "edges")


def loads_system(text: str, source: str = "<input>") -> IndexSystem:
    return system_from_obj(_load(text, source), text, source)


def report_to_obj(report) -> dict:
    """A verification report with every witness set written out."""
    return {
        "status": report.status.value,
        "edges": [{"edge": [e.source, e.target], "exit_ok": e.exit_ok, "image_ok": e.image_ok,
                   "exit_witness": region_to_obj(e.exit_witness), "image_witness": region_to_obj(e.image_witness)}
                  for e in report.edge_checks],
        "chain": [{"edge": [c.source, c.target], "ok": c.ok, "witness": region_to_obj(c.witness)}
                  for c in report.chain_checks],
        "failures": list(report.failures),
        "empty_cores": list(report.degenerate),
    }


# -- product pairs ------------------------------------------------------------------

def product_to_obj(N: SquareSet, L: SquareSet, map_name: str = "") -> dict:
    obj = {"k": N.k, "periodic": N.periodic,
           "N": [list(b) for b in sorted(N.boxes)], "L": [list(b) for b in sorted(L.boxes)]}
    if map_name:
        obj["map"] = map_name
    return obj


def product_from_obj(obj: Any, text: str = "", source: str = "<input>") -> tuple[SquareSet, SquareSet]:
    r = _Reader(text, source)
    k = r.get(obj, "k", int)
    if not 1 <= k <= 10**4:
        r.fail("grid size k must lie in 1..10000", "k")
    periodic = r.get(obj, "periodic", bool)
    sets = []
    for key in ("N", "L"):
        boxes = []
        for b in r.get(obj, key, list):
            if not (isinstance(b, list) and len(b) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in b)):
                r.fail(f"{key}: a box must be a pair of integers", key)
            boxes.append(tuple(b))
        sets.append(SquareSet(k, periodic, frozenset(boxes)))
    N, L = sets
    if not L.issubset(N):
        r.fail("L is not contained in N", "L")
    return N, L


def loads_product(text: str, source: str = "<input>") -> tuple[SquareSet, SquareSet]:
    return product_from_obj(_load(text, source), text, source)


# -- word files ---------------------------------------------------------------------

def loads_words(text: str, source: str = "<input>") -> dict:
    obj = _load(text, source)
    r = _Reader(text, source)

    def labels(v, key):
        if not (isinstance(v, list) and all(isinstance(x, (str, int)) and not isinstance(x, bool) for x in v)):
            r.fail(f"{key} must be a list of labels", key)
        return [str(x) for x in v]

    out: dict = {}
    if "period" in obj:
        out["period"] = labels(obj["period"], "period")
        out["preperiod"] = labels(obj.get("preperiod", []), "preperiod")
    if "words" in obj:
        out["words"] = [labels(w, "words") for w in r.get(obj, "words", list)]
        out["n"] = r.get(obj, "n", int, optional=True) or (len(out["words"][0]) if out["words"] else 0)
    if not out:
        r.fail("expected 'period' or 'words'")
    return out


def _emit(obj: Any, depth: int) -> str:
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f"{inner}{json.dumps(k)}: {_emit(obj[k], depth + 1)}" for k in sorted(obj))
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, list):
        if all(not isinstance(x, (dict, list)) for x in obj):
            return json.dumps(obj)
        return "[\n" + ",\n".join(inner + _emit(x, depth + 1) for x in obj) + "\n" + pad + "]"
    return json.dumps(obj)


def dumps(obj: Any) -> str:
    """Canonical text: sorted keys, flat lists of scalars kept on one line."""
    return _emit(obj, 0) + "\n"


def label_sorted(labels) -> list[str]:
    return sorted(labels, key=_label_key)
