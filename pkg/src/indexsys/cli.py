"""Command-line front end.

Exit status: 0 verified / success, 1 failed or refused, 2 undecided,
3 unreadable input, 4 grid too coarse (a finer step is suggested).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import sys
from pathlib import Path
from typing import Sequence

from . import fixtures
from .cocyclic import (
    FactorError,
    HomGraph,
    WordError,
    build_homgraph,
    detect_orbit,
    disjoint_subgraph,
    empty_up_to,
    enumerate_cycles,
    graph_factor,
    periodic_allowed,
    search_words,
    shift_factor,
)
from .construct import ConstructionError, ProductIndexPair, RefineDelta, construct
from .dynamics import PLMap
from .formats import (
    ParseError,
    dumps,
    loads_map,
    loads_product,
    loads_system,
    loads_words,
    parse_rational,
    product_to_obj,
    report_to_obj,
    system_to_obj,
)
from .homology import Matrix, Undecided
from .index_core import IndexSystem, Status, periodic_orbits, verify

EXIT_OK, EXIT_FAILED, EXIT_UNDECIDED, EXIT_PARSE, EXIT_REFINE = 0, 1, 2, 3, 4
MAX_LEN_LIMIT = 24
MAX_GRID = 10**4

_BUILTIN_MAPS = {"tent": fixtures.tent_map, "doubling": fixtures.doubling_map,
                 "identity": lambda: fixtures.identity_map("circle")}
_BUILTIN_SYSTEMS = {"tent": fixtures.tent_system, "doubling": fixtures.doubling_system,
                    "tent_trivial": fixtures.tent_trivial_system}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(f"{self.prog}: {message}", EXIT_PARSE)


# -- argument helpers --------------------------------------------------------------

def _rational(text: str):
    try:
        return parse_rational(text)
    except (ValueError, TypeError) as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _template(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("template takes w,c")
    return tuple(_rational(p) for p in parts)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CliError(f"{path}: {e.strerror}", EXIT_PARSE) from None


def load_map(wanted: str) -> PLMap:
    if wanted.startswith("builtin:"):
        name = wanted.split(":", 1)[1]
        if name not in _BUILTIN_MAPS:
            raise CliError(f"unknown builtin map {name!r}", EXIT_PARSE)
        return _BUILTIN_MAPS[name]()
    return loads_map(_read(wanted), wanted)


def load_system(wanted: str, eps) -> IndexSystem:
    if wanted.startswith("builtin:"):
        name = wanted.split(":", 1)[1]
        if name not in _BUILTIN_SYSTEMS:
            raise CliError(f"unknown builtin system {name!r}", EXIT_PARSE)
        return _BUILTIN_SYSTEMS[name](eps)
    return loads_system(_read(wanted), wanted)


def _header(args, command: str) -> list[str]:
    lines = [f"# indexsys {command}"]
    if not args.no_timestamp:
        lines.append(f"# generated {_dt.datetime.now(_dt.timezone.utc).isoformat(timespec='seconds')}")
    return lines


def _emit(args, name: str, text: str) -> None:
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def _check_space(f: PLMap, S: IndexSystem) -> None:
    if S.pairs and S.space != f.space:
        raise CliError(f"map lives on the {f.space} but the system on the {S.space}", EXIT_PARSE)


def _verified(args) -> tuple[PLMap, IndexSystem, object]:
    f = load_map(args.map)
    S = load_system(args.system, args.epsilon)
    _check_space(f, S)
    return f, S, verify(S, f)


def _mat(M: Matrix) -> str:
    if not M:
        return "()"
    if len(M) == 1 and len(M[0]) == 1:
        return f"({M[0][0]})"
    return "[" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in M) + "]"


# -- commands ----------------------------------------------------------------------

def cmd_verify(args) -> int:
    f, S, report = _verified(args)
    lines = _header(args, "verify")
    lines.append(f"map: {f.name or args.map} ({f.space})")
    lines.append(f"pairs: {len(S.pairs)}  edges: {len(S.edges)}")
    lines.append(report.render())
    _emit(args, "verify.txt", "\n".join(lines) + "\n")
    if args.out:
        (Path(args.out) / "verify.json").write_text(dumps(report_to_obj(report)))
    return {Status.VERIFIED: EXIT_OK, Status.FAILED: EXIT_FAILED, Status.UNDECIDED: EXIT_UNDECIDED}[report.status]


def _entropy(G: HomGraph, args) -> list:
    certs = []
    verts, _ = disjoint_subgraph(G)
    try:
        certs.append(graph_factor(G, verts))
    except FactorError:
        pass
    if args.words:
        wanted = loads_words(_read(args.words), args.words)
        if "words" in wanted:
            try:
                certs.append(shift_factor(G, wanted["n"], wanted["words"]))
            except (FactorError, WordError) as e:
                raise CliError(f"word certificate rejected: {e}", EXIT_FAILED) from None
    for n in range(1, 4):
        words = search_words(G, n)
        if len(words) > 1:
            try:
                certs.append(shift_factor(G, n, words))
            except FactorError:
                pass
    return [c for c in certs if c.growth > 1]


def analysis_lines(G: HomGraph, args) -> list[str]:
    lines = ["vertices:"]
    for a in G.labels:
        d = G.vertices[a]
        lines.append(f"  {a}: dim H0 = {d.dim(0)}, dim H1 = {d.dim(1)}")
    lines.append("edge matrices (degree 0; degree 1):")
    for a, b in G.edge_list():
        M0, M1 = G.edges[(a, b)].matrices
        lines.append(f"  {a} -> {b}: {_mat(M0)}; {_mat(M1)}")
    cycles = enumerate_cycles(G, args.max_len)
    ok = [c for c in cycles if periodic_allowed(G, c)]
    lines.append(f"simple cycles up to length {args.max_len}: {len(cycles)}, admissible periodic: {len(ok)}")
    for c in cycles:
        mark = "admissible" if c in ok else "nilpotent"
        lines.append(f"  ({','.join(c)}): {mark}")
    verts, edges = disjoint_subgraph(G)
    lines.append(f"disjoint subgraph: vertices {{{', '.join(verts)}}}, {len(edges)} edges")
    certs = _entropy(G, args)
    if certs:
        best = max(certs, key=lambda c: c.entropy_bound)
        for c in certs:
            words = " ".join("(" + ",".join(w) + ")" for w in c.symbols)
            lines.append(f"certificate: {c.describe()} over {words}")
        lines.append(f"best entropy lower bound: {best.describe()}")
    else:
        lines.append("best entropy lower bound: 0 (no certificate)")
    verdict = None
    for L in range(2, args.max_len + 1):
        empty, _ = empty_up_to(G, L)
        if empty:
            verdict = f"cocyclic subshift empty (bound {L})"
            break
    if verdict is None:
        _, w = empty_up_to(G, args.max_len)
        verdict = f"no emptiness up to bound {args.max_len}; surviving word ({','.join(w)})"
    lines.append(verdict)
    return lines


def cmd_analyze(args) -> int:
    f, S, report = _verified(args)
    if report.status is not Status.VERIFIED:
        sys.stderr.write(report.render() + "\n")
        raise CliError(f"refusing to analyze: system is {report.status.value}", EXIT_FAILED)
    G = build_homgraph(S, f)
    lines = _header(args, "analyze") + [f"map: {f.name or args.map} ({f.space})"]
    lines += analysis_lines(G, args)
    _emit(args, "analysis.txt", "\n".join(lines) + "\n")
    if args.dot:
        Path(args.dot).write_text(to_dot(G))
    return EXIT_OK


def cmd_construct(args) -> int:
    f = load_map(args.map)
    if args.delta is None:
        raise CliError("construct needs --delta", EXIT_PARSE)
    if args.delta.numerator != 1 or not 1 <= args.delta.denominator <= MAX_GRID:
        raise CliError("--delta must be 1/k with k <= 10000", EXIT_PARSE)
    if args.product_pair:
        N, L = loads_product(_read(args.product_pair), args.product_pair)
        pair = ProductIndexPair(N, L, f)
        w = c = None
    elif args.template:
        pair = None
        w, c = args.template
    else:
        raise CliError("construct needs --product-pair or --template w,c", EXIT_PARSE)
    try:
        asm, family, P = construct(f, args.delta, w, c, pair=pair)
    except RefineDelta as e:
        sys.stderr.write(f"refine delta: {e}; try --delta {e.suggested}\n")
        return EXIT_REFINE
    except ConstructionError as e:
        raise CliError(str(e), EXIT_FAILED) from None
    S = asm.system
    lines = _header(args, "construct")
    lines.append(f"map: {f.name or args.map} ({f.space}), delta = {args.delta}")
    lines.append(f"product pair: {len(P.N.boxes)} boxes in N, {len(P.L.boxes)} in L")
    lines.append(f"distinct slices: {len(family.slices)} over {len(family.slabs)} slabs")
    if family.empty_core:
        lines.append(f"slices with empty core: {', '.join(family.empty_core)}")
    if asm.dropped:
        lines.append(f"dropped (empty core, no successor): {', '.join(asm.dropped)}")
    lines.append(f"slab edges: {len(asm.derived_edges)}, verified edges: {len(S.edges)}, "
                 f"rejected: {len(asm.rejected_edges)}")
    lines.append(f"system: {len(S.pairs)} pairs, status {verify(S, f).status.value}")
    _emit(args, "construct.txt", "\n".join(lines) + "\n")
    if args.out:
        out = Path(args.out)
        (out / "constructed.system").write_text(dumps(system_to_obj(S)))
        (out / "product.pair").write_text(dumps(product_to_obj(P.N, P.L, f.name)))
    return EXIT_OK


def cmd_detect_orbit(args) -> int:
    f, S, report = _verified(args)
    if report.status is not Status.VERIFIED:
        raise CliError(f"refusing: system is {report.status.value}", EXIT_FAILED)
    if not args.words:
        raise CliError("detect-orbit needs --words", EXIT_PARSE)
    wanted = loads_words(_read(args.words), args.words)
    if "period" not in wanted:
        raise CliError(f"{args.words}: expected a 'period' entry", EXIT_PARSE)
    G = build_homgraph(S, f)
    try:
        cert = detect_orbit(G, wanted["period"], wanted["preperiod"])
    except WordError as e:
        raise CliError(str(e), EXIT_FAILED) from None
    lines = _header(args, "detect-orbit")
    word = f"({','.join(cert.preperiod)})({','.join(cert.period)})^inf"
    lines.append(f"word: {word}")
    lines.append("CERTIFICATE: " + cert.reason if cert.certified else cert.reason)
    if not cert.preperiod:
        orbit = periodic_orbits(S, f, cert.period)
        pts = ", ".join(str(x) for x in orbit)
        lines.append(f"oracle: {len(orbit)} periodic point(s) following the word: [{pts}]")
    _emit(args, "orbit.txt", "\n".join(lines) + "\n")
    if args.out:
        obj = {"period": cert.period, "preperiod": cert.preperiod, "certified": cert.certified,
               "reason": cert.reason, "matrices": cert.matrices}
        (Path(args.out) / "orbit.certificate").write_text(dumps(obj))
    return EXIT_OK


def to_dot(G: HomGraph) -> str:
    """Graph of the index system; edges carry degree-1 matrices."""
    lines = ["digraph homgraph {", "  rankdir=LR;"]
    for a in G.labels:
        d = G.vertices[a]
        lines.append(f'  "{a}" [label="{a}\\nH = [{d.dim(0)}, {d.dim(1)}]"];')
    for a, b in G.edge_list():
        label = _mat(G.edges[(a, b)].matrices[1])
        style = ""
        if a == b and not periodic_allowed(G, [a]):
            style = ', style=dashed, color=red, fontcolor=red'
            label += " nilpotent"
        lines.append(f'  "{a}" -> "{b}" [label="{label}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export(args) -> int:
    f, S, report = _verified(args)
    if report.status is not Status.VERIFIED:
        raise CliError(f"refusing: system is {report.status.value}", EXIT_FAILED)
    G = build_homgraph(S, f)
    dot = to_dot(G)
    if args.dot:
        Path(args.dot).write_text(dot)
    else:
        sys.stdout.write(dot)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "system.json").write_text(dumps(system_to_obj(S)))
    return EXIT_OK


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--map", required=True, help="map file or builtin:NAME")
    common.add_argument("--epsilon", type=_rational, default=fixtures.EPS,
                        help="margin for builtin systems (default 1/100)")
    common.add_argument("--out", help="directory for written reports")
    common.add_argument("--no-timestamp", action="store_true")
    p = _Parser(prog="indexsys", description="Index systems for piecewise-linear maps.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("verify", "analyze", "detect-orbit", "export"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--system", required=True, help="system file or builtin:NAME")
        if name == "analyze":
            s.add_argument("--max-len", type=int, default=12)
            s.add_argument("--words")
            s.add_argument("--dot")
        if name == "detect-orbit":
            s.add_argument("--words")
        if name == "export":
            s.add_argument("--dot")
    s = sub.add_parser("construct", parents=[common])
    s.add_argument("--product-pair")
    s.add_argument("--template", type=_template, help="strip width and collar, w,c")
    s.add_argument("--delta", type=_rational)
    return p


_COMMANDS = {"verify": cmd_verify, "analyze": cmd_analyze, "construct": cmd_construct,
             "detect-orbit": cmd_detect_orbit, "export": cmd_export}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "max_len", 2) is not None and not 2 <= getattr(args, "max_len", 2) <= MAX_LEN_LIMIT:
            raise CliError(f"--max-len must lie in 2..{MAX_LEN_LIMIT}", EXIT_PARSE)
        return _COMMANDS[args.command](args)
    except CliError as e:
        sys.stderr.write(f"error: {e}\n")
        return e.code
    except ParseError as e:
        sys.stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    except Undecided as e:
        sys.stderr.write(f"undecided: {e}\n")
        return EXIT_UNDECIDED
    except Exception as e:  # noqa: BLE001 - every failure maps onto the exit contract
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
