"""Acceptance criteria 1-8, one PASS/FAIL line each in the terminal summary."""

import contextlib
import math
import random
import time
from fractions import Fraction as Q
from pathlib import Path

from conftest import ACCEPTANCE_LINES
from test_homology import cubical_relative_homology, tent_square
from indexsys.cli import main
from indexsys.cocyclic import (
    build_homgraph,
    detect_orbit,
    disjoint_subgraph,
    empty_up_to,
    graph_factor,
    shift_factor,
    word_allowed,
)
from indexsys.dynamics import ProductMap
from indexsys.fixtures import doubling_map, doubling_system, tent_map, tent_system, tent_trivial_system
from indexsys.formats import loads_system
from indexsys.geometry import SquareSet, normalize
from indexsys.homology import degree_matrix, induced_map, is_zero, matmul, matrix, pair_homology
from indexsys.index_core import Status, follows, inv_m, inv_union, verify

FIX = Path(__file__).resolve().parent.parent / "fixtures"


@contextlib.contextmanager
def criterion(n: int, title: str, limit: float | None = None):
    notes: list[str] = []
    t0 = time.perf_counter()
    try:
        yield notes
        dt = time.perf_counter() - t0
        if limit is not None:
            assert dt < limit, f"took {dt:.2f} s, limit {limit} s"
    except AssertionError as e:
        ACCEPTANCE_LINES.append(f"criterion {n} FAIL  {title}: {e}")
        raise
    dt = time.perf_counter() - t0
    extra = f" ({'; '.join(notes)})" if notes else ""
    ACCEPTANCE_LINES.append(f"criterion {n} PASS  {title} [{dt:.2f} s]{extra}")


def test_criterion_1_doubling():
    with criterion(1, "doubling fixture, exact", limit=5) as notes:
        f, S = doubling_map(), doubling_system()
        assert verify(S, f).status is Status.VERIFIED
        assert len(S.pairs) == 10
        assert S.edges == {(str(i), str((2 * i + d) % 10)) for i in range(10) for d in (-1, 0, 1)}
        G = build_homgraph(S, f)
        assert all(G.vertices[a].dims == (0, 1) for a in G.labels)
        assert all(T.matrices[1] == matrix([[1]]) for T in G.edges.values())
        cert = shift_factor(G, 3, [["1", "1", "1"], ["1", "3", "5"]])
        assert cert.growth >= 2 and cert.n == 3
        notes.append(f"30 edges, all (1); {cert.describe()}")


def test_criterion_2_tent():
    with criterion(2, "tent fixture, sign table", limit=5) as notes:
        f, S = tent_map(), tent_system()
        assert verify(S, f).status is Status.VERIFIED
        assert len(S.pairs) == 4 and len(S.edges) == 8
        G = build_homgraph(S, f)
        plus = [("1", "1"), ("1", "2"), ("2", "3"), ("2", "4")]
        minus = [("3", "3"), ("3", "4"), ("4", "1"), ("4", "2")]
        assert set(G.edges) == set(plus + minus)
        assert all(G.edges[e].matrices[1] == matrix([[1]]) for e in plus)
        assert all(G.edges[e].matrices[1] == matrix([[-1]]) for e in minus)
        verts, _ = disjoint_subgraph(G)
        assert verts == ["1", "2", "3", "4"]
        cert = graph_factor(G, verts)
        assert cert.growth >= 2 and cert.entropy_bound >= math.log(2) - 1e-12
        notes.append("signs match with no global flip; " + cert.describe())


def test_criterion_3_trivial_pair(capsys):
    with criterion(3, "single tent pair fails to detect", limit=1) as notes:
        f, S = tent_map(), tent_trivial_system()
        P = S.pairs["0"]
        assert pair_homology(P).dims == (0, 2)
        M = induced_map(P, P, f).matrices[1]
        assert M == matrix([[1, -1], [1, -1]])
        assert is_zero(matmul(M, M))
        code = main(["analyze", "--map", str(FIX / "tent.map"), "--system", str(FIX / "tent_trivial.system"),
                     "--no-timestamp", "--max-len", "4"])
        out = capsys.readouterr().out
        assert code == 0 and "cocyclic subshift empty (bound 3)" in out
        assert empty_up_to(build_homgraph(S, f), 3)[0]
        notes.append("M^2 = 0, empty at bound 3")


def test_criterion_4_nested_enclosures():
    with criterion(4, "inv_m nested, doubling strictly shrinking") as notes:
        for f, S in ((doubling_map(), doubling_system()), (tent_map(), tent_system())):
            layers = [inv_m(S, f, m) for m in range(9)]
            for lab in S.labels:
                assert all(layers[m + 1][lab].issubset(layers[m][lab]) for m in range(8))
        f, S = doubling_map(), doubling_system()
        layers = [inv_m(S, f, m) for m in range(9)]
        assert all(layers[8][a].issubset(layers[4][a]) for a in S.labels)
        total = [sum(L[a].measure() for a in S.labels) for L in layers]
        stable = next((m for m in range(8) if layers[m] == layers[m + 1]), 8)
        assert all(total[m + 1] < total[m] for m in range(stable))
        notes.append(f"doubling total length {total[4]} -> {total[8]}, no stabilisation by m=8")


def test_criterion_5_construct_pipeline(capsys, tmp_path):
    with criterion(5, "strip template on the tent map", limit=60) as notes:
        code = main(["construct", "--map", str(FIX / "tent.map"), "--template", "2/27,1/27", "--delta", "1/27",
                     "--out", str(tmp_path), "--no-timestamp"])
        out = capsys.readouterr().out
        assert code == 0
        slices = next(line for line in out.splitlines() if line.startswith("distinct slices:"))
        S = loads_system((tmp_path / "constructed.system").read_text())
        f = tent_map()
        assert verify(S, f).status is Status.VERIFIED
        # fixed points from the two affine branches: 3x = x and 3 - 3x = x
        fixed = [Q(0), Q(3, 4)]
        assert all(f(x) == x for x in fixed)
        U = inv_union(inv_m(S, f, 8))
        assert all(U.contains_point(x) for x in fixed)
        notes.append(f"{slices}; {len(S.pairs)} pairs, {len(S.edges)} edges")


def test_criterion_6_orbit_detection():
    with criterion(6, "orbit detection vs exact PL oracle") as notes:
        f, S = doubling_map(), doubling_system()
        G = build_homgraph(S, f)
        assert detect_orbit(G, ["1", "3", "5"]).certified
        # f^3 lifts to 8x, so f^3(x) = x iff 7x is an integer
        orbit = [Q(j, 7) for j in range(7) if follows(S, f, Q(j, 7), ["1", "3", "5", "1"])]
        assert orbit == [Q(1, 7)]
        T = tent_trivial_system()
        assert not detect_orbit(build_homgraph(T, tent_map()), ["0"]).certified
        notes.append("doubling (1,3,5): certified, unique orbit 1/7; single tent pair (0): NO-CERTIFICATE")


def test_criterion_7_oracles():
    with criterion(7, "cubical oracle and functoriality") as notes:
        pairs = [S.pairs[a] for S in (doubling_system(), tent_system(), tent_trivial_system()) for a in S.labels]
        assert len(pairs) == 15
        for P in pairs:
            assert pair_homology(P).dims == cubical_relative_homology(P)
        S, f, f2 = tent_system(), tent_map(), tent_square()
        count = 0
        for a, b in S.sorted_edges():
            for c in S.successors(b):
                Ma = induced_map(S.pairs[a], S.pairs[b], f).matrices[1]
                Mb = induced_map(S.pairs[b], S.pairs[c], f).matrices[1]
                assert degree_matrix(f2, S.pairs[a], S.pairs[c]).matrices[1] == matmul(Mb, Ma)
                count += 1
        notes.append(f"15 pairs agree; {count} composable tent paths")


def test_criterion_8_property_suites():
    with criterion(8, "property suites") as notes:
        rng = random.Random(20261017)
        failures = 0
        graphs = [build_homgraph(S, g) for S, g in ((tent_system(), tent_map()), (doubling_system(), doubling_map()),
                                                    (tent_trivial_system(), tent_map()))]
        for _ in range(1000):
            G = rng.choice(graphs)
            w = [rng.choice(G.labels)]
            for _ in range(rng.randint(0, 8)):
                w.append(rng.choice(G.successors(w[-1])))
            if word_allowed(G, w):
                failures += sum(not word_allowed(G, w[i:j]) for i in range(len(w)) for j in range(i + 1, len(w) + 1))
        sub_fail = failures

        k = 27
        F = ProductMap(tent_map())
        cells = range(-13, 40)
        failures = 0
        for _ in range(10_000):
            i, j = rng.choice(cells), rng.choice(cells)
            img = F.box_image(SquareSet(k, False, frozenset({(i, j)})))
            x = Q(i, k) + Q(rng.randint(0, 1000), 1000 * k)
            y = Q(j, k) + Q(rng.randint(0, 1000), 1000 * k)
            fx, fy = F(x, y)
            if not any(Q(a, k) <= fx <= Q(a + 1, k) and Q(b, k) <= fy <= Q(b + 1, k) for a, b in img.boxes):
                failures += 1
        box_fail = failures

        failures = 0
        for _ in range(1000):
            cells_ = []
            for _ in range(rng.randint(0, 6)):
                a, b = sorted(Q(rng.randint(-60, 60), 20) for _ in range(2))
                cells_.append((a, b))
            A = normalize(cells_)
            failures += normalize(A.cells) != A
        norm_fail = failures
        assert (sub_fail, box_fail, norm_fail) == (0, 0, 0), (sub_fail, box_fail, norm_fail)
        notes.append("1000 words, 10000 points, 1000 cell lists: 0 failures")
