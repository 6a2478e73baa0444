from fractions import Fraction as Q

import pytest

from indexsys.construct import (
    ProductIndexPair,
    RefineDelta,
    check_product_pair,
    construct,
    discretize,
    slice_system,
    strip_template,
)
from indexsys.dynamics import ProductMap
from indexsys.fixtures import doubling_map, identity_map, tent_map
from indexsys.geometry import GeometryError, SquareSet
from indexsys.index_core import Status, inv_m, inv_union, verify


@pytest.fixture(scope="module")
def tent_pipeline():
    return construct(tent_map(), Q(1, 27), Q(2, 27), Q(1, 27))


def test_tent_template_pair_checks(tent_pipeline):
    _, _, P = tent_pipeline
    assert check_product_pair(P).ok
    assert P.L.issubset(P.N)


def test_tent_system_verifies_independently(tent_pipeline):
    asm, family, _ = tent_pipeline
    assert verify(asm.system, tent_map()).status is Status.VERIFIED
    assert len(family.slices) == len(set((p.N, p.L) for p in family.slices.values()))
    assert asm.system.edges <= asm.derived_edges


def test_fixed_points_in_enclosure(tent_pipeline):
    asm, _, _ = tent_pipeline
    f = tent_map()
    U = inv_union(inv_m(asm.system, f, 8))
    for x in f.periodic_points(1):
        assert U.contains_point(x)


def test_slices_are_columns(tent_pipeline):
    _, family, P = tent_pipeline
    for i, lab in family.slabs.items():
        x = (Q(i) + Q(1, 2)) / P.k
        assert P.N.slice(x) == family.slices[lab].N
        assert P.L.slice(x) == family.slices[lab].L


def test_coarse_grid_asks_for_refinement():
    with pytest.raises(RefineDelta) as e:
        strip_template(tent_map(), Q(2, 27), Q(1, 27), Q(1, 3))
    assert e.value.suggested == Q(1, 9)


def test_identity_on_circle_is_trivial():
    asm, family, _ = construct(identity_map("circle"), Q(1, 9), Q(1, 2), Q(1, 9))
    assert len(asm.system.pairs) == 1 and len(family.slices) == 1
    assert asm.system.edges == {("0", "0")}


def test_doubling_pipeline():
    asm, family, _ = construct(doubling_map(), Q(1, 20), Q(1, 10), Q(1, 20))
    assert verify(asm.system, doubling_map()).status is Status.VERIFIED
    assert len(family.slices) <= 20


def test_discretize_is_identity_on_grid(tent_pipeline):
    _, _, P = tent_pipeline
    assert discretize(P, Q(1, 27)) == P


def test_discretize_rejects_misaligned(tent_pipeline):
    _, _, P = tent_pipeline
    with pytest.raises(GeometryError):
        discretize(P, Q(1, 10))


def test_product_check_finds_broken_exit(tent_pipeline):
    _, _, P = tent_pipeline
    some = min(P.L.boxes)
    broken = ProductIndexPair(P.N.minus(P.N.with_boxes([some])), P.L.minus(P.L.with_boxes([some])), P.factor)
    chk = check_product_pair(broken)
    assert not chk.ok


def test_delta_must_be_unit_fraction():
    with pytest.raises(GeometryError):
        strip_template(tent_map(), Q(2, 27), Q(1, 27), Q(2, 27))


def test_hand_pair_slices():
    N = SquareSet(4, True, frozenset({(0, 0), (0, 1), (1, 1), (2, 2)}))
    L = SquareSet(4, True, frozenset({(0, 1)}))
    fam = slice_system(ProductIndexPair(N, L, doubling_map()))
    assert sorted(fam.slabs) == [0, 1, 2]
    assert fam.multiplicity == {"0": 1, "1": 1, "2": 1}
    assert fam.slices["0"].core().cells == ((0, Q(1, 4)),)


def test_box_image_over_pair_is_sound(tent_pipeline):
    _, _, P = tent_pipeline
    F = ProductMap(tent_map())
    img = F.box_image(P.core)
    for i, j in sorted(P.core.boxes)[::7]:
        x, y = (Q(i) + Q(1, 3)) / P.k, (Q(j) + Q(2, 5)) / P.k
        fx, fy = F(x, y)
        assert any(Q(a, P.k) <= fx <= Q(a + 1, P.k) and Q(b, P.k) <= fy <= Q(b + 1, P.k) for a, b in img.boxes)
