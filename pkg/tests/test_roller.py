import itertools

import pytest

from cubebound.cubecomplex import realize
from cubebound.document import load_fixture
from cubebound.pocset import HalfSpace
from cubebound.roller import (RollerClass, class_ubs, counts_of, enumerate_classes, l1_visible,
                              leq, principal_counts, separators, umbra)
from cubebound.titscone import roller_patterns
from cubebound.ubs import UBSClass, preceq, ubs_classes

from .oracles import roller_deep_sets

TIERED = ["stair-lin", "stair-sub", "dominant", "weird", "quarterplane", "interleave",
          "disjoint-union"]


def fixture(name):
    return load_fixture(name).payload


def cls(*fams):
    return UBSClass(fams)


# ---------------------------------------------------------------- umbra and its section

def test_staircase_umbra_is_not_injective():
    T = fixture("stair-lin")
    assert umbra(T, cls("H")) == umbra(T, cls("V", "H"))
    assert class_ubs(T, umbra(T, cls("H"))) == cls("V", "H")


def test_quarterplane_vertical_class_sits_at_zero_height():
    T = fixture("quarterplane")
    v = umbra(T, cls("V"))
    assert v.deep == ("V",) and "H" not in v.deep
    assert principal_counts(T, v, {"H": 0, "V": 0}, 10) == {"H": 0, "V": 10}
    assert class_ubs(T, v) == cls("V")


def test_weird_top_class_is_the_top_roller_class():
    T = fixture("weird")
    P = enumerate_classes(T)
    assert P.maximal() == [umbra(T, cls("B", "S", "D"))]


def test_visibility():
    T = fixture("stair-lin")
    assert not l1_visible(T, cls("H"))
    assert l1_visible(T, cls("V"))
    assert l1_visible(T, cls("V", "H"))


@pytest.mark.parametrize("name", ["stair-lin", "stair-sub"])
def test_staircases_agree(name):
    T = fixture(name)
    assert [str(c) for c in enumerate_classes(T).classes] == ["{V}", "{H,V}"]


# ---------------------------------------------------------------- order

def test_quarterplane_order():
    T = fixture("quarterplane")
    P = enumerate_classes(T)
    assert len(P.classes) == 3
    assert P.to_dict()["edges"] == [["{H}", "{H,V}"], ["{V}", "{H,V}"]]
    right, up = umbra(T, cls("V")), umbra(T, cls("H"))
    top = umbra(T, cls("H", "V"))
    assert leq(right, top) and not leq(right, up)


def test_staircase_has_one_edge():
    T = fixture("stair-lin")
    P = enumerate_classes(T)
    assert len(P.classes) == 2 and len(P.covers()) == 1
    assert leq(umbra(T, cls("V")), P.maximal()[0])


def test_weird_roller_poset_is_a_chain():
    P = enumerate_classes(fixture("weird"))
    assert P.to_dict() == {"classes": ["{B}", "{B,S}", "{B,D,S}"],
                           "edges": [["{B}", "{B,S}"], ["{B,S}", "{B,D,S}"]]}


@pytest.mark.parametrize("name", TIERED)
def test_classes_match_truncation_limits(name):
    T = fixture(name)
    found = {c.deep for c in enumerate_classes(T).classes}
    assert found == roller_deep_sets(T, 12, 4)


@pytest.mark.parametrize("name", TIERED)
def test_order_axioms(name):
    classes = enumerate_classes(fixture(name)).classes
    for a in classes:
        assert leq(a, a)
    for a, b in itertools.permutations(classes, 2):
        assert not (leq(a, b) and leq(b, a))
    for a, b, c in itertools.permutations(classes, 3):
        if leq(a, b) and leq(b, c):
            assert leq(a, c)


# ---------------------------------------------------------------- the two maps

@pytest.mark.parametrize("name", TIERED)
def test_umbra_is_onto_and_order_preserving(name):
    T = fixture(name)
    classes = ubs_classes(T)
    assert {umbra(T, A) for A in classes} == set(enumerate_classes(T).classes)
    for A, B in itertools.product(classes, repeat=2):
        if preceq(T, A, B):
            assert leq(umbra(T, A), umbra(T, B))


@pytest.mark.parametrize("name", TIERED)
def test_section_is_injective_and_order_preserving(name):
    T = fixture(name)
    rc = enumerate_classes(T).classes
    images = [class_ubs(T, v) for v in rc]
    assert len(set(images)) == len(rc)
    for v, w in itertools.product(rc, repeat=2):
        assert umbra(T, class_ubs(T, v)) == v
        if leq(v, w):
            assert preceq(T, class_ubs(T, v), class_ubs(T, w))


@pytest.mark.parametrize("name", TIERED)
def test_round_trip_is_inflationary_and_idempotent(name):
    T = fixture(name)
    for A in ubs_classes(T):
        B = class_ubs(T, umbra(T, A))
        assert preceq(T, A, B)
        assert class_ubs(T, umbra(T, B)) == B


@pytest.mark.parametrize("name", TIERED)
def test_maximal_classes_correspond(name):
    T = fixture(name)
    classes = ubs_classes(T)
    top_ubs = {A for A in classes if not any(A != B and preceq(T, A, B) for B in classes)}
    top_roller = set(enumerate_classes(T).maximal())
    assert {umbra(T, A) for A in top_ubs} == top_roller
    assert {class_ubs(T, v) for v in top_roller} == top_ubs


def test_visible_classes_are_the_section_images(tiered):
    for T in tiered.values():
        images = {class_ubs(T, v) for v in enumerate_classes(T).classes}
        assert images == {A for A in ubs_classes(T) if l1_visible(T, A)}


# ---------------------------------------------------------------- separators vs truncation gates

def test_staircase_separators_toward_the_vertical_class():
    T = fixture("stair-lin")
    v = RollerClass(("V",), ("H",), ())
    assert separators(T, {"V": 0, "H": 0}, v).sets.keys() == {"V"}


@pytest.mark.parametrize("name", TIERED)
@pytest.mark.parametrize("N", [8, 16, 24])
def test_umbra_fingerprints_match_truncation_gates(name, N):
    T = fixture(name)
    if N > 8 and len(T.families) > 2:
        N = 10
    X = realize(T.truncate(N), check=False)
    origin = min(X.vertices)
    for v in enumerate_classes(T).classes:
        halfspaces = [HalfSpace((f, i), 1) for f in v.deep for i in range(N)]
        halfspaces += [HalfSpace((f, i), -1) for f in v.shallow for i in range(N)]
        C = X.halfspace_subcomplex(halfspaces)
        g = X.gate(C, origin)
        walls = {X.pocset.labels[i] for i in range(X.n) if (g ^ origin) >> i & 1}
        assert walls == set(separators(T, counts_of(X, origin), v).members_below(N))


# ---------------------------------------------------------------- cones through the tiered route

@pytest.mark.parametrize("name", ["octant3", "quarterplane-cone"])
def test_cone_classes_two_routes(name):
    C = load_fixture(name).payload
    T = C.to_tiered()
    patterns, _ = roller_patterns(C)
    assert {tuple(p.coords) for p in patterns} == {c.deep for c in enumerate_classes(T).classes}
    for v in enumerate_classes(T).classes:
        assert umbra(T, class_ubs(T, v)) == v
