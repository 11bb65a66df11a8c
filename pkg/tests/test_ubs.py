import random

import pytest

from cubebound.descriptor import UBSDescriptor
from cubebound.document import load_fixture
from cubebound.errors import DomainError
from cubebound.tiered import CrossRule, TieredPocset
from cubebound.ubs import (UBSClass, canonical_descriptor, canonical_sign, classes_below,
                           dimension, dominant_components, is_ubs, minimal_classes,
                           minimal_decomposition, preceq, prune, ubs_classes)

from .oracles import side_of


def fixture(name):
    return load_fixture(name).payload


def full(T):
    return UBSDescriptor({f: 0 for f in T.families})


def tripod():
    rules = [CrossRule.from_json({"pair": [a, b], "cross_iff": "never", "nest": "a+ < b-"})
             for a, b in (("A", "B"), ("A", "C"), ("B", "C"))]
    return TieredPocset("ABC", rules)


def side_counts(T, S, h, N):
    """Members of S below N on the + and - sides of h."""
    P = T.truncate(N)
    plus = minus = 0
    for m in S.members_below(N):
        if m == h:
            continue
        s = side_of(P, m, h)
        plus += s > 0
        minus += s < 0
    return plus, minus


def crossing_defect(T, h, family, N):
    """Hyperplanes of ``family`` below N that do not cross h."""
    return sum(1 for j in range(N) if not T.relate(h, (family, j)).transverse)


FULL_UBS = ["stair-lin", "stair-sub", "dominant", "weird", "quarterplane", "interleave"]


# ---------------------------------------------------------------- recognition

def test_staircase_full_set_is_a_ubs():
    assert is_ubs(fixture("stair-lin"), full(fixture("stair-lin")))


def test_weird_outer_tails_are_separated():
    check = is_ubs(fixture("weird"), UBSDescriptor({"B": 0, "D": 0}))
    assert not check and check.axiom == "inseparable"
    b, d = check.witness["pair"]
    s = check.witness["separator"]
    assert b.startswith("B") and d.startswith("D") and s.startswith("S")
    i, j, k = int(b[1:]), int(s[1:]), int(d[1:])
    # S_j separates B_i from D_k whenever i < j < k
    assert i < j < k


def test_tripod_facing_triple():
    check = is_ubs(tripod(), UBSDescriptor({"A": 0}, add=[("B", 0), ("C", 0)]))
    assert not check and check.axiom == "facing-triple"
    assert len(check.witness["triple"]) == 3


def test_two_sided_hyperplane():
    check = is_ubs(tripod(), UBSDescriptor({"A": 0, "B": 0}))
    assert not check and check.axiom == "unidirectional"


def test_finite_set_is_not_a_ubs():
    check = is_ubs(fixture("weird"), UBSDescriptor(add=[("B", 0), ("S", 0)]))
    assert not check and check.axiom == "infinite"


@pytest.mark.parametrize("name", FULL_UBS)
def test_full_sets_are_ubses(name):
    T = fixture(name)
    assert is_ubs(T, full(T))


@pytest.mark.parametrize("name", FULL_UBS)
def test_closure_of_a_perturbed_class_is_a_ubs(name):
    T = fixture(name)
    rng = random.Random(11)
    for A in ubs_classes(T):
        for _ in range(5):
            base = canonical_descriptor(T, A)
            noise = [(rng.choice(A.families), rng.randint(0, 6)) for _ in range(2)]
            S = T.closure(UBSDescriptor(sets=base.sets, add=noise))
            assert is_ubs(T, S), (A, S)


# ---------------------------------------------------------------- pruning

def test_prune_drops_a_stray_horizontal():
    T = fixture("stair-lin")
    S = UBSDescriptor({"V": 1}, add=[("H", 0)])
    assert is_ubs(T, S)
    assert prune(T, S) == UBSDescriptor({"V": 1})


def test_prune_matches_side_counts():
    T = fixture("stair-lin")
    S = UBSDescriptor({"V": 1}, add=[("H", 0)])
    kept = prune(T, S)
    for h in S.members_below(6):
        small, big = side_counts(T, S, h, 20), side_counts(T, S, h, 40)
        both_finite = small == big
        assert (h not in kept) == both_finite


def test_prune_is_idempotent():
    for name in FULL_UBS:
        T = fixture(name)
        once = prune(T, full(T))
        assert prune(T, once) == once


def test_weird_full_set_is_already_pruned():
    T = fixture("weird")
    assert prune(T, full(T)) == full(T)


def test_prune_rejects_non_ubs():
    with pytest.raises(DomainError):
        prune(fixture("weird"), UBSDescriptor({"B": 0, "D": 0}))


def test_pruned_hyperplanes_have_one_canonical_side():
    for name in FULL_UBS:
        T = fixture(name)
        S = prune(T, full(T))
        for h in S.members_below(5):
            s = canonical_sign(T, S, h)
            assert s in (1, -1)
            plus, minus = side_counts(T, S, h, 40)
            assert (plus if s > 0 else minus) > (minus if s > 0 else plus)


# ---------------------------------------------------------------- decomposition

def labels(components):
    return [c.ubs_class.label for c in components]


def test_staircase_decomposition_order():
    assert labels(minimal_decomposition(fixture("stair-lin"), full(fixture("stair-lin")))) == ["V", "H"]


def test_weird_components():
    T = fixture("weird")
    assert sorted(labels(minimal_decomposition(T, full(T)))) == ["B", "D", "S"]
    assert [str(c) for c in minimal_classes(T)] == ["[B]", "[D]", "[S]"]


def test_single_tail_is_its_own_component():
    T = fixture("weird")
    assert labels(minimal_decomposition(T, UBSDescriptor({"B": 3}))) == ["B"]


@pytest.mark.parametrize("name", FULL_UBS)
def test_later_components_cross_earlier_ones_cofinitely(name):
    T = fixture(name)
    comps = minimal_decomposition(T, full(T))
    for i, later in enumerate(comps):
        for earlier in comps[:i]:
            for f in later.ubs_class.families:
                for g in earlier.ubs_class.families:
                    h = (f, 2)
                    assert crossing_defect(T, h, g, 20) == crossing_defect(T, h, g, 40)


@pytest.mark.parametrize("name", FULL_UBS + ["disjoint-union"])
def test_decomposition_soundness(name):
    T = fixture(name)
    for A in ubs_classes(T):
        comps = minimal_decomposition(T, canonical_descriptor(T, A))
        united = set()
        for c in comps:
            assert not united & set(c.ubs_class.families)
            united |= set(c.ubs_class.families)
        assert UBSClass(tuple(united)) == A
        below = {B for B in ubs_classes(T) if preceq(T, B, A)}
        assert set(classes_below(T, A)) == below


# ---------------------------------------------------------------- dominance

def test_dominant_fixture():
    T = fixture("dominant")
    assert labels(dominant_components(T, full(T))) == ["H"]


def test_staircase_dominant():
    T = fixture("stair-lin")
    assert labels(dominant_components(T, full(T))) == ["H"]


def test_minimal_set_is_vacuously_dominant():
    T = fixture("weird")
    assert labels(dominant_components(T, UBSDescriptor({"S": 0}))) == ["S"]


@pytest.mark.parametrize("name", FULL_UBS)
def test_dominant_hyperplanes_cross_cofinitely(name):
    T = fixture(name)
    S = full(T)
    for comp in dominant_components(T, S):
        outside = [f for f in T.families if f not in comp.ubs_class.families]
        for f in comp.ubs_class.families:
            for g in outside:
                h = (f, 3)
                assert crossing_defect(T, h, g, 16) == crossing_defect(T, h, g, 32)


@pytest.mark.parametrize("name", FULL_UBS)
def test_every_hyperplane_sees_a_dominant_one(name):
    T = fixture(name)
    S = prune(T, full(T))
    P = T.truncate(16)
    dominant = [f for c in dominant_components(T, S) for f in c.ubs_class.families]
    for u in S.members_below(8):
        s = canonical_sign(T, S, u)
        assert any(side_of(P, (f, j), u) == s for f in dominant for j in range(16) if (f, j) != u)


# ---------------------------------------------------------------- order and dimension

def test_staircase_order():
    T = fixture("stair-lin")
    assert preceq(T, UBSClass(("V",)), UBSClass(("V", "H")))
    assert not preceq(T, UBSClass(("V", "H")), UBSClass(("H",)))


def test_order_is_reflexive(tiered):
    for T in tiered.values():
        assert all(preceq(T, A, A) for A in ubs_classes(T))


def test_weird_top_dimension():
    T = fixture("weird")
    assert dimension(T, UBSClass(("B", "S", "D"))) == 3


def test_dimension_bounded_by_truncations(tiered):
    from cubebound.cubecomplex import realize
    for T in tiered.values():
        dim = realize(T.truncate(4), check=False).dimension
        assert all(dimension(T, A) <= dim for A in ubs_classes(T))


def test_weird_classes():
    T = fixture("weird")
    assert [str(c) for c in ubs_classes(T)] == ["[B]", "[D]", "[S]", "[B+S]", "[D+S]", "[B+D+S]"]
