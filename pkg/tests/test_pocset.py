import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from cubebound.descriptor import UBSDescriptor
from cubebound.document import load_fixture
from cubebound.errors import DomainError
from cubebound.pocset import FinitePocset, Relation, facing_tuples, inseparable_closure
from cubebound.tiered import CrossRule, TieredPocset

from .oracles import naive_closure, pocset_from_points, truncated_closure


def weird():
    return load_fixture("weird").payload


def stair():
    return load_fixture("stair-lin").payload


point_sets = st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2)),
                      min_size=2, max_size=12, unique=True)


# ---------------------------------------------------------------- relate

def test_square_hyperplanes_cross():
    P = load_fixture("square").payload
    assert P.relate("x", "y").transverse


def test_staircase_relations_match_the_drawn_staircase():
    T = stair()
    assert T.relate(("V", 5), ("H", 2)).transverse
    # the vertical wall V1 sits on the shallow side of H3
    assert T.relate(("V", 1), ("H", 3)) == Relation((-1, -1))


def test_staircase_relations_against_lattice_points():
    # cells (i, j) with j <= i of a truncated staircase, walls from the points they bound
    pts = [(i, j) for i in range(6) for j in range(6) if j <= i]
    P, _ = pocset_from_points(pts)
    T = stair()
    for i, j in itertools.product(range(1, 5), repeat=2):
        mine = T.relate(("V", i - 1), ("H", j - 1))
        theirs = P.relate(f"x{i}", f"y{j}")
        assert mine.transverse == theirs.transverse


def test_weird_far_pair_is_nested():
    assert weird().relate(("B", 2), ("D", 7)).nested


def test_relate_is_transpose_symmetric(tiered):
    for T in tiered.values():
        for h, k in itertools.combinations(T.labels(4), 2):
            assert T.relate(k, h) == T.relate(h, k).transposed()


def test_unknown_hyperplane_is_a_domain_error():
    with pytest.raises(DomainError):
        load_fixture("square").payload.relate("x", "nope")
    with pytest.raises(DomainError):
        weird().relate(("Q", 0), ("B", 0))


def test_truncation_coherent_with_rules(tiered):
    for T in tiered.values():
        P = T.truncate(12)
        for h, k in itertools.combinations(P.labels, 2):
            assert P.relate(h, k) == T.relate(h, k)


# ---------------------------------------------------------------- validate

def test_fixtures_are_valid(tiered, finite):
    for P in list(tiered.values()) + list(finite.values()):
        assert P.validate().valid, P


def test_asymmetric_fault_is_reported():
    T = weird()
    rules = list(T.rules) + [CrossRule.from_json({"pair": ["S", "B"], "cross_iff": "never",
                                                  "nest": "a+ < b-"})]
    report = TieredPocset(T.families, rules).validate()
    assert not report.valid
    assert any("(S, B)" in v for v in report.violations)


def test_asymmetric_finite_relation_is_reported():
    P = FinitePocset(["a", "b"], {("a", "b"): Relation((1, 1)), ("b", "a"): Relation(None)})
    report = P.validate()
    assert not report.valid and "a and b" in report.violations[0]


# ---------------------------------------------------------------- truncate

def test_truncated_staircase_has_ten_vertices():
    from .oracles import consistent_orientations
    P = stair().truncate(3)
    assert len(P.labels) == 6
    assert len(consistent_orientations(P)) == 10


def test_first_weird_layer_is_pairwise_transverse():
    P = weird().truncate(1)
    assert all(P.relate(h, k).transverse for h, k in itertools.combinations(P.labels, 2))
    assert len(P.labels) == 3


def test_empty_truncation():
    assert len(weird().truncate(0).labels) == 0


def test_truncations_nest():
    T = weird()
    small, big = T.truncate(5), T.truncate(6)
    for h, k in itertools.combinations(small.labels, 2):
        assert small.relate(h, k) == big.relate(h, k)


# ---------------------------------------------------------------- facing tuples

def test_tripod_has_one_facing_triple():
    assert len(facing_tuples(load_fixture("tripod").payload, 3)) == 1


def test_square_has_no_facing_triple():
    assert facing_tuples(load_fixture("square").payload, 3) == []


def test_weird_truncation_has_no_facing_triple():
    assert facing_tuples(weird().truncate(6), 3) == []


def test_facing_tuples_need_two():
    with pytest.raises(DomainError):
        facing_tuples(load_fixture("square").payload, 1)


# ---------------------------------------------------------------- closure

def test_weird_closure_fills_the_separators():
    P = weird().truncate(8)
    closed = inseparable_closure(P, [("B", 0), ("D", 5)])
    assert {("S", j) for j in range(1, 5)} <= closed
    assert closed == naive_closure(P, [("B", 0), ("D", 5)])


def test_singleton_closure():
    P = weird().truncate(5)
    assert inseparable_closure(P, [("S", 3)]) == {("S", 3)}


def test_horizontal_tail_is_closed():
    T = stair()
    S = UBSDescriptor({"H": 0})
    assert T.closure(S) == S


@settings(max_examples=60, deadline=None)
@given(point_sets, st.data())
def test_closure_operator_laws(points, data):
    P, _ = pocset_from_points(points)
    labels = list(P.labels)
    A = set(data.draw(st.lists(st.sampled_from(labels), unique=True))) if labels else set()
    B = A | set(data.draw(st.lists(st.sampled_from(labels), unique=True))) if labels else set()
    cA, cB = inseparable_closure(P, A), inseparable_closure(P, B)
    assert A <= cA
    assert cA <= cB
    assert inseparable_closure(P, cA) == cA
    assert cA == naive_closure(P, A)


@pytest.mark.parametrize("name", ["stair-lin", "stair-sub", "weird", "dominant", "quarterplane",
                                  "interleave", "disjoint-union"])
def test_symbolic_closure_matches_truncations(tiered, name):
    T = tiered[name]
    rng = random.Random(7)
    band = T.stab + 2
    for _ in range(25):
        tails = {f: rng.randint(0, 5) for f in T.families if rng.random() < 0.5}
        add = [(rng.choice(T.families), rng.randint(0, 8)) for _ in range(rng.randint(0, 2))]
        S = UBSDescriptor(tails, add=add)
        closed = T.closure(S)
        for N in (16, 32):
            members = S.members_below(N)
            brute = truncated_closure(T, members, N)
            lo = N - 2 * band
            assert {h for h in brute if h[1] < lo} == set(closed.members_below(lo)), (S, N)
