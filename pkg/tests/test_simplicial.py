import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from cubebound.errors import DomainError
from cubebound.simplicial import (GF2, RATIONALS, Cover, SimplicialComplex, barycentric, betti,
                                  boundary_of_simplex, collapse_certificate, complementary,
                                  nerve, open_complement_meets, order_complex, replay_collapse,
                                  simplex)

from .oracles import dense_betti

TORUS = [(1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 7), (5, 6, 1), (6, 7, 2), (7, 1, 3),
         (1, 2, 6), (2, 3, 7), (3, 4, 1), (4, 5, 2), (5, 6, 3), (6, 7, 4), (7, 1, 5)]
RP2 = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2), (2, 3, 5), (3, 4, 6),
       (4, 5, 2), (5, 6, 3), (6, 2, 4)]
HOLLOW = boundary_of_simplex("abc")


def random_complex(rng, n=8, k=6):
    faces = [rng.sample(range(n), rng.randint(1, 3)) for _ in range(k)]
    return SimplicialComplex(faces)


def random_subcomplex(rng, S):
    tops = S.maximal_faces()
    picked = [f for f in tops if rng.random() < 0.4]
    if not picked:
        picked = [rng.choice(S.faces_of_dim(0))]
    faces = []
    for f in picked:
        r = rng.randint(1, len(f))
        faces.append(rng.sample(f, r))
    return SimplicialComplex(faces)


faces_strategy = st.lists(st.lists(st.integers(0, 6), min_size=1, max_size=4, unique=True),
                          min_size=1, max_size=7)


# ---------------------------------------------------------------- homology

def test_torus():
    S = SimplicialComplex(TORUS)
    assert S.f_vector() == [7, 21, 14]
    assert betti(S, RATIONALS) == betti(S, GF2) == [1, 2, 1]


def test_projective_plane_shows_torsion():
    S = SimplicialComplex(RP2)
    assert betti(S, RATIONALS) == [1, 0, 0]
    assert betti(S, GF2) == [1, 1, 1]


def test_sphere():
    S = boundary_of_simplex("abcd")
    assert betti(S) == [1, 0, 1] and S.euler_characteristic() == 2


def test_small_examples():
    assert betti(HOLLOW) == betti(HOLLOW, GF2) == [1, 1]
    assert betti(simplex("abc")) == [1, 0, 0]


@settings(max_examples=80, deadline=None)
@given(faces_strategy)
def test_betti_matches_dense_ranks(faces):
    S = SimplicialComplex(faces)
    for field in (RATIONALS, GF2):
        assert betti(S, field) == dense_betti(S.maximal_faces(), field)
    assert sum((-1) ** i * b for i, b in enumerate(betti(S))) == S.euler_characteristic()


@settings(max_examples=30, deadline=None)
@given(faces_strategy)
def test_subdivision_preserves_betti(faces):
    S = SimplicialComplex(faces)
    assert betti(barycentric(S)) == betti(S)


def test_subdivision_of_fixture_complexes():
    for S in (SimplicialComplex(TORUS), SimplicialComplex(RP2)):
        B = barycentric(S)
        for field in (RATIONALS, GF2):
            assert betti(B, field) == betti(S, field)


# ---------------------------------------------------------------- order complexes

def test_chain_and_antichain():
    assert order_complex([1, 2, 3], lambda a, b: a <= b) == simplex([1, 2, 3])
    A = order_complex("abc", lambda a, b: a == b)
    assert A.dimension == 0 and len(A.vertices) == 3


def test_order_complex_of_subsets():
    subsets = [frozenset(s) for r in (1, 2) for s in itertools.combinations("abc", r)]
    S = order_complex(subsets, lambda a, b: a <= b)
    # the subdivided boundary of a triangle
    assert S.f_vector() == [6, 6] and betti(S) == [1, 1]


def test_non_order_is_rejected():
    with pytest.raises(DomainError):
        order_complex([1, 2, 3], lambda a, b: True)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.frozensets(st.integers(0, 4), min_size=1), min_size=1, max_size=7, unique=True))
def test_order_complex_faces_are_chains(sets):
    S = order_complex(sets, lambda a, b: a <= b)
    for f in S.faces:
        assert all(a <= b or b <= a for a, b in itertools.combinations(f, 2))
    chains = [c for r in range(1, len(sets) + 1) for c in itertools.combinations(sets, r)
              if all(a <= b or b <= a for a, b in itertools.combinations(c, 2))]
    assert len(S.faces) == len(chains)


# ---------------------------------------------------------------- nerves

def test_nerve_of_edges_of_a_hollow_triangle():
    edges = {i: simplex(e) for i, e in enumerate(itertools.combinations("abc", 2))}
    assert Cover(HOLLOW, edges).verify()
    assert nerve(edges) == boundary_of_simplex([0, 1, 2])


def test_nerve_of_edges_of_a_solid_triangle_is_hollow():
    edges = {i: simplex(e) for i, e in enumerate(itertools.combinations("abc", 2))}
    assert nerve(edges) == boundary_of_simplex([0, 1, 2])


def test_common_point_gives_full_simplex():
    members = {i: simplex(["o", i]) for i in range(4)}
    assert nerve(members) == simplex(range(4))


def test_disjoint_members_give_a_discrete_nerve():
    members = {i: simplex([f"{i}a", f"{i}b"]) for i in range(3)}
    N = nerve(members)
    assert N.dimension == 0 and len(N.vertices) == 3


def test_bad_cover_is_detected():
    assert not Cover(simplex("abc"), {0: simplex("ab")}).verify()


# ---------------------------------------------------------------- subdivision and the same-nerve law

def test_barycentric_triangle():
    B = barycentric(simplex("abc"))
    assert len(B.vertices) == 7 and len(B.faces_of_dim(2)) == 6


def test_complement_of_a_vertex():
    S = simplex("abc")
    B = barycentric(S)
    T = complementary(B, simplex("a"))
    assert ("a",) not in T.vertices
    assert set(T.vertices) == {f for f in S.faces if f != ("a",)}
    assert T.is_full_in(B)
    # the subdivided opposite edge survives
    assert (("b",), ("b", "c")) in T.faces


def test_same_nerve_law():
    rng = random.Random(2024)
    for case in range(100):
        S = random_complex(rng)
        B = barycentric(S)
        sigmas = [random_subcomplex(rng, S) for _ in range(rng.randint(2, 4))]
        shared = set.intersection(*(set(s.vertices) for s in sigmas))
        assert bool(shared) == open_complement_meets(B, sigmas), case
        for s in sigmas:
            assert barycentric(s).is_full_in(B)
            assert complementary(B, s).is_full_in(B)


# ---------------------------------------------------------------- collapses

def test_triangle_collapses_in_three_steps():
    res = collapse_certificate(simplex("abc"))
    assert res.collapsible and len(res.steps) == 3


def test_hollow_triangle_has_no_certificate():
    assert not collapse_certificate(HOLLOW).collapsible


def test_cones_collapse():
    rng = random.Random(8)
    for _ in range(20):
        base = random_complex(rng, n=6, k=4)
        cone = SimplicialComplex([list(f) + ["apex"] for f in base.maximal_faces()])
        assert cone.is_cone()
        res = collapse_certificate(cone, budget=20, seed=3)
        assert res.collapsible and replay_collapse(cone, res.steps)


def test_bad_certificate_fails_replay():
    S = simplex("abc")
    res = collapse_certificate(S)
    assert not replay_collapse(S, list(reversed(res.steps)))


def test_emitters():
    data = HOLLOW.to_dict()
    assert data["f_vector"] == [3, 3]
    assert HOLLOW.to_dot().count("--") == 3
