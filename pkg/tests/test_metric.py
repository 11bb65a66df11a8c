import itertools
import math
import random

import pytest

from cubebound.cubecomplex import realize
from cubebound.document import load_fixture
from cubebound.errors import DomainError, ResourceLimitError
from cubebound.metric import (Rescaling, embed_interval, l2_distance, validate_rescaling,
                              wall_count_check)

from .oracles import cell_corners, pocset_from_points, polygon_distance, young_cells

FINITE = ["square", "tripod", "rect2x1", "lshape"]
LSHAPE_CELLS = [(0, 0), (1, 0), (0, 1)]


def complex_of(name):
    return realize(load_fixture(name).payload)


def vertex_at(X, point):
    """Vertex of a planar fixture whose walls are named like ``x1`` (the line x = 1/2)."""
    signs = [1 if point["xyz".index(str(h)[0])] >= int(str(h)[1:] or 1) else -1
             for h in X.pocset.labels]
    return X.vertex(signs)


# ---------------------------------------------------------------- exact values

def test_square_diagonal():
    X = complex_of("square")
    assert l2_distance(X, "00", "11").value == pytest.approx(math.sqrt(2), abs=1e-6)


def test_rectangle_diagonal():
    X = complex_of("rect2x1")
    d = l2_distance(X, vertex_at(X, (0, 0)), vertex_at(X, (2, 1))).value
    assert d == pytest.approx(math.sqrt(5), abs=1e-6)


def test_lshape_bends_at_the_reflex_corner():
    X = complex_of("lshape")
    est = l2_distance(X, vertex_at(X, (2, 0)), vertex_at(X, (0, 2)), tol=1e-6)
    assert est.value == pytest.approx(2 * math.sqrt(2), abs=1e-3)


def test_lshape_walls_are_the_drawn_ones():
    P, masks = pocset_from_points(cell_corners(LSHAPE_CELLS))
    F = load_fixture("lshape").payload
    for h, k in itertools.combinations(P.labels, 2):
        assert P.relate(h, k) == F.relate(h, k)


def test_lshape_all_pairs_against_the_polygon():
    X = complex_of("lshape")
    corners = cell_corners(LSHAPE_CELLS)
    for p, q in itertools.combinations(corners, 2):
        d = l2_distance(X, vertex_at(X, p), vertex_at(X, q), tol=1e-6).value
        assert d == pytest.approx(polygon_distance(LSHAPE_CELLS, p, q), abs=1e-3), (p, q)


@pytest.mark.parametrize("rows", [[3, 1], [3, 2, 1], [2, 2, 1], [4, 1, 1]])
def test_young_diagrams_against_the_polygon(rows):
    cells = young_cells(rows)
    P, masks = pocset_from_points(cell_corners(cells))
    X = realize(P)
    rng = random.Random(sum(rows))
    corners = cell_corners(cells)
    for _ in range(6):
        p, q = rng.sample(corners, 2)
        d = l2_distance(X, masks[p], masks[q], tol=1e-6).value
        assert d == pytest.approx(polygon_distance(cells, p, q), abs=1e-3), (p, q)


def test_zero_distance():
    X = complex_of("square")
    assert l2_distance(X, "01", "01").value == 0.0


def test_bad_tolerance():
    with pytest.raises(DomainError):
        l2_distance(complex_of("square"), "00", "11", tol=0)


def test_uncertified_estimate_carries_the_best_value():
    X = complex_of("lshape")
    with pytest.raises(ResourceLimitError) as err:
        l2_distance(X, vertex_at(X, (2, 0)), vertex_at(X, (0, 2)), tol=1e-6, max_levels=0)
    assert err.value.best.value >= 2 * math.sqrt(2) - 1e-9


# ---------------------------------------------------------------- estimate behaviour

def test_grid_values_decrease_and_tour_does_not_exceed_them():
    X = complex_of("lshape")
    est = l2_distance(X, vertex_at(X, (2, 0)), vertex_at(X, (0, 2)), tol=1e-6)
    g = est.grid_values
    assert all(b <= a + 1e-12 for a, b in zip(g, g[1:]))
    assert est.value <= g[-1] + 1e-12


@pytest.mark.parametrize("name", FINITE)
def test_symmetry_and_triangle_inequality(name):
    X = complex_of(name)
    tol = 1e-4
    d = {(x, y): l2_distance(X, x, y, tol=tol).value for x in X.vertices for y in X.vertices}
    for x, y in itertools.combinations(X.vertices, 2):
        assert abs(d[x, y] - d[y, x]) <= 2 * tol
    for x, y, z in itertools.permutations(X.vertices, 3):
        assert d[x, z] <= d[x, y] + d[y, z] + 2 * tol


def test_interval_embedding_is_a_box_union():
    X = complex_of("rect2x1")
    x, y = vertex_at(X, (0, 0)), vertex_at(X, (2, 1))
    E = embed_interval(X, x, y, Rescaling.uniform())
    assert E.dim == 2
    assert sorted(map(tuple, E.coords.values())) == [(a, b) for a in range(3) for b in range(2)] or \
        sorted(map(tuple, E.coords.values())) == [(b, a) for b in range(2) for a in range(3)]


# ---------------------------------------------------------------- rescalings

def test_uniform_rescaling():
    assert validate_rescaling(Rescaling.uniform()) == {"valid": True, "m": 1.0, "M": 1.0}


def test_zero_length_is_rejected():
    with pytest.raises(DomainError):
        validate_rescaling(Rescaling({"x": 0.0}), ["x", "y"])
    with pytest.raises(DomainError):
        validate_rescaling(Rescaling({"x": math.inf}), ["x"])


def test_parity_rescaling():
    labels = [f"h{i}" for i in range(6)]
    rho = Rescaling({h: 1.0 + (i % 2) for i, h in enumerate(labels)})
    report = validate_rescaling(rho, labels)
    assert (report["m"], report["M"]) == (1.0, 2.0)


def test_rescaled_rectangle_distance():
    X = complex_of("rect2x1")
    rho = Rescaling.by_prefix(X.pocset.labels, {"x": 2.0})
    d = l2_distance(X, vertex_at(X, (0, 0)), vertex_at(X, (2, 1)), rho).value
    assert d == pytest.approx(math.sqrt(17), abs=1e-6)


# ---------------------------------------------------------------- wall counts

def test_square_wall_count():
    report = wall_count_check(complex_of("square"))
    assert report["lambda0"] == pytest.approx(math.sqrt(2), abs=1e-3) and report["lambda1"] == 0
    assert report["pass"]


def test_truncated_staircase_wall_count():
    X = realize(load_fixture("stair-lin").payload.truncate(4))
    report = wall_count_check(X)
    assert report["pass"] and report["lambda0"] <= math.sqrt(2) + 0.05


def test_doubled_rectangle_wall_count():
    X = complex_of("rect2x1")
    rho = Rescaling.by_prefix(X.pocset.labels, {"x": 2.0})
    report = wall_count_check(X, rho)
    assert report["pass"] and report["lambda0"] <= 2 * math.sqrt(2)


@pytest.mark.parametrize("name", FINITE)
@pytest.mark.parametrize("factors", [{}, {"x": 2.0}, {"y": 0.5, "a": 3.0}])
def test_wall_count_bounds_on_fixtures(name, factors):
    X = complex_of(name)
    rho = Rescaling.by_prefix(X.pocset.labels, factors)
    report = wall_count_check(X, rho)
    assert report["pass"], report
    m, M = report["m"], report["M"]
    # the fitted constant never beats the rescaling bounds and the dimension
    assert report["lambda0"] <= max(M, 1 / m) * math.sqrt(report["dimension"]) + 1e-3


def test_fractional_lengths_keep_their_value():
    X = complex_of("square")
    rho = Rescaling({"y": 0.5})
    assert l2_distance(X, "00", "11", rho).value == pytest.approx(math.sqrt(1.25), abs=1e-6)
    assert l2_distance(X, "00", "01", rho).value == pytest.approx(0.5, abs=1e-9)
