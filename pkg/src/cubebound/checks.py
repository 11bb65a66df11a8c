"""Randomized identity checks for medians, gates and bridges on a finite complex."""
from __future__ import annotations

import random

from .cubecomplex import ConvexSubcomplex, CubeComplex, popcount


def crossing_mask(C: ConvexSubcomplex) -> int:
    """Hyperplanes with vertices of ``C`` on both sides."""
    members = C.vertex_list()
    out = 0
    for v in members[1:]:
        out |= v ^ members[0]
    return out


def random_convex(X: CubeComplex, rng: random.Random) -> ConvexSubcomplex:
    k = rng.randint(1, min(3, len(X.vertices)))
    return X.hull(rng.sample(X.vertices, k))


def median_failures(X: CubeComplex, rng: random.Random, trials: int) -> list[str]:
    out = []
    dist = {v: X.bfs_distances(v) for v in X.vertices} if len(X.vertices) <= 400 else None
    for _ in range(trials):
        x, y, z, w = (rng.choice(X.vertices) for _ in range(4))
        m = X.median(x, y, z)
        if m not in X:
            out.append(f"median of {X.name(x)},{X.name(y)},{X.name(z)} is not a vertex")
        if {X.median(x, y, z), X.median(y, z, x), X.median(z, x, y), X.median(y, x, z)} != {m}:
            out.append("median is not symmetric")
        if X.median(x, x, y) != x:
            out.append("m(x, x, y) != x")
        if X.median(X.median(x, w, y), w, z) != X.median(x, w, X.median(y, w, z)):
            out.append("median associativity fails")
        for a, b in ((x, y), (y, z), (x, z)):
            if X.d1(a, m) + X.d1(m, b) != X.d1(a, b):
                out.append("median is off a geodesic")
        if dist is not None and dist[x].get(y) != X.d1(x, y):
            out.append("graph distance differs from the wall count")
    return out


def gate_failures(X: CubeComplex, rng: random.Random, trials: int) -> list[str]:
    out = []
    for _ in range(trials):
        C = random_convex(X, rng)
        x, y = rng.choice(X.vertices), rng.choice(X.vertices)
        gx, gy = X.gate(C, x), X.gate(C, y)
        if gx not in C:
            out.append("gate left the subcomplex")
        if (gx ^ x) != X.separators_to_set(x, C):
            out.append(f"wall identity fails at {X.name(x)}")
        if (gx ^ gy) != ((x ^ y) & crossing_mask(C)):
            out.append("gate image walls differ from W(x, y) ∩ W(C)")
        if X.d1(gx, gy) > X.d1(x, y):
            out.append("gate is not 1-lipschitz")
        if any(X.median(x, v, gx) != gx for v in C.vertex_list()[:8]):
            out.append("gate is not the median with points of C")
        z = rng.choice(X.vertices)
        if X.gate(X.interval(x, y), z) != X.median(x, y, z):
            out.append("gate to an interval differs from the median")
    return out


def bridge_failures(X: CubeComplex, rng: random.Random, trials: int) -> list[str]:
    out = []
    for _ in range(trials):
        I, J = random_convex(X, rng), random_convex(X, rng)
        pIJ = X.hull({X.gate(I, v) for v in J.vertex_list()})
        pJI = X.hull({X.gate(J, v) for v in I.vertex_list()})
        want = crossing_mask(I) & crossing_mask(J)
        if not (crossing_mask(pIJ) == crossing_mask(pJI) == want):
            out.append("bridge wall sets differ")
        if len(pIJ.vertex_list()) != len({X.gate(I, v) for v in J.vertex_list()}):
            out.append("image of a gate is not convex")
        meet = set(I.vertex_list()) & set(J.vertex_list())
        if meet and not (set(pIJ.vertex_list()) == set(pJI.vertex_list()) == meet):
            out.append("gates of meeting subcomplexes do not give the intersection")
    return out


def cube_path_failures(X: CubeComplex, rng: random.Random, trials: int) -> list[str]:
    out = []
    for _ in range(trials):
        x, y = rng.choice(X.vertices), rng.choice(X.vertices)
        path = X.normal_cube_path(x, y)
        steps = [a ^ b for a, b in zip(path, path[1:])]
        flipped = 0
        for s in steps:
            if flipped & s:
                out.append("normal cube path crosses a hyperplane twice")
            flipped |= s
        if flipped != x ^ y or sum(popcount(s) for s in steps) != popcount(x ^ y):
            out.append("normal cube path misses a separating hyperplane")
    return out


def algebra_report(X: CubeComplex, trials: int = 100, seed: int = 0) -> dict:
    rng = random.Random(seed)
    result = {
        "median": median_failures(X, rng, trials),
        "gate": gate_failures(X, rng, trials),
        "bridge": bridge_failures(X, rng, trials),
        "normal_cube_path": cube_path_failures(X, rng, trials),
    }
    return {"seed": seed, "trials": trials,
            "failures": {k: sorted(set(v)) for k, v in result.items()},
            "pass": not any(result.values())}

