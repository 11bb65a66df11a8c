"""Cubical cone complexes and the spherical realizations of their Roller classes.

A cone lives in the nonnegative orthant of R^d (d <= 4) and is cut out by
comparisons ``x_i >= x_j``.  A cone may also be a union of pieces, each with
its own coordinate support (coordinates outside it are pinned to 0) and its
own comparisons, glued along shared coordinate faces.

Roller classes are the patterns of coordinates sent to infinity.  Their
realization Q(v) is the cone of ``v`` intersected with the unit sphere,
presented by its extreme rays, which are indicator vectors of up-sets.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np
from scipy.optimize import minimize, nnls

from .errors import DomainError, ParseError, VerificationError
from .simplicial import SimplicialComplex, betti
from .tiered import CrossRule, NestSpec, TieredPocset, parse_predicate

MAX_DIM = 4
EPS = 1e-12

_CONSTRAINT = re.compile(r"^\s*(\w+)\s*(>=|<=)\s*(\w+)\s*$")


@dataclass(frozen=True)
class ConePiece:
    support: tuple[str, ...]
    constraints: tuple[tuple[str, str], ...]  # (i, j) means x_i >= x_j

    def ge(self) -> dict[str, set[str]]:
        """Transitive closure: ``ge[i]`` holds every j with x_i >= x_j implied."""
        out = {c: {c} for c in self.support}
        for i, j in self.constraints:
            out[i].add(j)
        changed = True
        while changed:
            changed = False
            for i in out:
                extra = set().union(*(out[j] for j in out[i])) - out[i]
                if extra:
                    out[i] |= extra
                    changed = True
        return out

    def up_closed(self, S) -> bool:
        ge = self.ge()
        return all(i in S for i in self.support for j in S if j in ge[i])

    def contains(self, x: dict[str, float], coords, tol: float = 1e-9) -> bool:
        for c in coords:
            if c not in self.support and abs(x[c]) > tol:
                return False
            if x[c] < -tol:
                return False
        return all(x[i] >= x[j] - tol for i, j in self.constraints)


def _parse_constraint(text: str, coords) -> tuple[str, str] | None:
    m = _CONSTRAINT.match(str(text))
    if not m:
        raise ParseError(f"unrecognized constraint {text!r}")
    left, op, right = m.groups()
    if op == "<=":
        left, right = right, left
    if right == "0":
        if left not in coords:
            raise ParseError(f"unknown coordinate in {text!r}")
        return None
    if left not in coords or right not in coords or left == right:
        raise ParseError(f"bad coordinates in {text!r}")
    return (left, right)


@dataclass(frozen=True)
class InfinityPattern:
    coords: tuple[str, ...]

    def __str__(self):
        return "{" + ",".join(self.coords) + "}"

    def leq(self, other: "InfinityPattern") -> bool:
        return set(self.coords) <= set(other.coords)


class CubicalCone:
    def __init__(self, coordinates, pieces, name: str = "", source: dict | None = None):
        self.coords: tuple[str, ...] = tuple(coordinates)
        if not 1 <= len(self.coords) <= MAX_DIM:
            raise DomainError(f"cone dimension must be between 1 and {MAX_DIM}")
        if len(set(self.coords)) != len(self.coords):
            raise DomainError("coordinate names must be unique")
        self.pieces: tuple[ConePiece, ...] = tuple(pieces)
        self.name = name
        self._source = source or {}
        self._validate()

    @classmethod
    def from_constraints(cls, coordinates, constraints, name: str = "") -> "CubicalCone":
        coords = tuple(coordinates)
        cons = tuple(c for c in (_parse_constraint(t, coords) for t in constraints) if c)
        return cls(coords, [ConePiece(coords, cons)], name,
                   {"constraints": sorted(constraints)})

    @classmethod
    def from_json(cls, data: dict, name: str = "") -> "CubicalCone":
        coords = tuple(str(c) for c in data["coordinates"])
        if "pieces" in data:
            pieces = []
            for p in data["pieces"]:
                support = tuple(c for c in coords if c in set(p["support"]))
                cons = tuple(c for c in (_parse_constraint(t, coords) for t in p.get("constraints", []))
                             if c)
                if any(i not in support or j not in support for i, j in cons):
                    raise ParseError(f"constraint outside the support of piece {p['support']}")
                pieces.append(ConePiece(support, cons))
            src = {"pieces": [{"support": [c for c in coords if c in set(p["support"])],
                               "constraints": sorted(p.get("constraints", []))}
                              for p in data["pieces"]]}
            return cls(coords, pieces, name, src)
        cone = cls.from_constraints(coords, data.get("constraints", []), name)
        return cone

    def to_json(self) -> dict:
        out = {"coordinates": list(self.coords)}
        out.update(self._source or {"constraints": [f"{i} >= {j}" for i, j in self.pieces[0].constraints]})
        return out

    def _validate(self):
        covered = set()
        for p in self.pieces:
            ge = p.ge()
            for i in p.support:
                for j in ge[i]:
                    if i != j and i in ge[j]:
                        raise DomainError(f"constraints force {i} = {j}; cone is not full-dimensional")
            covered |= set(p.support)
        if covered != set(self.coords):
            raise DomainError("every coordinate must lie in some piece")

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def __repr__(self):
        return f"CubicalCone({self.name or self.coords})"

    # -------------------------------------------------------------- lattice points
    def contains(self, x) -> bool:
        pt = dict(zip(self.coords, x)) if not isinstance(x, dict) else x
        return any(p.contains(pt, self.coords) for p in self.pieces)

    def lattice_points(self, bound: int) -> list[tuple[int, ...]]:
        out = []
        for x in np.ndindex(*([bound + 1] * self.dimension)):
            if self.contains(x):
                out.append(tuple(int(t) for t in x))
        return out

    # -------------------------------------------------------------- tiered model
    def _quadrant(self, a: str, b: str) -> str:
        """When the (a+, b-) quadrant is realized: 'always', 'never' or 'j >= i + 1'."""
        mode = "never"
        for p in self.pieces:
            if a not in p.support:
                continue
            if b in p.support and a in p.ge()[b]:
                mode = "always" if mode == "always" else "j >= i + 1"
            else:
                return "always"
        return mode

    def to_tiered(self) -> TieredPocset:
        """The hyperplane families ``x_c = k + 1/2`` as a tiered pocset."""
        rules = []
        for a, b in combinations(self.coords, 2):
            share = any(a in p.support and b in p.support for p in self.pieces)
            pm, mp = self._quadrant(a, b), self._quadrant(b, a)
            if not share:
                rules.append(CrossRule(a, b, parse_predicate("never"), NestSpec.from_json("a+ < b-")))
            elif pm == "always" and mp == "always":
                rules.append(CrossRule(a, b, parse_predicate("always")))
            elif pm == "always" and mp != "never":
                # (a-, b+) needs x_a <= i < j + 1 <= x_b, impossible when a >= b
                rules.append(CrossRule(a, b, parse_predicate("i >= j + 1"), NestSpec.from_json("b+ < a+")))
            elif mp == "always" and pm != "never":
                rules.append(CrossRule(b, a, parse_predicate("i >= j + 1"), NestSpec.from_json("b+ < a+")))
            else:
                raise DomainError(f"coordinates {a} and {b} are not independent")
        return TieredPocset(self.coords, rules, name=self.name)

    # -------------------------------------------------------------- patterns
    def pieces_for(self, S) -> list[ConePiece]:
        return [p for p in self.pieces if set(S) <= set(p.support) and p.up_closed(set(S))]

    @cached_property
    def patterns(self) -> list[InfinityPattern]:
        out = []
        for r in range(1, self.dimension + 1):
            for S in combinations(self.coords, r):
                if self.pieces_for(S):
                    out.append(InfinityPattern(S))
        return sorted(out, key=lambda v: (len(v.coords), [self.coords.index(c) for c in v.coords]))

    def pattern(self, coords) -> InfinityPattern:
        S = tuple(c for c in self.coords if c in set(coords))
        if not self.pieces_for(S) or not S:
            raise DomainError(f"{set(coords)} is not an admissible pattern")
        return InfinityPattern(S)

    def restricted_piece(self, v: InfinityPattern) -> ConePiece:
        """The comparisons among the coordinates of ``v`` that hold on its face."""
        found = {tuple(sorted((i, j) for i, j in p.constraints if i in v.coords and j in v.coords))
                 for p in self.pieces_for(v.coords)}
        if len(found) != 1:
            raise DomainError(f"pattern {v} lies in pieces with different comparisons")
        return ConePiece(v.coords, found.pop())


def roller_patterns(C: CubicalCone) -> tuple[list[InfinityPattern], list[tuple[int, int]]]:
    """Admissible patterns and the strict order ``(i, j)`` with ``patterns[i] < patterns[j]``."""
    pats = C.patterns
    order = [(i, j) for i in range(len(pats)) for j in range(len(pats))
             if i != j and set(pats[i].coords) <= set(pats[j].coords)]
    return pats, order


# ---------------------------------------------------------------- spherical polytopes

def arc(p, q) -> float:
    return float(math.acos(max(-1.0, min(1.0, float(np.dot(p, q))))))


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n <= EPS:
        raise DomainError("zero vector has no direction")
    return v / n


@dataclass
class SphericalPolytope:
    coords: tuple[str, ...]
    pattern: InfinityPattern
    rays: list[tuple[str, ...]]        # up-sets whose indicators are the extreme rays
    piece: ConePiece

    @cached_property
    def vertices(self) -> np.ndarray:
        return np.array([unit([1.0 if c in r else 0.0 for c in self.coords]) for r in self.rays])

    def contains(self, x, tol: float = 1e-9) -> bool:
        pt = dict(zip(self.coords, np.asarray(x, dtype=float)))
        return self.piece.contains(pt, self.coords, tol)

    def diameter(self) -> float:
        V = self.vertices
        return max((arc(V[a], V[b]) for a in range(len(V)) for b in range(a, len(V))), default=0.0)

    def in_open_hemisphere(self) -> bool:
        s = unit(self.vertices.sum(axis=0))
        return bool(np.all(self.vertices @ s > EPS))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        w = rng.exponential(size=(n, len(self.vertices)))
        pts = w @ self.vertices
        return pts / np.linalg.norm(pts, axis=1, keepdims=True)

    def to_dict(self) -> dict:
        return {"pattern": str(self.pattern),
                "vertices": [[round(float(t), 12) for t in v] for v in self.vertices],
                "rays": ["{" + ",".join(r) + "}" for r in self.rays],
                "diameter": round(self.diameter(), 12)}


def realization(C: CubicalCone, v: InfinityPattern) -> SphericalPolytope:
    piece = C.restricted_piece(v)
    ups = [S for r in range(1, len(v.coords) + 1) for S in combinations(v.coords, r)
           if piece.up_closed(set(S))]
    vecs = {S: np.array([1.0 if c in S else 0.0 for c in C.coords]) for S in ups}
    rays = []
    for S in ups:
        others = [vecs[T] for T in ups if T != S]
        if not others:
            rays.append(S)
            continue
        _, resid = nnls(np.array(others).T, vecs[S])
        if resid > 1e-9:
            rays.append(S)
    return SphericalPolytope(C.coords, v, rays, piece)


def circumcenter(Q: SphericalPolytope) -> tuple[np.ndarray, float]:
    """Minimax center: the normalized nearest point to 0 of the vertices' convex hull.

    The nearest point is found exactly by enumerating affinely independent
    supports of size at most the ambient dimension and keeping the one that
    satisfies the optimality conditions.
    """
    V = Q.vertices
    if Q.diameter() > math.pi / 2 + 1e-9 or not Q.in_open_hemisphere():
        raise DomainError("realization does not lie in an open hemisphere of diameter <= pi/2")
    best = None
    n, d = V.shape
    for r in range(1, min(n, d) + 1):
        for sup in combinations(range(n), r):
            W = V[list(sup)]
            G = W @ W.T
            A = np.block([[G, np.ones((r, 1))], [np.ones((1, r)), np.zeros((1, 1))]])
            rhs = np.concatenate([np.zeros(r), [1.0]])
            try:
                sol = np.linalg.solve(A, rhs)
            except np.linalg.LinAlgError:
                continue
            w = sol[:r]
            if np.any(w < -1e-12):
                continue
            p = w @ W
            pp = float(p @ p)
            if np.all(V @ p >= pp - 1e-10) and (best is None or pp < best[0] - 1e-15):
                best = (pp, p)
    if best is None:
        raise VerificationError("no optimal support found for the circumcenter")
    c = unit(best[1])
    radius = max(arc(c, v) for v in V)
    if radius >= math.pi / 2:
        raise VerificationError(f"circumradius {radius} is not below pi/2")
    return c, radius


def minimax_grid(Q: SphericalPolytope, points: int = 10_000) -> float:
    """Brute-force minimax radius: a barycentric grid over every vertex subset, then a local polish."""
    V = Q.vertices
    n = len(V)
    subsets = [S for r in range(1, n + 1) for S in combinations(range(n), r)]
    per = max(1, points // len(subsets))
    best_val, best_pt = math.inf, V[0]
    for S in subsets:
        k = len(S)
        K = 1
        while k > 1 and math.comb(K + k, k - 1) <= per:
            K += 1
        W = np.array(list(_compositions(K, k)), dtype=float) @ V[list(S)]
        W /= np.linalg.norm(W, axis=1, keepdims=True)
        vals = np.arccos(np.clip(W @ V.T, -1.0, 1.0)).max(axis=1)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_pt = float(vals[i]), W[i]
    res = minimize(lambda x: max(arc(unit(x), v) for v in V), best_pt, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
    return float(min(best_val, res.fun))


def _compositions(K: int, k: int):
    if k == 1:
        yield (K,)
        return
    for first in range(K + 1):
        for rest in _compositions(K - first, k - 1):
            yield (first,) + rest


def deep_set(C: CubicalCone, direction) -> InfinityPattern:
    x = np.asarray(direction, dtype=float)
    if x.shape != (C.dimension,) or not C.contains(x / max(np.linalg.norm(x), EPS)):
        raise DomainError("direction is not in the cone")
    return InfinityPattern(tuple(c for c, t in zip(C.coords, x) if t > 1e-12))


@dataclass
class Pseudocenter:
    point: np.ndarray
    center: np.ndarray
    radius: float
    budget: float
    distance: float
    steps: int
    pattern: InfinityPattern

    def to_dict(self) -> dict:
        return {"point": [round(float(t), 12) for t in self.point],
                "circumcenter": [round(float(t), 12) for t in self.center],
                "radius": round(self.radius, 12), "budget": round(self.budget, 12),
                "distance": round(self.distance, 12), "halvings": self.steps,
                "deep_set": str(self.pattern)}


def pseudocenter(C: CubicalCone, v: InfinityPattern, max_halvings: int = 60) -> Pseudocenter:
    """Move from the circumcenter toward the vertex centroid until strictly inside."""
    Q = realization(C, v)
    c, r = circumcenter(Q)
    g = unit(Q.vertices.sum(axis=0))
    budget = math.pi / 4 - r / 2
    inside = [C.coords.index(k) for k in v.coords]
    for m in range(max_halvings + 1):
        t = 2.0 ** -m
        p = unit((1 - t) * c + t * g)
        if arc(p, c) <= budget + 1e-12 and np.all(p[inside] > 1e-12) and Q.contains(p):
            psi = deep_set(C, p)
            if psi != v:
                raise VerificationError(f"pseudocenter of {v} projects to {psi}")
            return Pseudocenter(p, c, r, budget, arc(p, c), m, psi)
    raise VerificationError(f"no interior point of Q({v}) within {budget} of its circumcenter")


# ---------------------------------------------------------------- visibility and nerve

@dataclass
class ConeNerveReport:
    visible: list[InfinityPattern]
    max_visible: list[InfinityPattern]
    nerve: SimplicialComplex
    betti: dict

    @property
    def agrees(self) -> bool:
        vals = list(self.betti.values())
        return all(v == vals[0] for v in vals)

    def to_dict(self) -> dict:
        return {"visible": [str(v) for v in self.visible],
                "max_visible": [str(v) for v in self.max_visible],
                "nerve": self.nerve.to_dict(), "betti": dict(self.betti), "agrees": self.agrees}


def realizations_meet(C: CubicalCone, patterns) -> bool:
    """Exact: the realizations share a point iff some nonempty set is an up-set in each."""
    common = set.intersection(*(set(v.coords) for v in patterns))
    pieces = [C.restricted_piece(v) for v in patterns]
    for r in range(1, len(common) + 1):
        for S in combinations(sorted(common), r):
            if all(p.up_closed(set(S)) for p in pieces):
                return True
    return False


def visibility_and_nerve(C: CubicalCone) -> ConeNerveReport:
    from .boundaries import roller_complex, simplicial_boundary, trim
    visible = []
    for v in C.patterns:
        try:
            pseudocenter(C, v)
        except VerificationError:
            continue
        visible.append(v)
    maxvis = [v for v in visible if not any(v != w and v.leq(w) for w in visible)]
    faces = [[str(v) for v in S] for r in range(1, len(maxvis) + 1)
             for S in combinations(maxvis, r) if realizations_meet(C, S)]
    N = SimplicialComplex(faces)
    T = C.to_tiered()
    table = {"cone_nerve": trim(betti(N)),
             "roller_complex": trim(betti(roller_complex(T))),
             "simplicial_boundary": trim(betti(simplicial_boundary(T)))}
    return ConeNerveReport(visible, maxvis, N, table)
