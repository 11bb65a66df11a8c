"""Finite abstract simplicial complexes with labeled vertices.

Faces are stored as sorted tuples (sorted by :func:`vkey`), so every listing
and export is deterministic regardless of label type.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Hashable, Iterable, Sequence

from .errors import DomainError

RATIONALS = "Q"
GF2 = "GF2"


def vkey(v):
    if isinstance(v, tuple):
        return (0, tuple(vkey(x) for x in v))
    if isinstance(v, bool):
        return (1, int(v))
    if isinstance(v, int):
        return (1, v)
    if isinstance(v, str):
        return (2, v)
    return (3, repr(v))


def canon(face: Iterable) -> tuple:
    return tuple(sorted(set(face), key=vkey))


class SimplicialComplex:
    def __init__(self, faces: Iterable[Iterable] = (), vertices: Iterable = ()):
        all_faces: set[tuple] = set()
        for f in faces:
            f = canon(f)
            if not f or f in all_faces:
                continue
            for r in range(1, len(f) + 1):
                all_faces.update(combinations(f, r))
        for v in vertices:
            all_faces.add((v,))
        self._faces = frozenset(all_faces)
        self._by_dim: dict[int, list[tuple]] | None = None
        self._maximal: list[tuple] | None = None

    # structure ------------------------------------------------------
    @property
    def faces(self) -> frozenset:
        return self._faces

    def faces_of_dim(self, k: int) -> list[tuple]:
        if self._by_dim is None:
            by: dict[int, list[tuple]] = {}
            for f in self._faces:
                by.setdefault(len(f) - 1, []).append(f)
            self._by_dim = {d: sorted(fs, key=lambda f: [vkey(x) for x in f]) for d, fs in by.items()}
        return list(self._by_dim.get(k, []))

    @property
    def vertices(self) -> list:
        return [f[0] for f in self.faces_of_dim(0)]

    @property
    def dimension(self) -> int:
        return max((len(f) - 1 for f in self._faces), default=-1)

    def __contains__(self, face) -> bool:
        return canon(face) in self._faces

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self._faces == other._faces

    def __hash__(self):
        return hash(self._faces)

    def __len__(self):
        return len(self._faces)

    def __repr__(self):
        return f"SimplicialComplex({self.maximal_faces()})"

    def is_empty(self) -> bool:
        return not self._faces

    def maximal_faces(self) -> list[tuple]:
        if self._maximal is None:
            faces = sorted(self._faces, key=lambda f: (-len(f), [vkey(x) for x in f]))
            keep: list[tuple] = []
            for f in faces:
                sf = set(f)
                if not any(sf < set(g) for g in keep):
                    keep.append(f)
            self._maximal = sorted(keep, key=lambda f: [vkey(x) for x in f])
        return list(self._maximal)

    def f_vector(self) -> list[int]:
        return [len(self.faces_of_dim(k)) for k in range(self.dimension + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    def subcomplex(self, faces: Iterable[Iterable]) -> "SimplicialComplex":
        sub = SimplicialComplex(faces)
        if not sub._faces <= self._faces:
            raise DomainError("faces are not in the complex")
        return sub

    def induced(self, vertices: Iterable) -> "SimplicialComplex":
        vs = set(vertices)
        return SimplicialComplex(f for f in self._faces if set(f) <= vs)

    def intersection(self, other: "SimplicialComplex") -> "SimplicialComplex":
        return SimplicialComplex(self._faces & other._faces)

    def union(self, other: "SimplicialComplex") -> "SimplicialComplex":
        return SimplicialComplex(self._faces | other._faces)

    def relabel(self, mapping: Callable | dict) -> "SimplicialComplex":
        f = mapping if callable(mapping) else mapping.__getitem__
        return SimplicialComplex([f(v) for v in face] for face in self._faces)

    def cone_apexes(self) -> list:
        """Vertices ``v`` with ``σ ∪ {v}`` a face for every face ``σ``."""
        maximal = self.maximal_faces()
        return [v for v in self.vertices if all(v in f for f in maximal)]

    def is_cone(self) -> bool:
        return bool(self.cone_apexes())

    def is_full_in(self, ambient: "SimplicialComplex") -> bool:
        """Every face of ``ambient`` spanned by vertices of ``self`` lies in ``self``."""
        vs = set(self.vertices)
        return all(f in self._faces for f in ambient.faces if set(f) <= vs)

    # export -----------------------------------------------------------
    def to_dict(self) -> dict:
        return {"maximal_faces": [list(map(label_text, f)) for f in self.maximal_faces()],
                "f_vector": self.f_vector()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_dot(self) -> str:
        lines = ["graph complex {"]
        for v in self.vertices:
            lines.append(f'  "{label_text(v)}";')
        for a, b in self.faces_of_dim(1):
            lines.append(f'  "{label_text(a)}" -- "{label_text(b)}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def label_text(v) -> str:
    if isinstance(v, tuple):
        return "(" + ",".join(label_text(x) for x in v) + ")"
    return str(v)


def simplex(vertices: Sequence) -> SimplicialComplex:
    return SimplicialComplex([vertices])


def boundary_of_simplex(vertices: Sequence) -> SimplicialComplex:
    return SimplicialComplex(combinations(vertices, len(vertices) - 1))


# ---------------------------------------------------------------- posets and nerves

def check_partial_order(elements: Sequence, leq: Callable[[object, object], bool]) -> None:
    for a in elements:
        if not leq(a, a):
            raise DomainError(f"relation is not reflexive at {a!r}")
    for a, b in combinations(elements, 2):
        if leq(a, b) and leq(b, a):
            raise DomainError(f"relation is not antisymmetric on {a!r}, {b!r}")
    for a in elements:
        for b in elements:
            if a is b or not leq(a, b):
                continue
            for c in elements:
                if leq(b, c) and not leq(a, c):
                    raise DomainError(f"relation is not transitive on {a!r}, {b!r}, {c!r}")


def order_complex(elements: Sequence, leq: Callable[[object, object], bool],
                  check: bool = True) -> SimplicialComplex:
    """Simplices are the nonempty chains."""
    elements = list(elements)
    if check:
        check_partial_order(elements, leq)
    up = {i: [j for j in range(len(elements)) if j != i and leq(elements[i], elements[j])]
          for i in range(len(elements))}
    maximal_chains: list[list[int]] = []

    def extend(chain):
        nxt = [j for j in up[chain[-1]]]
        # only immediate successors avoid duplicate non-maximal chains
        covers = [j for j in nxt if not any(k in nxt and j in up[k] for k in nxt if k != j)]
        if not covers:
            maximal_chains.append(chain)
            return
        for j in covers:
            extend(chain + [j])

    minimal = [i for i in range(len(elements))
               if not any(i in up[j] for j in range(len(elements)))]
    for i in minimal:
        extend([i])
    return SimplicialComplex([[elements[i] for i in ch] for ch in maximal_chains],
                             vertices=elements)


@dataclass
class Cover:
    """Indexed subcomplexes of a shared complex."""

    ambient: SimplicialComplex
    members: dict

    def verify(self) -> bool:
        union: set = set()
        for sub in self.members.values():
            if not sub.faces <= self.ambient.faces:
                return False
            union |= sub.faces
        return union == set(self.ambient.faces)


def nerve(members: dict | Cover) -> SimplicialComplex:
    """Faces are index sets whose members share a vertex."""
    if isinstance(members, Cover):
        members = members.members
    holders: dict = {}
    for idx, sub in members.items():
        for v in sub.vertices:
            holders.setdefault(v, set()).add(idx)
    faces = [tuple(s) for s in holders.values()]
    return SimplicialComplex(faces, vertices=[i for i, s in members.items() if not s.is_empty()])


# ---------------------------------------------------------------- subdivision

def barycentric(S: SimplicialComplex) -> SimplicialComplex:
    """Vertices are the faces of ``S``; simplices are chains under inclusion."""
    faces = sorted(S.faces, key=lambda f: (len(f), [vkey(x) for x in f]))
    by_top = [f for f in S.maximal_faces()]
    chains = []
    for top in by_top:
        # maximal chains inside one simplex are orderings of its vertices
        for perm in permutations(top):
            chains.append([canon(perm[:r]) for r in range(1, len(perm) + 1)])
    return SimplicialComplex(chains, vertices=faces)


def subdivided(S: SimplicialComplex, sub: SimplicialComplex) -> SimplicialComplex:
    """The subdivision of a subcomplex, as a subcomplex of ``barycentric(S)``."""
    return barycentric(sub)


def complementary(Sprime: SimplicialComplex, sigma: SimplicialComplex) -> SimplicialComplex:
    """Closed simplices of the subdivision disjoint from the subcomplex ``sigma``.

    A simplex of the subdivision is a chain of faces of the original complex;
    it avoids ``|sigma|`` exactly when none of those faces belongs to ``sigma``.
    """
    bad = set(sigma.faces)
    return SimplicialComplex([f for f in Sprime.faces if not any(x in bad for x in f)],
                             vertices=[x for (x,) in Sprime.faces_of_dim(0) if x not in bad])


def open_complement_meets(Sprime: SimplicialComplex, sigmas: Sequence[SimplicialComplex]) -> bool:
    """Whether the open sets ``U_Σ`` (complements of the complementary complexes) share a point.

    ``U_Σ`` is the union of open simplices whose closures meet ``Σ``; a common
    point exists iff some simplex of the subdivision has, for each ``Σ``, a
    vertex that is a face of ``Σ``.
    """
    face_sets = [set(s.faces) for s in sigmas]
    for top in Sprime.maximal_faces():
        if all(any(x in fs for x in top) for fs in face_sets):
            return True
    return False


# ---------------------------------------------------------------- homology

def boundary_rank_q(rows: list[dict[int, int]]) -> int:
    pivots: dict[int, dict[int, Fraction]] = {}
    for row in rows:
        r = {c: Fraction(v) for c, v in row.items() if v}
        while r:
            c = min(r)
            if c in pivots:
                p = pivots[c]
                factor = r[c] / p[c]
                for cc, pv in p.items():
                    nv = r.get(cc, 0) - factor * pv
                    if nv:
                        r[cc] = nv
                    else:
                        r.pop(cc, None)
            else:
                pivots[c] = r
                break
    return len(pivots)


def boundary_rank_gf2(rows: list[int]) -> int:
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                break
    return len(pivots)


def betti(S: SimplicialComplex, field: str = RATIONALS) -> list[int]:
    if S.is_empty():
        return []
    d = S.dimension
    index = {k: {f: i for i, f in enumerate(S.faces_of_dim(k))} for k in range(d + 1)}
    ranks = [0] * (d + 2)
    for k in range(1, d + 1):
        rows_q = []
        rows_2 = []
        lower = index[k - 1]
        for f in S.faces_of_dim(k):
            if field == GF2:
                r = 0
                for t in range(len(f)):
                    r |= 1 << lower[f[:t] + f[t + 1:]]
                rows_2.append(r)
            else:
                rows_q.append({lower[f[:t] + f[t + 1:]]: (-1) ** t for t in range(len(f))})
        ranks[k] = boundary_rank_gf2(rows_2) if field == GF2 else boundary_rank_q(rows_q)
    return [len(index[k]) - ranks[k] - ranks[k + 1] for k in range(d + 1)]


# ---------------------------------------------------------------- collapses

@dataclass
class CollapseResult:
    collapsible: bool
    steps: list[tuple[tuple, tuple]] = field(default_factory=list)
    attempts: int = 0

    def to_dict(self) -> dict:
        return {"collapsible": self.collapsible, "attempts": self.attempts,
                "steps": [[list(map(label_text, a)), list(map(label_text, b))]
                          for a, b in self.steps]}


def _cofaces(faces: set) -> dict:
    up: dict = {f: set() for f in faces}
    for f in faces:
        if len(f) > 1:
            for t in range(len(f)):
                up[f[:t] + f[t + 1:]].add(f)
    return up


def _try_collapse(S: SimplicialComplex, rng: random.Random | None):
    faces = set(S.faces)
    up = _cofaces(faces)
    steps = []
    while len(faces) > 1:
        free = [(f, next(iter(up[f]))) for f in faces
                if len(up[f]) == 1 and not up[next(iter(up[f]))]]
        if not free:
            return False, steps
        if rng is None:
            free.sort(key=lambda p: (-len(p[1]), [vkey(x) for x in p[1]], [vkey(x) for x in p[0]]))
            sigma, tau = free[0]
        else:
            sigma, tau = rng.choice(sorted(free, key=lambda p: ([vkey(x) for x in p[1]],
                                                                 [vkey(x) for x in p[0]])))
        steps.append((sigma, tau))
        for g in (tau, sigma):
            faces.discard(g)
            if len(g) > 1:
                for t in range(len(g)):
                    up[g[:t] + g[t + 1:]].discard(g)
            up.pop(g, None)
    return len(faces) == 1, steps


def collapse_certificate(S: SimplicialComplex, budget: int = 50, seed: int = 0) -> CollapseResult:
    """Greedy elementary collapses with randomized restarts; never returns a false certificate."""
    if S.is_empty():
        return CollapseResult(False)
    rng = random.Random(seed)
    for attempt in range(max(1, budget)):
        ok, steps = _try_collapse(S, None if attempt == 0 else rng)
        if ok and replay_collapse(S, steps):
            return CollapseResult(True, steps, attempt + 1)
    return CollapseResult(False, [], max(1, budget))


def replay_collapse(S: SimplicialComplex, steps) -> bool:
    faces = set(S.faces)
    for sigma, tau in steps:
        sigma, tau = canon(sigma), canon(tau)
        if sigma not in faces or tau not in faces or len(tau) != len(sigma) + 1 \
                or not set(sigma) < set(tau):
            return False
        cof = [g for g in faces if len(g) > len(sigma) and set(sigma) < set(g)]
        if cof != [tau]:
            return False
        faces.discard(sigma)
        faces.discard(tau)
    return len(faces) == 1
