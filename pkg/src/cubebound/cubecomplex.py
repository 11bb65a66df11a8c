"""CAT(0) cube complexes dual to finite pocsets, and their median algebra.

Vertices are consistent orientations stored as Python ints: bit ``i`` is set
when the vertex lies in the ``+`` half-space of hyperplane ``i``.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import DomainError, ResourceLimitError
from .pocset import FinitePocset, HalfSpace, Relation, format_label

DEFAULT_CAP = 1_000_000


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(x: int) -> list[int]:
    out = []
    i = 0
    while x:
        if x & 1:
            out.append(i)
        x >>= 1
        i += 1
    return out


class CubeComplex:
    def __init__(self, pocset: FinitePocset, vertices: list[int], base: int):
        self.pocset = pocset
        self.n = pocset.n
        self.vertices: list[int] = vertices
        self.base = base
        self._index = {v: i for i, v in enumerate(vertices)}
        self._vset = set(vertices)
        self._conflict = _conflict_masks(pocset)
        self._transverse = _transverse_masks(pocset)
        self._census = None

    # basic queries --------------------------------------------------
    def __contains__(self, v: int) -> bool:
        return v in self._vset

    def name(self, v: int) -> str:
        return "".join("1" if (v >> i) & 1 else "0" for i in range(self.n))

    def vertex(self, spec) -> int:
        """Accept an int, a bitstring, or a sequence of ±1 signs."""
        if isinstance(spec, str):
            if len(spec) != self.n or set(spec) - {"0", "1"}:
                raise DomainError(f"bad vertex name {spec!r}")
            v = sum(1 << i for i, ch in enumerate(spec) if ch == "1")
        elif isinstance(spec, (int, np.integer)):
            v = int(spec)
        else:
            v = sum(1 << i for i, s in enumerate(spec) if s > 0)
        if v not in self._vset:
            raise DomainError(f"{spec!r} is not a vertex")
        return v

    def orientation(self, v: int) -> list[int]:
        return [1 if (v >> i) & 1 else -1 for i in range(self.n)]

    def flippable(self, v: int) -> int:
        """Mask of hyperplanes adjacent to ``v`` (flipping stays consistent)."""
        out = 0
        for h in range(self.n):
            s = 0 if (v >> h) & 1 else 1  # value after the flip
            must_clear, must_set = self._conflict[h][s]
            if (v & must_clear) == 0 and (~v & must_set) == 0:
                out |= 1 << h
        return out

    def neighbors(self, v: int) -> list[int]:
        return [v ^ (1 << h) for h in bits(self.flippable(v))]

    def edges(self) -> list[tuple[int, int, int]]:
        out = []
        for v in self.vertices:
            for h in bits(self.flippable(v)):
                w = v ^ (1 << h)
                if v < w:
                    out.append((v, w, h))
        return out

    def cubes_at(self, v: int, dim: int | None = None) -> list[int]:
        """Masks of pairwise transverse flippable hyperplanes at ``v`` (cubes with corner ``v``)."""
        F = bits(self.flippable(v))
        out = [0]

        def grow(mask, start):
            for t in range(start, len(F)):
                h = F[t]
                if (self._transverse[h] & mask) == mask:
                    m2 = mask | (1 << h)
                    out.append(m2)
                    grow(m2, t + 1)

        grow(0, 0)
        if dim is not None:
            out = [m for m in out if popcount(m) == dim]
        return out

    def census(self) -> dict[int, int]:
        if self._census is None:
            counts: dict[int, int] = {}
            for v in self.vertices:
                for m in self.cubes_at(v):
                    k = popcount(m)
                    counts[k] = counts.get(k, 0) + 1
            self._census = {k: c // (1 << k) for k, c in sorted(counts.items())}
        return dict(self._census)

    @property
    def dimension(self) -> int:
        return max(self.census())

    # median algebra ---------------------------------------------------
    def median(self, x: int, y: int, z: int) -> int:
        return (x & y) | (y & z) | (x & z)

    def separators(self, x: int, y: int) -> list:
        return [self.pocset.labels[i] for i in bits(x ^ y)]

    def d1(self, x: int, y: int) -> int:
        return popcount(x ^ y)

    def interval(self, x: int, y: int) -> "ConvexSubcomplex":
        full = (1 << self.n) - 1
        mask = full & ~(x ^ y)
        return ConvexSubcomplex(self, mask, x & mask)

    def hull(self, S: Iterable[int]) -> "ConvexSubcomplex":
        S = list(S)
        if not S:
            raise DomainError("hull of an empty set")
        full = (1 << self.n) - 1
        agree = full
        for v in S[1:]:
            agree &= ~(v ^ S[0])
        return ConvexSubcomplex(self, agree & full, S[0] & agree & full)

    def halfspace_subcomplex(self, halfspaces: Iterable[HalfSpace]) -> "ConvexSubcomplex":
        mask = values = 0
        for h in halfspaces:
            i = self.pocset.index(h.hyperplane)
            if (mask >> i) & 1 and ((values >> i) & 1) != (h.sign > 0):
                return ConvexSubcomplex(self, 0, 0, empty=True)
            mask |= 1 << i
            if h.sign > 0:
                values |= 1 << i
        return ConvexSubcomplex(self, mask, values)

    def gate(self, C: "ConvexSubcomplex", x: int) -> int:
        members = C.vertex_list()
        if not members:
            raise DomainError("gate onto an empty subcomplex")
        full = (1 << self.n) - 1
        agree = full
        for v in members[1:]:
            agree &= ~(v ^ members[0])
        opposite = agree & (members[0] ^ x)
        g = x ^ opposite
        if g not in C:
            raise DomainError("gate computation left the subcomplex")
        return g

    def separators_to_set(self, x: int, C: "ConvexSubcomplex") -> int:
        """Mask of hyperplanes separating ``x`` from every vertex of ``C``."""
        members = C.vertex_list()
        out = (1 << self.n) - 1
        for v in members:
            out &= v ^ x
        return out

    def normal_cube_path(self, x: int, y: int) -> list[int]:
        """Flip, at each step, the minimal half-spaces containing the current vertex but not ``y``."""
        E, D = self.pocset.E, self.pocset.D
        path = [x]
        v = x
        while v != y:
            A = bits(v ^ y)
            sign = {h: (1 if (v >> h) & 1 else -1) for h in A}
            minimal = []
            for h in A:
                # h^s is not minimal if some k^t ⊂ h^s with k in A
                if not any(k != h and E[k, h] == sign[k] and D[k, h] == sign[h] for k in A):
                    minimal.append(h)
            step = sum(1 << h for h in minimal)
            w = v ^ step
            if w not in self._vset or not all(self._transverse[h] >> k & 1
                                               for h, k in combinations(minimal, 2)):
                raise DomainError("normal cube path step is not a cube")
            path.append(w)
            v = w
        return path

    def bfs_distances(self, source: int) -> dict[int, int]:
        dist = {source: 0}
        q = deque([source])
        while q:
            v = q.popleft()
            for w in self.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    q.append(w)
        return dist

    # export -----------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "hyperplanes": [format_label(h) for h in self.pocset.labels],
            "vertices": sorted(self.name(v) for v in self.vertices),
            "edges": sorted([self.name(a), self.name(b), format_label(self.pocset.labels[h])]
                            for a, b, h in self.edges()),
            "census": {str(k): c for k, c in self.census().items()},
            "dimension": self.dimension,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_dot(self) -> str:
        lines = ["graph cube_complex {"]
        for v in sorted(self.vertices, key=self.name):
            lines.append(f'  "{self.name(v)}";')
        for a, b, h in sorted(self.edges(), key=lambda e: (self.name(e[0]), self.name(e[1]))):
            lab = format_label(self.pocset.labels[h])
            lines.append(f'  "{self.name(a)}" -- "{self.name(b)}" [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass
class ConvexSubcomplex:
    """Intersection of the half-spaces fixed by ``mask`` with values ``values``."""

    complex: CubeComplex
    mask: int
    values: int
    empty: bool = False

    def __contains__(self, v: int) -> bool:
        return not self.empty and v in self.complex and ((v ^ self.values) & self.mask) == 0

    def vertex_list(self) -> list[int]:
        if self.empty:
            return []
        return [v for v in self.complex.vertices if ((v ^ self.values) & self.mask) == 0]

    def halfspaces(self) -> list[HalfSpace]:
        labels = self.complex.pocset.labels
        return [HalfSpace(labels[i], 1 if (self.values >> i) & 1 else -1) for i in bits(self.mask)]


def _conflict_masks(P: FinitePocset):
    """For each hyperplane and new value, masks of bits that must be clear / set."""
    n = P.n
    out = []
    for h in range(n):
        per = []
        for newbit in (0, 1):
            s = 1 if newbit else -1
            must_clear = must_set = 0
            for j in range(n):
                if j == h or P.E[h, j] != s:
                    continue
                # h^s ⊂ j^d forbids o_j = -d
                if P.D[h, j] > 0:
                    must_set |= 1 << j
                else:
                    must_clear |= 1 << j
            per.append((must_clear, must_set))
        out.append(per)
    return out


def _transverse_masks(P: FinitePocset):
    T = P.transverse_matrix()
    return [sum(1 << j for j in np.nonzero(T[h])[0]) for h in range(P.n)]


def base_vertex(P: FinitePocset) -> int:
    """Greedy consistent orientation preferring the minus side, hyperplane by hyperplane."""
    conflict = _conflict_masks(P)
    v = 0
    fixed = 0
    for h in range(P.n):
        for newbit in (0, 1):
            must_clear, must_set = conflict[h][newbit]
            if (v & must_clear & fixed) == 0 and (~v & must_set & fixed) == 0:
                if newbit:
                    v |= 1 << h
                break
        else:
            raise DomainError("no consistent base orientation")
        fixed |= 1 << h
    return v


def realize(P: FinitePocset, cap: int = DEFAULT_CAP, check: bool = True) -> CubeComplex:
    if check:
        report = P.validate()
        if not report.valid:
            raise DomainError("invalid pocset: " + "; ".join(report.violations[:3]))
    base = base_vertex(P)
    conflict = _conflict_masks(P)
    n = P.n
    seen = {base}
    order = [base]
    q = deque([base])
    while q:
        v = q.popleft()
        for h in range(n):
            newbit = 0 if (v >> h) & 1 else 1
            must_clear, must_set = conflict[h][newbit]
            if (v & must_clear) or (~v & must_set):
                continue
            w = v ^ (1 << h)
            if w not in seen:
                seen.add(w)
                order.append(w)
                if len(order) > cap:
                    raise ResourceLimitError(f"vertex count exceeds cap {cap}", best=len(order))
                q.append(w)
    return CubeComplex(P, order, base)


def reconstruct_pocset(X: CubeComplex):
    """Recover hyperplanes and their relations from the 1-skeleton alone.

    Edges are grouped by the Djoković–Winkler relation; each class splits the
    vertices into two half-spaces, and relations are read off from half-space
    containment.  Returns ``(halfspace_pairs, relation)`` where
    ``halfspace_pairs[c] = (minus_side, plus_side)`` as frozensets of vertices,
    oriented by the dual hyperplane of the class's first edge, and
    ``relation[(c, d)]`` is a :class:`Relation`.
    """
    import networkx as nx

    G = nx.Graph()
    G.add_nodes_from(X.vertices)
    for a, b, _ in X.edges():
        G.add_edge(a, b)
    dist = dict(nx.all_pairs_shortest_path_length(G))
    edge_list = sorted(tuple(sorted(e)) for e in G.edges())
    classes: list[list[tuple[int, int]]] = []
    for u, v in edge_list:
        placed = False
        for cls in classes:
            x, y = cls[0]
            if dist[u][x] + dist[v][y] != dist[u][y] + dist[v][x]:
                cls.append((u, v))
                placed = True
                break
        if not placed:
            classes.append([(u, v)])
    sides = []
    for cls in classes:
        u, v = cls[0]
        near_u = frozenset(w for w in X.vertices if dist[w][u] < dist[w][v])
        near_v = frozenset(X.vertices) - near_u
        # orient so that the "+" side is the one holding the larger-int endpoint
        sides.append((near_u, near_v) if u < v else (near_v, near_u))
    relation = {}
    for c, d in combinations(range(len(sides)), 2):
        rel = Relation(None)
        for e, hc in ((-1, sides[c][0]), (1, sides[c][1])):
            for f, hd in ((-1, sides[d][0]), (1, sides[d][1])):
                if hc < hd:
                    rel = Relation((e, f))
        relation[(c, d)] = rel
    return sides, relation


def duality_roundtrip(P: FinitePocset, X: CubeComplex | None = None) -> tuple[bool, str]:
    """Check that the pocset read back from ``realize(P)`` is isomorphic to ``P``."""
    if X is None:
        X = realize(P)
    sides, relation = reconstruct_pocset(X)
    if len(sides) != P.n:
        return False, f"recovered {len(sides)} hyperplanes, expected {P.n}"
    match = {}
    for c, (minus, plus) in enumerate(sides):
        diff = None
        for a in plus:
            for b in minus:
                if X.d1(a, b) == 1:
                    diff = bits(a ^ b)[0]
                    break
            if diff is not None:
                break
        if diff is None or diff in match.values():
            return False, f"class {c} has no unique dual hyperplane"
        if not all((v >> diff) & 1 for v in plus):
            return False, f"class {c} half-spaces do not match hyperplane {diff}"
        match[c] = diff
    for (c, d), rel in relation.items():
        expect = P.relate_index(match[c], match[d])
        if rel != expect:
            return False, (f"relation of {format_label(P.labels[match[c]])} and "
                           f"{format_label(P.labels[match[d]])}: recovered {rel}, expected {expect}")
    return True, "isomorphic"
