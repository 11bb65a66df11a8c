"""Roller classes of tiered pocsets via deep-family fingerprints.

The umbra of a UBS class ``G`` is the intersection of the canonical
half-spaces of its tails.  Every family is then deep (all its ``+`` sides
contain the umbra), shallow (all its ``-`` sides do) or cut (neither).  The
fingerprint determines the principal Roller class of the umbra.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .cubecomplex import CubeComplex, realize
from .descriptor import UBSDescriptor
from .errors import DomainError
from .intervals import IntervalSet
from .tiered import TieredPocset
from .ubs import UBSClass, is_class, ubs_classes


@dataclass(frozen=True, order=True)
class RollerClass:
    deep: tuple[str, ...]
    shallow: tuple[str, ...]
    cut: tuple[str, ...]

    @property
    def label(self) -> str:
        return "+".join(self.deep)

    def __str__(self):
        return "{" + ",".join(self.deep) + "}"

    def sign(self, family: str) -> int:
        """+1 deep, -1 shallow, 0 cut."""
        if family in self.deep:
            return 1
        if family in self.shallow:
            return -1
        return 0

    def to_dict(self) -> dict:
        return {"deep": list(self.deep), "shallow": list(self.shallow), "cut": list(self.cut)}


def _forced_sign(T: TieredPocset, c: str, a: str) -> int:
    """Sign of ``c`` forced by far ``+`` sides of ``a`` (0 when not forced)."""
    rel = T.eventual_relation(c, a)
    if rel.transverse:
        return 0
    e, d = rel.nest
    # c_k^e ⊂ a_i^d; with d = -1 this reads a_i^+ ⊂ c_k^{-e}
    return -e if d < 0 else 0


def fingerprint(T: TieredPocset, G: Iterable[str]) -> RollerClass:
    deep = set(G)
    shallow: set[str] = set()
    changed = True
    while changed:
        changed = False
        for c in T.families:
            if c in deep or c in shallow:
                continue
            for a in sorted(deep):
                s = _forced_sign(T, c, a)
                if s > 0:
                    deep.add(c)
                    changed = True
                    break
                if s < 0:
                    shallow.add(c)
                    changed = True
                    break
    if deep & shallow:
        raise DomainError("inconsistent fingerprint")
    cut = set(T.families) - deep - shallow
    return RollerClass(tuple(sorted(deep)), tuple(sorted(shallow)), tuple(sorted(cut)))


def umbra(T: TieredPocset, A: UBSClass | Iterable[str]) -> RollerClass:
    """The map R^U: a UBS class to the principal Roller class of its umbra."""
    fams = A.families if isinstance(A, UBSClass) else tuple(A)
    return fingerprint(T, fams)


def class_ubs(T: TieredPocset, v: RollerClass) -> UBSClass:
    """The map U^R: the class of the separators from the origin to ``v``."""
    A = UBSClass(v.deep)
    if not is_class(T, A.families):
        raise DomainError(f"deep set of {v} is not a UBS class")
    return A


def leq(v: RollerClass, w: RollerClass) -> bool:
    return set(v.deep) <= set(w.deep) and set(v.shallow) <= set(w.shallow)


def l1_visible(T: TieredPocset, A: UBSClass) -> bool:
    return class_ubs(T, umbra(T, A)) == A


@dataclass
class RollerPoset:
    classes: list[RollerClass]
    order: list[tuple[int, int]]  # (i, j) with classes[i] < classes[j]

    def leq(self, i: int, j: int) -> bool:
        return i == j or (i, j) in set(self.order)

    def maximal(self) -> list[RollerClass]:
        below = {i for i, _ in self.order}
        return [c for k, c in enumerate(self.classes) if k not in below]

    def covers(self) -> list[tuple[int, int]]:
        rel = set(self.order)
        return [(i, j) for i, j in self.order
                if not any((i, k) in rel and (k, j) in rel for k in range(len(self.classes)))]

    def to_dict(self) -> dict:
        return {"classes": [str(c) for c in self.classes],
                "edges": [[str(self.classes[i]), str(self.classes[j])] for i, j in self.covers()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_dot(self) -> str:
        lines = ["digraph roller {"]
        for c in self.classes:
            lines.append(f'  "{c}";')
        for i, j in self.covers():
            lines.append(f'  "{self.classes[i]}" -> "{self.classes[j]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def enumerate_classes(T: TieredPocset) -> RollerPoset:
    key = ("roller",)
    if key not in T._memo:
        found = sorted({umbra(T, A) for A in ubs_classes(T)},
                       key=lambda c: (len(c.deep), c.deep))
        order = [(i, j) for i, j in ((i, j) for i in range(len(found)) for j in range(len(found)))
                 if i != j and leq(found[i], found[j])]
        T._memo[key] = RollerPoset(found, order)
    return T._memo[key]


# ---------------------------------------------------------------- vertices and paths

def separators(T: TieredPocset, x: dict[str, int], v: RollerClass) -> UBSDescriptor:
    """Hyperplanes separating the vertex with counts ``x`` from the principal point of ``v``."""
    sets = {}
    for c in T.families:
        m = int(x.get(c, 0))
        s = v.sign(c)
        if s > 0:
            sets[c] = IntervalSet.tail(m)
        elif s < 0 and m > 0:
            sets[c] = IntervalSet([(0, m)])
    return UBSDescriptor(sets=sets)


def counts_of(X: CubeComplex, v: int) -> dict[str, int]:
    """Per-family counts of a truncation vertex (its ``+`` sets are initial segments)."""
    out: dict[str, int] = {}
    for i, (fam, idx) in enumerate(X.pocset.labels):
        out.setdefault(fam, 0)
        if (v >> i) & 1:
            out[fam] += 1
    return out


def vertex_of(X: CubeComplex, counts: dict[str, int]) -> int:
    v = 0
    for i, (fam, idx) in enumerate(X.pocset.labels):
        if idx < counts.get(fam, 0):
            v |= 1 << i
    if v not in X:
        raise DomainError(f"counts {counts} are not a vertex of the truncation")
    return v


def principal_counts(T: TieredPocset, v: RollerClass, x: dict[str, int], N: int) -> dict[str, int]:
    """Counts in ``truncate(T, N)`` of the gate of ``x`` toward the class ``v``."""
    out = {}
    for c in T.families:
        s = v.sign(c)
        out[c] = N if s > 0 else (0 if s < 0 else min(int(x.get(c, 0)), N))
    return out


def normal_cube_path(T: TieredPocset, x: dict[str, int], v: RollerClass, k: int) -> list[dict[str, int]]:
    """First ``k`` steps of the normal cube path from ``x`` toward the Roller class ``v``."""
    N = max([0] + [int(t) for t in x.values()]) + k + T.stab
    X = realize(T.truncate(N), check=False)
    start = vertex_of(X, x)
    target = vertex_of(X, principal_counts(T, v, x, N))
    path = X.normal_cube_path(start, target)
    return [counts_of(X, p) for p in path[:k + 1]]
