"""Finite pocsets: half-space systems with an involution and a nesting order.

A hyperplane is identified by its label (an int for hand-written pocsets, a
``(family, index)`` tuple for truncations of tiered pocsets).  For an ordered
pair of distinct hyperplanes ``(h, k)`` the relation is either transverse or a
nesting ``h^e ⊂ k^d`` with signs ``e, d`` in ``{+1, -1}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable, NamedTuple

import numpy as np

from .errors import DomainError

PLUS = 1
MINUS = -1


def sign_char(s: int) -> str:
    return "+" if s > 0 else "-"


def format_label(label) -> str:
    if isinstance(label, tuple) and len(label) == 2:
        return f"{label[0]}{label[1]}"
    return str(label)


@dataclass(frozen=True)
class Relation:
    """Relation of an ordered hyperplane pair ``(h, k)``.

    ``nest`` is ``None`` for transverse pairs, otherwise ``(e, d)`` meaning the
    half-space ``h^e`` is strictly contained in ``k^d``.
    """

    nest: tuple[int, int] | None = None

    @property
    def transverse(self) -> bool:
        return self.nest is None

    @property
    def nested(self) -> bool:
        return self.nest is not None

    def transposed(self) -> "Relation":
        if self.nest is None:
            return self
        e, d = self.nest
        return Relation((-d, -e))

    def disjoint_signs(self) -> tuple[int, int] | None:
        """Orientations ``(a, b)`` with ``h^a ∩ k^b`` empty, if any."""
        if self.nest is None:
            return None
        e, d = self.nest
        return (e, -d)

    def __str__(self) -> str:
        if self.nest is None:
            return "transverse"
        e, d = self.nest
        return f"a{sign_char(e)} < b{sign_char(d)}"


TRANSVERSE = Relation(None)


class HalfSpace(NamedTuple):
    hyperplane: Hashable
    sign: int

    def __str__(self) -> str:
        return f"{format_label(self.hyperplane)}{sign_char(self.sign)}"


@dataclass
class ValidationReport:
    valid: bool
    violations: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"valid": self.valid, "violations": list(self.violations), "notes": list(self.notes)}


class FinitePocset:
    """A finite pocset stored as two sign matrices.

    ``E[i, j] == 0`` marks a transverse pair; otherwise ``(E[i, j], D[i, j])``
    is the nesting ``h_i^E ⊂ h_j^D``.  Relations are supplied per ordered pair;
    a missing pair defaults to the transpose of its partner, and to transverse
    when neither direction is given.  Conflicting directions are kept as given
    so that :meth:`validate` can report them.
    """

    def __init__(self, labels: Iterable[Hashable], relations: dict | None = None):
        self.labels: tuple = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise DomainError("hyperplane ids must be unique")
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        n = len(self.labels)
        self.E = np.zeros((n, n), dtype=np.int8)
        self.D = np.zeros((n, n), dtype=np.int8)
        given = set()
        for (h, k), rel in (relations or {}).items():
            i, j = self.index(h), self.index(k)
            if i == j:
                raise DomainError(f"relation of {format_label(h)} with itself")
            if not isinstance(rel, Relation):
                rel = Relation(tuple(rel) if rel is not None else None)
            self._put(i, j, rel)
            given.add((i, j))
        for i, j in list(given):
            if (j, i) not in given:
                rel = self._get(i, j).transposed()
                self._put(j, i, rel)

    @classmethod
    def from_matrices(cls, labels, E, D) -> "FinitePocset":
        P = cls.__new__(cls)
        P.labels = tuple(labels)
        P._index = {lab: i for i, lab in enumerate(P.labels)}
        P.E = np.asarray(E, dtype=np.int8).copy()
        P.D = np.asarray(D, dtype=np.int8).copy()
        return P

    def _put(self, i, j, rel: Relation):
        if rel.nest is None:
            self.E[i, j] = 0
            self.D[i, j] = 0
        else:
            self.E[i, j], self.D[i, j] = rel.nest

    def _get(self, i, j) -> Relation:
        if self.E[i, j] == 0:
            return TRANSVERSE
        return Relation((int(self.E[i, j]), int(self.D[i, j])))

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self):
        return self.n

    def index(self, h) -> int:
        try:
            return self._index[h]
        except (KeyError, TypeError):
            raise DomainError(f"unknown hyperplane id {h!r}") from None

    def relate(self, h, k) -> Relation:
        i, j = self.index(h), self.index(k)
        if i == j:
            raise DomainError("relate needs two distinct hyperplanes")
        return self._get(i, j)

    def relate_index(self, i: int, j: int) -> Relation:
        return self._get(i, j)

    def side_matrix(self) -> np.ndarray:
        """``S[m, h]`` is the side of hyperplane ``h`` relative to ``m`` (0 if transverse)."""
        return (-self.E).astype(np.int8)

    def separates(self, m, h, k) -> bool:
        i, a, b = self.index(m), self.index(h), self.index(k)
        if i in (a, b):
            return False
        sa, sb = -self.E[i, a], -self.E[i, b]
        return sa != 0 and sb != 0 and sa != sb

    def transverse_matrix(self) -> np.ndarray:
        T = self.E == 0
        np.fill_diagonal(T, False)
        return T

    def restrict(self, labels: Iterable[Hashable]) -> "FinitePocset":
        keep = [self.index(h) for h in labels]
        idx = np.array(keep, dtype=int)
        return FinitePocset.from_matrices([self.labels[i] for i in keep],
                                          self.E[np.ix_(idx, idx)], self.D[np.ix_(idx, idx)])

    def relations(self) -> dict:
        """All relations for ordered pairs ``i < j``, keyed by labels."""
        out = {}
        for i, j in combinations(range(self.n), 2):
            out[(self.labels[i], self.labels[j])] = self._get(i, j)
        return out

    def is_consistent(self, orientation) -> bool:
        """True when no two chosen half-spaces are disjoint."""
        o = np.asarray(orientation, dtype=np.int8)
        # h_i^e ⊂ h_j^d forbids o_i == e together with o_j == -d
        bad = (self.E != 0) & (self.E == o[:, None]) & (self.D == -o[None, :])
        return not bad.any()

    def validate(self) -> ValidationReport:
        violations = []
        n = self.n
        for i, j in combinations(range(n), 2):
            if self._get(i, j) != self._get(j, i).transposed():
                violations.append(
                    f"asymmetric relation between {format_label(self.labels[i])} and "
                    f"{format_label(self.labels[j])}: {self._get(i, j)} vs {self._get(j, i)}")
        if np.any(np.diag(self.E) != 0):
            violations.append("a hyperplane is related to itself")
        masks = {(a, b): ((self.E == a) & (self.D == b)).astype(np.int32)
                 for a in (PLUS, MINUS) for b in (PLUS, MINUS)}
        off_diag = ~np.eye(n, dtype=bool)
        reported = set()
        for a in (PLUS, MINUS):
            for b in (PLUS, MINUS):
                for c in (PLUS, MINUS):
                    through = (masks[(a, b)] @ masks[(b, c)]) > 0
                    bad = through & (masks[(a, c)] == 0) & off_diag
                    for i, l in zip(*np.nonzero(bad)):
                        key = (min(i, l), max(i, l))
                        if key in reported:
                            continue
                        reported.add(key)
                        j = int(np.nonzero(masks[(a, b)][i] & masks[(b, c)][:, l])[0][0])
                        hi, hj, hl = (format_label(self.labels[t]) for t in (i, j, l))
                        violations.append(
                            f"non-transitive nesting: {hi}{sign_char(a)} < {hj}{sign_char(b)} < "
                            f"{hl}{sign_char(c)} but {hi} vs {hl} is {self._get(i, l)}")
                        if len(reported) > 50:
                            break
        return ValidationReport(valid=not violations, violations=violations)


def facing_tuples(P: FinitePocset, t: int) -> list[tuple[HalfSpace, ...]]:
    """All ``t``-sets of hyperplanes with orientations whose half-spaces are pairwise disjoint.

    Each nested pair has exactly one disjoint orientation, so a facing tuple
    carries a unique orientation.  Output is lexicographic in hyperplane order.
    """
    if t < 2:
        raise DomainError("facing tuples need t >= 2")
    n = P.n
    E, D = P.E, P.D
    out = []

    def extend(chosen, signs, start):
        if len(chosen) == t:
            out.append(tuple(HalfSpace(P.labels[i], s) for i, s in zip(chosen, signs)))
            return
        for j in range(start, n):
            sj = None
            ok = True
            for i, si in zip(chosen, signs):
                if E[i, j] == 0 or E[i, j] != si:
                    ok = False
                    break
                need = -int(D[i, j])
                if sj is None:
                    sj = need
                elif sj != need:
                    ok = False
                    break
            if ok:
                extend(chosen + [j], signs + [sj], j + 1)

    for i in range(n):
        for s in (PLUS, MINUS):
            extend([i], [s], i + 1)
    out.sort(key=lambda tup: [P.index(h.hyperplane) for h in tup])
    return out


def inseparable_closure(P: FinitePocset, S: Iterable[Hashable]) -> frozenset:
    """Least superset of ``S`` containing every hyperplane separating two of its members."""
    member = np.zeros(P.n, dtype=bool)
    for h in S:
        member[P.index(h)] = True
    side = P.side_matrix()
    while True:
        plus = ((side == 1) & member[None, :]).any(axis=1)
        minus = ((side == -1) & member[None, :]).any(axis=1)
        grow = plus & minus & ~member
        if not grow.any():
            break
        member |= grow
    return frozenset(P.labels[i] for i in np.nonzero(member)[0])


def separating_witness(P: FinitePocset, S: Iterable[Hashable]):
    """Return ``(h, k, m)`` with ``m`` outside ``S`` separating members ``h, k``, or None."""
    members = [P.index(h) for h in S]
    inside = set(members)
    side = P.side_matrix()
    for m in range(P.n):
        if m in inside:
            continue
        pos = [h for h in members if side[m, h] == 1]
        neg = [h for h in members if side[m, h] == -1]
        if pos and neg:
            return (P.labels[min(neg)], P.labels[min(pos)], P.labels[m])
    return None
