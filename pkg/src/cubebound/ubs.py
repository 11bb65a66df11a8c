"""Unidirectional boundary sets (UBSes) of tiered pocsets.

A UBS is infinite, unidirectional, inseparable and free of facing triples.
Up to finite symmetric difference a UBS is determined by the families in which
it contains a tail, so classes are represented by sorted family tuples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .descriptor import UBSDescriptor
from .errors import DomainError, InternalLimitError, ResourceLimitError
from .intervals import IntervalSet
from .pocset import facing_tuples, format_label
from .tiered import TieredPocset

FACING_MEMBER_CAP = 400


@dataclass(frozen=True, order=True)
class UBSClass:
    families: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "families", tuple(sorted(self.families)))

    @property
    def label(self) -> str:
        return "+".join(self.families)

    def __str__(self):
        return f"[{self.label}]"

    def __iter__(self):
        return iter(self.families)

    def __len__(self):
        return len(self.families)

    def issubset(self, other: "UBSClass") -> bool:
        return set(self.families) <= set(other.families)


@dataclass
class UBSCheck:
    ok: bool
    axiom: str | None = None
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {"ok": self.ok, "axiom": self.axiom, "witness": self.witness}


@dataclass(frozen=True)
class MinimalComponent:
    ubs_class: UBSClass
    generator: str
    shift: int

    def to_dict(self) -> dict:
        return {"class": self.ubs_class.label, "generator": self.generator, "shift": self.shift}


def class_of(S: UBSDescriptor) -> UBSClass:
    return UBSClass(S.tail_families())


def tails_descriptor(families: Iterable[str], start: int = 0) -> UBSDescriptor:
    return UBSDescriptor(tails={f: start for f in families})


def _memo(T: TieredPocset, key, compute):
    if key not in T._memo:
        T._memo[key] = compute()
    return T._memo[key]


# ---------------------------------------------------------------- recognition

def two_sided_hyperplane(T: TieredPocset, S: UBSDescriptor):
    """A hyperplane with infinitely many members of ``S`` on both sides, or None."""
    tails = S.tail_families()
    for c in T.families:
        where: dict[int, str] = {}
        for a in tails:
            side = 1 if a == c else T.eventual_side(c, a)
            if side and side not in where:
                where[side] = a
        if len(where) == 2:
            return {"hyperplane": format_label((c, 0)), "plus_family": where[1],
                    "minus_family": where[-1]}
    return None


def separation_witness(T: TieredPocset, S: UBSDescriptor, m: tuple[str, int]):
    """Members of ``S`` on opposite sides of ``m``: ``{side: hyperplane}``."""
    c, k = m
    found: dict[int, tuple[str, int]] = {}
    for a in T.families:
        M = S.get(a)
        if not M:
            continue
        for s, e, rel in T.pieces(c, k, a):
            if rel is None or rel.transverse:
                continue
            side = -rel.nest[0]
            first = M.first_in(s, e)
            if first is not None and side not in found:
                found[side] = (a, first)
    return found


def facing_window_members(T: TieredPocset, S: UBSDescriptor) -> list[tuple[str, int]]:
    top = S.irregular_max() + T.stab + 4
    members = S.members_below(top)
    if len(members) > FACING_MEMBER_CAP:
        raise ResourceLimitError(f"facing-triple window holds {len(members)} hyperplanes")
    return members


def is_ubs(T: TieredPocset, S: UBSDescriptor) -> UBSCheck:
    if not S.infinite:
        return UBSCheck(False, "infinite", {"reason": "no family contains a tail"})
    two = two_sided_hyperplane(T, S)
    if two is not None:
        return UBSCheck(False, "unidirectional", two)
    closed = T.closure(S)
    if closed != S:
        extra = closed.difference(S)
        fam = next(f for f in T.families if extra.get(f))
        m = (fam, extra.get(fam).min())
        sides = separation_witness(T, S, m)
        return UBSCheck(False, "inseparable", {
            "pair": [format_label(sides[-1]), format_label(sides[1])],
            "separator": format_label(m)})
    members = facing_window_members(T, S)
    triples = facing_tuples(T.finite_pocset(members), 3)
    if triples:
        return UBSCheck(False, "facing-triple",
                        {"triple": [str(h) for h in triples[0]]})
    return UBSCheck(True)


def canonical_sign(T: TieredPocset, S: UBSDescriptor, h: tuple[str, int]) -> int | None:
    """Side of ``h`` containing infinitely many members of ``S`` (None if neither)."""
    c, _ = h
    sides = set()
    for a in S.tail_families():
        side = 1 if a == c else T.eventual_side(c, a)
        if side:
            sides.add(side)
    if len(sides) > 1:
        raise DomainError(f"{format_label(h)} is two-sided for the set")
    return sides.pop() if sides else None


def prune(T: TieredPocset, S: UBSDescriptor) -> UBSDescriptor:
    check = is_ubs(T, S)
    if not check.ok:
        raise DomainError(f"not a UBS ({check.axiom}): {check.witness}")
    keep = {}
    for fam, iv in S.sets.items():
        if canonical_sign(T, S, (fam, 0)) is not None:
            keep[fam] = iv
    return UBSDescriptor(sets=keep)


# ---------------------------------------------------------------- classes

SHIFT_FACTORS = (0, 1, 2, 4, 8)


def is_class(T: TieredPocset, G: Iterable[str]) -> bool:
    """Whether some UBS has tails in exactly the families ``G``."""
    G = UBSClass(tuple(G))
    if not G.families:
        return False

    def compute():
        for f in SHIFT_FACTORS:
            closed = T.closure(tails_descriptor(G.families, f * T.stab))
            if closed.tail_families() == G.families and is_ubs(T, closed).ok:
                return True
        return False

    return _memo(T, ("is_class", G), compute)


def ubs_classes(T: TieredPocset) -> list[UBSClass]:
    if len(T.families) > 16:
        raise ResourceLimitError("class enumeration is capped at 16 families")

    def compute():
        out = []
        for r in range(1, len(T.families) + 1):
            for G in combinations(T.families, r):
                if is_class(T, G):
                    out.append(UBSClass(G))
        return sorted(out, key=lambda c: (len(c), c.families))

    return _memo(T, ("classes",), compute)


def minimal_classes(T: TieredPocset) -> list[UBSClass]:
    classes = ubs_classes(T)
    return [A for A in classes if not any(B != A and B.issubset(A) for B in classes)]


def minimal_class_of(T: TieredPocset, family: str) -> MinimalComponent:
    """Stabilized class of the closure of one family's tail under growing shifts."""

    def compute():
        limit = 4 * T.stab
        prev = None
        for m in range(limit + 1):
            shift = m * T.stab
            cls = class_of(T.closure(tails_descriptor([family], shift)))
            if prev is not None and cls == prev:
                if not is_class(T, cls.families):
                    raise InternalLimitError(f"stabilized closure of {family} is not a UBS class")
                below = [B for B in ubs_classes(T) if B != cls and B.issubset(cls)]
                if below:
                    raise InternalLimitError(
                        f"closure class {cls} of {family} is not minimal (contains {below[0]})")
                return MinimalComponent(cls, family, (m - 1) * T.stab)
            prev = cls
        raise InternalLimitError(f"closure of family {family} did not stabilize "
                                 f"within {limit} shifts")

    return _memo(T, ("minimal_of", family), compute)


def eventually_crosses(T: TieredPocset, Q: Iterable[str], P: Iterable[str]) -> bool:
    """Every member of ``Q`` crosses all but finitely many members of ``P``."""
    return all(T.eventual_relation(q, p).transverse for q in Q for p in P if q != p)


def components(T: TieredPocset, A: UBSClass | Iterable[str]) -> list[MinimalComponent]:
    """Minimal components of a class, ordered so later ones cross cofinitely many earlier ones."""
    A = A if isinstance(A, UBSClass) else UBSClass(tuple(A))

    def compute():
        if not is_class(T, A.families):
            raise DomainError(f"{A} is not a UBS class")
        comps: dict[UBSClass, MinimalComponent] = {}
        for fam in A.families:
            mc = minimal_class_of(T, fam)
            comps.setdefault(mc.ubs_class, mc)
        covered = [f for c in comps for f in c.families]
        if sorted(covered) != list(A.families):
            raise InternalLimitError(f"minimal components of {A} do not partition it")
        remaining = sorted(comps, key=lambda c: c.families)
        ordered = []
        while remaining:
            for P in remaining:
                # P may come next if no other remaining component must precede it
                if all(not (eventually_crosses(T, P, Q) and not eventually_crosses(T, Q, P))
                       for Q in remaining if Q != P):
                    ordered.append(P)
                    remaining.remove(P)
                    break
            else:
                raise InternalLimitError(f"components of {A} admit no crossing order")
        for i, j in combinations(range(len(ordered)), 2):
            if not eventually_crosses(T, ordered[j], ordered[i]):
                raise InternalLimitError(
                    f"component {ordered[j]} does not cross cofinitely many of {ordered[i]}")
        return [comps[c] for c in ordered]

    return _memo(T, ("components", A), compute)


def minimal_decomposition(T: TieredPocset, S: UBSDescriptor) -> list[MinimalComponent]:
    check = is_ubs(T, S)
    if not check.ok:
        raise DomainError(f"not a UBS ({check.axiom}): {check.witness}")
    return components(T, class_of(S))


def dominant_components(T: TieredPocset, S: UBSDescriptor | UBSClass) -> list[MinimalComponent]:
    """Components whose members cross cofinitely many hyperplanes of every other component."""
    if isinstance(S, UBSDescriptor):
        pruned = prune(T, S)
        A = class_of(pruned)
    else:
        A = S
    comps = components(T, A)
    out = []
    for mc in comps:
        others = [f for f in A.families if f not in mc.ubs_class.families]
        if eventually_crosses(T, mc.ubs_class.families, others):
            out.append(mc)
    return out


def preceq(T: TieredPocset, A: UBSClass, B: UBSClass) -> bool:
    mine = {c.ubs_class for c in components(T, A)}
    theirs = {c.ubs_class for c in components(T, B)}
    return mine <= theirs


def dimension(T: TieredPocset, A: UBSClass) -> int:
    return len(components(T, A))


def classes_below(T: TieredPocset, A: UBSClass) -> list[UBSClass]:
    return [B for B in ubs_classes(T) if preceq(T, B, A)]


def canonical_descriptor(T: TieredPocset, A: UBSClass) -> UBSDescriptor:
    """A pruned UBS in class ``A``: the closure of tails from the first working shift."""
    for f in SHIFT_FACTORS:
        closed = T.closure(tails_descriptor(A.families, f * T.stab))
        if closed.tail_families() == A.families and is_ubs(T, closed).ok:
            return prune(T, closed)
    raise DomainError(f"{A} is not a UBS class")
