"""Hyperplane sets of a tiered pocset: per-family interval sets."""
from __future__ import annotations

from typing import Iterable, Mapping

from .errors import DomainError
from .intervals import IntervalSet


class UBSDescriptor:
    """A hyperplane set given family by family.

    Build one from tail starts plus finite add/remove lists; the stored form
    is the normal form (minimal tail starts, no removals), so descriptor
    equality is set equality.
    """

    __slots__ = ("sets",)

    def __init__(self, tails: Mapping[str, int] | None = None,
                 add: Iterable[tuple[str, int]] = (),
                 remove: Iterable[tuple[str, int]] = (),
                 sets: Mapping[str, IntervalSet] | None = None):
        acc: dict[str, IntervalSet] = {}
        for fam, iv in (sets or {}).items():
            acc[fam] = iv
        for fam, start in (tails or {}).items():
            if start is None:
                continue
            acc[fam] = acc.get(fam, IntervalSet()).union(IntervalSet.tail(int(start)))
        for fam, idx in add:
            acc[fam] = acc.get(fam, IntervalSet()).union(IntervalSet.from_indices([int(idx)]))
        removed: dict[str, list[int]] = {}
        for fam, idx in remove:
            removed.setdefault(fam, []).append(int(idx))
        for fam, idxs in removed.items():
            if fam in acc:
                acc[fam] = acc[fam].difference(IntervalSet.from_indices(idxs))
        self.sets = {fam: iv for fam, iv in sorted(acc.items()) if iv}

    @classmethod
    def from_hyperplanes(cls, hyperplanes: Iterable[tuple[str, int]]) -> "UBSDescriptor":
        return cls(add=hyperplanes)

    def get(self, fam: str) -> IntervalSet:
        return self.sets.get(fam, IntervalSet())

    def __eq__(self, other):
        return isinstance(other, UBSDescriptor) and self.sets == other.sets

    def __hash__(self):
        return hash(tuple(self.sets.items()))

    def __contains__(self, h) -> bool:
        fam, idx = h
        return idx in self.get(fam)

    def __repr__(self):
        return f"UBSDescriptor({self.to_dict()})"

    @property
    def infinite(self) -> bool:
        return any(iv.infinite for iv in self.sets.values())

    def tail_families(self) -> tuple[str, ...]:
        return tuple(sorted(f for f, iv in self.sets.items() if iv.infinite))

    def tails(self) -> dict[str, int]:
        return {f: iv.tail_start for f, iv in self.sets.items() if iv.infinite}

    def finite_members(self) -> list[tuple[str, int]]:
        return [(f, i) for f, iv in self.sets.items() for i in iv.finite_part()]

    def members_below(self, bound: int) -> list[tuple[str, int]]:
        return [(f, i) for f, iv in self.sets.items() for i in iv.members_below(bound)]

    def irregular_max(self) -> int:
        return max((iv.irregular_max() for iv in self.sets.values()), default=0)

    def union(self, other: "UBSDescriptor") -> "UBSDescriptor":
        fams = set(self.sets) | set(other.sets)
        return UBSDescriptor(sets={f: self.get(f).union(other.get(f)) for f in fams})

    def difference(self, other: "UBSDescriptor") -> "UBSDescriptor":
        return UBSDescriptor(sets={f: iv.difference(other.get(f)) for f, iv in self.sets.items()})

    def issubset(self, other: "UBSDescriptor") -> bool:
        return not self.difference(other).sets

    def commensurate(self, other: "UBSDescriptor") -> bool:
        """Finite symmetric difference."""
        return not self.difference(other).infinite and not other.difference(self).infinite

    def to_dict(self) -> dict:
        tails = self.tails()
        return {"tails": {f: tails[f] for f in sorted(tails)},
                "add": [[f, i] for f, i in sorted(self.finite_members())],
                "remove": []}

    @classmethod
    def from_dict(cls, data: Mapping) -> "UBSDescriptor":
        if not isinstance(data, Mapping):
            raise DomainError("descriptor must be a mapping")
        return cls(tails=data.get("tails", {}),
                   add=[tuple(x) for x in data.get("add", [])],
                   remove=[tuple(x) for x in data.get("remove", [])])
