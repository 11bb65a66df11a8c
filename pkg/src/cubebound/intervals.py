"""Sets of natural numbers stored as finitely many half-open intervals.

The last interval may be unbounded (``end is None``); such a set is "a tail
plus finitely many extras", which is how every infinite hyperplane set in a
tiered pocset is represented.
"""
from __future__ import annotations

from typing import Iterable, Iterator

INF = None


class IntervalSet:
    __slots__ = ("parts",)

    def __init__(self, parts: Iterable[tuple[int, int | None]] = ()):
        self.parts: tuple = _normalize(parts)

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "IntervalSet":
        return cls((i, i + 1) for i in indices)

    @classmethod
    def tail(cls, start: int) -> "IntervalSet":
        return cls([(start, INF)])

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls()

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return f"IntervalSet({list(self.parts)})"

    def __bool__(self):
        return bool(self.parts)

    def __contains__(self, i: int) -> bool:
        for s, e in self.parts:
            if i < s:
                return False
            if e is None or i < e:
                return True
        return False

    @property
    def infinite(self) -> bool:
        return bool(self.parts) and self.parts[-1][1] is None

    @property
    def tail_start(self) -> int | None:
        """Least ``t`` with every ``k >= t`` a member, or None for finite sets."""
        return self.parts[-1][0] if self.infinite else None

    def finite_part(self) -> list[int]:
        """Members below the tail start (all members for finite sets)."""
        out = []
        for s, e in self.parts:
            if e is None:
                break
            out.extend(range(s, e))
        return out

    def finite_size(self) -> int:
        return sum(e - s for s, e in self.parts if e is not None)

    def min(self) -> int | None:
        return self.parts[0][0] if self.parts else None

    def endpoints(self) -> list[int]:
        pts = []
        for s, e in self.parts:
            pts.append(s)
            if e is not None:
                pts.append(e)
        return pts

    def irregular_max(self) -> int:
        """Largest finite endpoint; beyond it membership is constant."""
        pts = self.endpoints()
        return max(pts) if pts else 0

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.parts + other.parts)

    def intersects(self, start: int, end: int | None) -> bool:
        for s, e in self.parts:
            lo = max(s, start)
            if end is None and e is None:
                return True
            hi = e if end is None else (end if e is None else min(e, end))
            if lo < hi:
                return True
        return False

    def first_in(self, start: int, end: int | None) -> int | None:
        for s, e in self.parts:
            lo = max(s, start)
            hi_candidates = [x for x in (e, end) if x is not None]
            hi = min(hi_candidates) if hi_candidates else None
            if hi is None or lo < hi:
                return lo
        return None

    def members_below(self, bound: int) -> Iterator[int]:
        for s, e in self.parts:
            if s >= bound:
                break
            yield from range(s, bound if e is None else min(e, bound))

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for s, e in self.parts:
            pieces = [(s, e)]
            for os_, oe in other.parts:
                nxt = []
                for ps, pe in pieces:
                    # part before the removed interval
                    if os_ > ps:
                        nxt.append((ps, os_ if pe is None else min(pe, os_)))
                    # part after the removed interval
                    if oe is not None and (pe is None or oe < pe):
                        nxt.append((max(ps, oe), pe))
                pieces = [(a, b) for a, b in nxt if b is None or a < b]
            out.extend(pieces)
        return IntervalSet(out)

    def shifted(self, amount: int) -> "IntervalSet":
        return IntervalSet((max(0, s + amount), None if e is None else max(0, e + amount))
                           for s, e in self.parts)


def _normalize(parts) -> tuple:
    items = []
    for s, e in parts:
        s = max(0, int(s))
        if e is not None:
            e = int(e)
            if e <= s:
                continue
        items.append((s, e))
    items.sort(key=lambda p: p[0])
    merged: list[list] = []
    for s, e in items:
        if merged:
            ps, pe = merged[-1]
            if pe is None:
                continue
            if s <= pe:
                merged[-1][1] = None if e is None else max(pe, e)
                continue
        merged.append([s, e])
    return tuple((s, e) for s, e in merged)
