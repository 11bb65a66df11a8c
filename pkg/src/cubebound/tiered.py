"""Tiered pocsets: finitely many ℕ-indexed hyperplane chains with threshold crossing rules.

Within a family the "+" half-space of index ``n`` contains every higher
index, so ``a_{n+1}^+ ⊂ a_n^+`` and the all-minus orientation is the origin.
Between two families a :class:`CrossRule` decides crossing by a monotone
predicate in the indices ``(i, j)`` and names the nesting used otherwise.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable

import numpy as np

from .descriptor import UBSDescriptor
from .errors import DomainError, InternalLimitError, ParseError
from .intervals import IntervalSet
from .pocset import (MINUS, PLUS, TRANSVERSE, FinitePocset, Relation,
                     ValidationReport, format_label, sign_char)

BIG = 1 << 62


# ---------------------------------------------------------------- predicates

class Predicate:
    """Monotone crossing predicate on index pairs ``(i, j)``."""

    offset = 0

    def holds(self, i: int, j: int) -> bool:
        raise NotImplementedError

    def bounds_second(self) -> list[Callable[[int], int]]:
        """For fixed ``i``: functions giving the ``j`` where the value may change."""
        return []

    def bounds_first(self) -> list[Callable[[int], int]]:
        """For fixed ``j``: functions giving the ``i`` where the value may change."""
        return []

    def text(self) -> str:
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.text() == other.text()

    def __hash__(self):
        return hash(self.text())

    def __repr__(self):
        return f"<{self.text()}>"


class Always(Predicate):
    def holds(self, i, j):
        return True

    def text(self):
        return "always"


class Never(Predicate):
    def holds(self, i, j):
        return False

    def text(self):
        return "never"


class Threshold(Predicate):
    """``i >= j + c`` or ``i <= j + c``."""

    def __init__(self, op: str, c: int):
        if op not in (">=", "<="):
            raise DomainError(f"bad threshold operator {op}")
        self.op = op
        self.c = int(c)
        self.offset = abs(self.c)

    def holds(self, i, j):
        return i >= j + self.c if self.op == ">=" else i <= j + self.c

    def bounds_second(self):
        c = self.c
        return [lambda i: i - c + 1] if self.op == ">=" else [lambda i: i - c]

    def bounds_first(self):
        c = self.c
        return [lambda j: j + c] if self.op == ">=" else [lambda j: j + c + 1]

    def text(self):
        sign = "+" if self.c >= 0 else "-"
        return f"i {self.op} j {sign} {abs(self.c)}"


class Step(Predicate):
    """``j <= g(i)`` for an unbounded nondecreasing step function ``g``."""

    def __init__(self, kind: str, alpha: Fraction = Fraction(1), beta: Fraction = Fraction(0)):
        if kind not in ("linear", "sqrt", "log"):
            raise DomainError(f"unknown step function {kind}")
        self.kind = kind
        self.alpha = Fraction(alpha)
        self.beta = Fraction(beta)
        if kind == "linear" and self.alpha <= 0:
            raise DomainError("linear step needs a positive slope")
        self.offset = math.ceil(abs(self.beta)) if kind == "linear" else 0

    def g(self, i: int) -> int:
        if self.kind == "linear":
            return math.floor(self.alpha * i + self.beta)
        if self.kind == "sqrt":
            return math.isqrt(i)
        return (i + 1).bit_length() - 1

    def holds(self, i, j):
        return j <= self.g(i)

    def bounds_second(self):
        return [lambda i: self.g(i) + 1]

    def bounds_first(self):
        return [lambda j: least_at_least(self.g, j)]

    def text(self):
        if self.kind == "sqrt":
            return "j <= floor(sqrt(i))"
        if self.kind == "log":
            return "j <= floor(log2(i + 1))"
        return f"j <= floor({self.alpha}*i + {self.beta})"


def least_at_least(f: Callable[[int], int], target: int) -> int:
    """Least ``k >= 0`` with ``f(k) >= target`` for nondecreasing ``f`` (BIG if none)."""
    if f(0) >= target:
        return 0
    hi = 1
    while f(hi) < target:
        hi *= 2
        if hi > BIG:
            return BIG
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if f(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


_NUM = r"[-+]?\d+(?:\.\d+)?(?:/\d+)?"
_THRESH = re.compile(r"^i\s*(>=|<=)\s*j\s*(?:([+-])\s*(\d+))?$")
_LINEAR = re.compile(r"^j\s*<=\s*floor\(\s*(" + _NUM + r")\s*\*\s*i\s*(?:([+-])\s*(\d+(?:\.\d+)?(?:/\d+)?))?\s*\)$")


def parse_predicate(text: str) -> Predicate:
    t = " ".join(str(text).strip().split())
    if t == "always":
        return Always()
    if t == "never":
        return Never()
    m = _THRESH.match(t)
    if m:
        c = int(m.group(3) or 0)
        if m.group(2) == "-":
            c = -c
        return Threshold(m.group(1), c)
    compact = t.replace(" ", "")
    if compact == "j<=floor(sqrt(i))":
        return Step("sqrt")
    if compact == "j<=floor(log2(i+1))":
        return Step("log")
    m = _LINEAR.match(t)
    if m:
        beta = Fraction(m.group(3)) if m.group(3) else Fraction(0)
        if m.group(2) == "-":
            beta = -beta
        try:
            return Step("linear", Fraction(m.group(1)), beta)
        except DomainError as exc:
            raise ParseError(str(exc)) from None
    raise ParseError(f"unrecognized crossing predicate {text!r}")


# ---------------------------------------------------------------- nesting

_VARIANT = re.compile(r"^([ab])\s*([+-])\s*<\s*([ab])\s*([+-])$")


def parse_variant(text: str) -> tuple[int, int]:
    """Parse ``"a+ < b-"`` style text into ``(e, d)`` meaning ``a_i^e ⊂ b_j^d``."""
    m = _VARIANT.match(" ".join(str(text).split()))
    if not m or m.group(1) == m.group(3):
        raise ParseError(f"unrecognized nesting variant {text!r}")
    s1 = PLUS if m.group(2) == "+" else MINUS
    s2 = PLUS if m.group(4) == "+" else MINUS
    if m.group(1) == "a":
        return (s1, s2)
    # b^s1 ⊂ a^s2  is  a^-s2 ⊂ b^-s1
    return (-s2, -s1)


def variant_text(v: tuple[int, int]) -> str:
    return f"a{sign_char(v[0])} < b{sign_char(v[1])}"


@dataclass(frozen=True)
class NestSpec:
    """Nesting used on the non-crossing region, optionally split by a threshold."""

    then: tuple[int, int]
    split: Threshold | None = None
    otherwise: tuple[int, int] | None = None

    def at(self, i: int, j: int) -> tuple[int, int]:
        if self.split is None or self.split.holds(i, j):
            return self.then
        return self.otherwise

    def bounds_second(self):
        return self.split.bounds_second() if self.split else []

    def bounds_first(self):
        return self.split.bounds_first() if self.split else []

    def to_json(self):
        if self.split is None:
            return variant_text(self.then)
        return {"if": self.split.text(), "then": variant_text(self.then),
                "else": variant_text(self.otherwise)}

    @classmethod
    def from_json(cls, data) -> "NestSpec":
        if isinstance(data, str):
            return cls(parse_variant(data))
        if isinstance(data, dict) and {"if", "then", "else"} <= set(data):
            split = parse_predicate(data["if"])
            if not isinstance(split, Threshold):
                raise ParseError("nesting split must be a threshold predicate")
            return cls(parse_variant(data["then"]), split, parse_variant(data["else"]))
        raise ParseError(f"bad nesting specification {data!r}")


@dataclass(frozen=True)
class CrossRule:
    """Relation between family ``a`` (index ``i``) and family ``b`` (index ``j``)."""

    a: str
    b: str
    predicate: Predicate
    nest: NestSpec | None = None

    def __post_init__(self):
        if self.a == self.b:
            raise DomainError("a cross rule needs two distinct families")
        if not isinstance(self.predicate, Always) and self.nest is None:
            raise DomainError(f"rule {self.a}/{self.b} needs a nesting variant")
        if isinstance(self.nest, NestSpec) and self.nest.split is not None \
                and not isinstance(self.predicate, Never):
            raise DomainError("split nestings are only allowed with 'never'")

    def relation(self, i: int, j: int) -> Relation:
        if self.predicate.holds(i, j):
            return TRANSVERSE
        return Relation(self.nest.at(i, j))

    def bounds_second(self):
        out = list(self.predicate.bounds_second())
        if self.nest is not None:
            out += self.nest.bounds_second()
        return out

    def bounds_first(self):
        out = list(self.predicate.bounds_first())
        if self.nest is not None:
            out += self.nest.bounds_first()
        return out

    @property
    def offset(self) -> int:
        off = self.predicate.offset
        if self.nest is not None and self.nest.split is not None:
            off = max(off, self.nest.split.offset)
        return off

    def to_json(self) -> dict:
        out = {"pair": [self.a, self.b], "cross_iff": self.predicate.text()}
        if self.nest is not None:
            out["nest"] = self.nest.to_json()
        return out

    @classmethod
    def from_json(cls, data) -> "CrossRule":
        try:
            a, b = data["pair"]
            pred = parse_predicate(data["cross_iff"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad rule {data!r}") from None
        nest = NestSpec.from_json(data["nest"]) if "nest" in data else None
        try:
            return cls(str(a), str(b), pred, nest)
        except DomainError as exc:
            raise ParseError(str(exc)) from None


# ---------------------------------------------------------------- pocset

class TieredPocset:
    def __init__(self, families: Iterable[str], rules: Iterable[CrossRule],
                 stab: int | None = None, name: str = ""):
        self.families: tuple[str, ...] = tuple(str(f) for f in families)
        if len(set(self.families)) != len(self.families):
            raise DomainError("family ids must be unique")
        self.name = name
        self.rules: tuple[CrossRule, ...] = tuple(rules)
        self._rule: dict[frozenset, CrossRule] = {}
        self._extra: list[CrossRule] = []
        for r in self.rules:
            for f in (r.a, r.b):
                if f not in self.families:
                    raise DomainError(f"rule mentions unknown family {f}")
            key = frozenset((r.a, r.b))
            if key in self._rule:
                self._extra.append(r)
            else:
                self._rule[key] = r
        for a, b in combinations(self.families, 2):
            if frozenset((a, b)) not in self._rule:
                raise DomainError(f"no cross rule for families {a} and {b}")
        max_off = max((r.offset for r in self.rules), default=0)
        self.stab = int(stab) if stab is not None else 2 * max_off + 4
        self._memo: dict = {}

    def __repr__(self):
        return f"TieredPocset({self.name or list(self.families)})"

    # relations ------------------------------------------------------
    def rule(self, a: str, b: str) -> CrossRule:
        return self._rule[frozenset((a, b))]

    def check_hyperplane(self, h) -> tuple[str, int]:
        try:
            fam, idx = h
        except (TypeError, ValueError):
            raise DomainError(f"unknown hyperplane id {h!r}") from None
        if fam not in self.families or not isinstance(idx, int) or idx < 0:
            raise DomainError(f"unknown hyperplane id {h!r}")
        return fam, idx

    def relate(self, h, k) -> Relation:
        a, i = self.check_hyperplane(h)
        b, j = self.check_hyperplane(k)
        if (a, i) == (b, j):
            raise DomainError("relate needs two distinct hyperplanes")
        return self.relate_idx(a, i, b, j)

    def relate_idx(self, a: str, i: int, b: str, j: int) -> Relation:
        if a == b:
            # a_j^+ ⊂ a_i^+ for j > i
            return Relation((MINUS, MINUS)) if i < j else Relation((PLUS, PLUS))
        r = self._rule[frozenset((a, b))]
        if r.a == a:
            return r.relation(i, j)
        return r.relation(j, i).transposed()

    def boundary_funcs(self, c: str, a: str) -> list[Callable[[int], int]]:
        """Monotone functions of ``k`` bounding the pieces of ``i ↦ relate(c_k, a_i)``."""
        if a == c:
            return [lambda k: k, lambda k: k + 1]
        r = self._rule[frozenset((c, a))]
        return r.bounds_second() if r.a == c else r.bounds_first()

    def pieces(self, c: str, k: int, a: str) -> list[tuple[int, int | None, Relation | None]]:
        """Maximal index ranges of family ``a`` on which ``relate(c_k, a_i)`` is constant.

        For ``a == c`` the range holding ``k`` itself carries ``None``.
        """
        if a == c:
            out = []
            if k > 0:
                out.append((0, k, Relation((PLUS, PLUS))))
            out.append((k, k + 1, None))
            out.append((k + 1, None, Relation((MINUS, MINUS))))
            return out
        cuts = sorted({0} | {f(k) for f in self.boundary_funcs(c, a) if f(k) > 0})
        out = []
        for n, s in enumerate(cuts):
            e = cuts[n + 1] if n + 1 < len(cuts) else None
            rel = self.relate_idx(c, k, a, s)
            if out and out[-1][2] == rel:
                out[-1] = (out[-1][0], e, rel)
            else:
                out.append((s, e, rel))
        return out

    def eventual_relation(self, c: str, a: str, k: int = 0) -> Relation:
        """``relate(c_k, a_i)`` for all large ``i``."""
        return self.pieces(c, k, a)[-1][2]

    def eventual_side(self, c: str, a: str) -> int:
        """Side of ``c`` on which far members of ``a`` lie (0 when they cross)."""
        rel = self.eventual_relation(c, a)
        return 0 if rel.transverse else -rel.nest[0]

    # truncations ----------------------------------------------------
    def labels(self, N: int) -> list[tuple[str, int]]:
        return [(f, i) for f in self.families for i in range(N)]

    def finite_pocset(self, labels: Iterable[tuple[str, int]]) -> FinitePocset:
        labels = list(labels)
        n = len(labels)
        E = np.zeros((n, n), dtype=np.int8)
        D = np.zeros((n, n), dtype=np.int8)
        for x in range(n):
            a, i = labels[x]
            for y in range(x + 1, n):
                b, j = labels[y]
                rel = self.relate_idx(a, i, b, j)
                if rel.nest is not None:
                    E[x, y], D[x, y] = rel.nest
                    E[y, x], D[y, x] = -rel.nest[1], -rel.nest[0]
        return FinitePocset.from_matrices(labels, E, D)

    def truncate(self, N: int) -> FinitePocset:
        N = max(0, int(N))
        key = ("truncate", N)
        if key not in self._memo:
            self._memo[key] = self.finite_pocset(self.labels(N))
        return self._memo[key]

    # validation -----------------------------------------------------
    def validate(self) -> ValidationReport:
        violations = []
        W = self.stab
        for r in self._extra:
            primary = self.rule(r.a, r.b)
            for i in range(W + 1):
                for j in range(W + 1):
                    mine = r.relation(i, j)
                    theirs = (primary.relation(i, j) if primary.a == r.a
                              else primary.relation(j, i).transposed())
                    if mine != theirs:
                        violations.append(
                            f"asymmetric rule for pair ({r.a}, {r.b}): at "
                            f"({format_label((r.a, i))}, {format_label((r.b, j))}) "
                            f"one direction gives {mine}, the other {theirs}")
                        break
                else:
                    continue
                break
        finite = self.truncate(W + 1).validate()
        violations += [f"window [0, {W}]: {v}" for v in finite.violations]
        origin = [MINUS] * self.truncate(W + 1).n
        if not self.truncate(W + 1).is_consistent(origin):
            violations.append("the all-minus orientation (origin) is inconsistent")
        for c in self.families:
            for a in self.families:
                if a == c:
                    continue
                limit = self.eventual_relation(c, a, 0)
                for k in range(W + 1):
                    ps = self.pieces(c, k, a)
                    if len(ps) > 2 or ps[-1][2] != limit:
                        violations.append(
                            f"index instability for pair ({c}, {a}) at {format_label((c, k))}")
                        break
        notes = [f"window [0, {W}] checked exhaustively; relations beyond the window are "
                 f"taken to follow the rule regimes, which are constant there"]
        return ValidationReport(valid=not violations, violations=violations, notes=notes)

    def is_valid(self) -> bool:
        key = ("valid",)
        if key not in self._memo:
            self._memo[key] = self.validate().valid
        return self._memo[key]

    # symbolic sets ------------------------------------------------------
    def sides_of(self, c: str, k: int, sets: dict[str, IntervalSet]) -> set[int]:
        """Sides of ``c_k`` holding members of ``sets`` nested with it."""
        found = set()
        for a, M in sets.items():
            if not M:
                continue
            for s, e, rel in self.pieces(c, k, a):
                if rel is None or rel.transverse:
                    continue
                side = -rel.nest[0]
                if side in found:
                    continue
                if M.intersects(s, e):
                    found.add(side)
            if len(found) == 2:
                break
        return found

    def _change_points(self, c: str, sets: dict[str, IntervalSet]) -> list[int]:
        pts = {0}
        for a, M in sets.items():
            if not M:
                continue
            targets = {0, 1}
            for E in M.endpoints():
                targets.update((E - 1, E, E + 1, E + 2))
            for f in self.boundary_funcs(c, a):
                for t in targets:
                    k = least_at_least(f, t)
                    if k < BIG:
                        pts.update((k, k + 1))
        return sorted(p for p in pts if p >= 0)

    def separated_indices(self, c: str, sets: dict[str, IntervalSet]) -> IntervalSet:
        """Indices ``k`` such that ``c_k`` has members of ``sets`` on both sides."""
        pts = self._change_points(c, sets)
        parts = []
        for n, k in enumerate(pts):
            nxt = pts[n + 1] if n + 1 < len(pts) else None
            status = len(self.sides_of(c, k, sets)) == 2
            if nxt is not None and nxt - 1 > k:
                if status != (len(self.sides_of(c, nxt - 1, sets)) == 2):
                    raise InternalLimitError(
                        f"separation status of family {c} not constant on [{k}, {nxt})")
            if status:
                parts.append((k, nxt))
        return IntervalSet(parts)

    def closure(self, S: UBSDescriptor, max_rounds: int = 2000) -> UBSDescriptor:
        sets = {f: S.get(f) for f in self.families}
        for fam in S.sets:
            if fam not in self.families:
                raise DomainError(f"descriptor mentions unknown family {fam}")
        for _ in range(max_rounds):
            changed = None
            for c in self.families:
                grown = sets[c].union(self.separated_indices(c, sets))
                if grown != sets[c]:
                    sets[c] = grown
                    changed = c
            if changed is None:
                return UBSDescriptor(sets=sets)
        contributors = [a for a in self.families if sets[a] and a != changed]
        pair = (changed, contributors[0] if contributors else changed)
        raise InternalLimitError(
            f"inseparable closure did not stabilize within {max_rounds} rounds "
            f"(family pair {pair[0]}, {pair[1]})")


# ---------------------------------------------------------------- dispatch

def relate(P, h, k) -> Relation:
    return P.relate(h, k)


def validate(P) -> ValidationReport:
    return P.validate()


def truncate(T: TieredPocset, N: int) -> FinitePocset:
    return T.truncate(N)


def inseparable_closure(P, S):
    """Closure for finite pocsets (label sets) and tiered pocsets (descriptors)."""
    if isinstance(P, TieredPocset):
        if not isinstance(S, UBSDescriptor):
            S = UBSDescriptor.from_hyperplanes(S)
        return P.closure(S)
    from .pocset import inseparable_closure as finite_closure
    return finite_closure(P, S)
