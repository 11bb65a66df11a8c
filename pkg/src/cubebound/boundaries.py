"""Boundary complexes of a tiered pocset and the maps between them.

* simplicial boundary: vertices are minimal UBS classes, faces are the
  component sets of UBS classes and their subsets;
* Roller complex: order complex of the Roller classes;
* UBS complex: order complex of the UBS classes under ⪯.

The umbra map and its section are compared through fibers, nerves of
maximal-simplex covers and homology.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import VerificationError
from .roller import RollerClass, class_ubs, enumerate_classes, leq, umbra
from .simplicial import (GF2, RATIONALS, Cover, SimplicialComplex, barycentric, betti, canon,
                         collapse_certificate, label_text, nerve, order_complex)
from .tiered import TieredPocset
from .ubs import UBSClass, components, preceq, ubs_classes


def component_labels(T: TieredPocset, A: UBSClass) -> tuple[str, ...]:
    return tuple(sorted(c.ubs_class.label for c in components(T, A)))


def simplicial_boundary(T: TieredPocset) -> SimplicialComplex:
    return SimplicialComplex([component_labels(T, A) for A in ubs_classes(T)])


def roller_complex(T: TieredPocset) -> SimplicialComplex:
    P = enumerate_classes(T)
    return order_complex([str(c) for c in P.classes],
                         _leq_by_label(P.classes))


def ubs_complex(T: TieredPocset) -> SimplicialComplex:
    classes = ubs_classes(T)
    by = {str(A): A for A in classes}
    return order_complex(list(by), lambda a, b: preceq(T, by[a], by[b]))


def _leq_by_label(classes: list[RollerClass]):
    by = {str(c): c for c in classes}
    return lambda a, b: leq(by[a], by[b])


@dataclass
class MapReport:
    ubs_complex: SimplicialComplex
    ru: dict          # UBS class label -> Roller class label
    ur: dict          # Roller class label -> UBS class label
    checks: dict = field(default_factory=dict)
    fibers: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values()) and all(f["cone"] for f in self.fibers.values())

    def to_dict(self) -> dict:
        return {"ubs_complex": self.ubs_complex.to_dict(), "ru": dict(sorted(self.ru.items())),
                "ur": dict(sorted(self.ur.items())), "checks": dict(self.checks),
                "fibers": {k: v for k, v in sorted(self.fibers.items())}}


def ubs_complex_and_maps(T: TieredPocset, strict: bool = False) -> MapReport:
    classes = ubs_classes(T)
    rollers = enumerate_classes(T).classes
    ru = {str(A): str(umbra(T, A)) for A in classes}
    ur = {str(v): str(class_ubs(T, v)) for v in rollers}
    K = ubs_complex(T)
    R = roller_complex(T)
    by_ubs = {str(A): A for A in classes}
    by_roller = {str(v): v for v in rollers}
    checks = {}
    checks["ru_simplicial"] = all(SimplicialComplex([[ru[v] for v in f]]).faces <= R.faces
                                  for f in K.maximal_faces())
    checks["ur_simplicial"] = all(SimplicialComplex([[ur[v] for v in f]]).faces <= K.faces
                                  for f in R.maximal_faces())
    checks["ru_surjective"] = set(ru.values()) == set(by_roller)
    checks["ur_injective"] = len(set(ur.values())) == len(ur)
    checks["ur_section"] = all(ru[ur[y]] == y for y in by_roller)
    checks["ru_order_preserving"] = all(
        leq(by_roller[ru[a]], by_roller[ru[b]])
        for a in by_ubs for b in by_ubs if preceq(T, by_ubs[a], by_ubs[b]))
    checks["ur_order_preserving"] = all(
        preceq(T, by_ubs[ur[y]], by_ubs[ur[z]])
        for y in by_roller for z in by_roller if leq(by_roller[y], by_roller[z]))
    checks["ur_ru_inflationary"] = all(preceq(T, A, by_ubs[ur[ru[str(A)]]]) for A in classes)
    checks["ur_ru_idempotent"] = all(ur[ru[ur[ru[a]]]] == ur[ru[a]] for a in by_ubs)
    checks["embeds_in_subdivision"] = _embeds_in_subdivision(T, K)
    max_u = [a for a in by_ubs if not any(a != b and preceq(T, by_ubs[a], by_ubs[b]) for b in by_ubs)]
    max_r = [y for y in by_roller
             if not any(y != z and leq(by_roller[y], by_roller[z]) for z in by_roller)]
    checks["maximal_bijection"] = (sorted(ru[a] for a in max_u) == sorted(max_r)
                                   and sorted(ur[y] for y in max_r) == sorted(max_u))
    fibers = {}
    for y in by_roller:
        below = [a for a in by_ubs if leq(by_roller[ru[a]], by_roller[y])]
        exact = [a for a in by_ubs if ru[a] == y]
        apex = ur[y]
        info = {"apex": apex, "quillen_fiber": sorted(below), "preimage": sorted(exact)}
        ok = True
        for name, elems in (("quillen_fiber", below), ("preimage", exact)):
            F = order_complex(elems, lambda a, b: preceq(T, by_ubs[a], by_ubs[b]), check=False)
            ok = ok and apex in elems and apex in F.cone_apexes()
        info["cone"] = ok
        fibers[y] = info
    report = MapReport(K, ru, ur, checks, fibers)
    if strict and not report.ok:
        bad = [k for k, v in checks.items() if not v] + [y for y, f in fibers.items() if not f["cone"]]
        raise VerificationError(f"map checks failed: {bad}", certificate=report.to_dict())
    return report


def _embeds_in_subdivision(T: TieredPocset, K: SimplicialComplex) -> bool:
    """Send each class to its component set; chains must go to chains of faces."""
    B = barycentric(simplicial_boundary(T))
    image = {a: component_labels(T, UBSClass(tuple(a[1:-1].split("+")))) for a in K.vertices}
    if len(set(image.values())) != len(image):
        return False
    return all(canon([image[v] for v in f]) in B for f in K.maximal_faces())


# ---------------------------------------------------------------- nerves

@dataclass
class NervePair:
    nerve_a: SimplicialComplex
    nerve_b: SimplicialComplex
    vertex_map: dict
    isomorphism: bool
    reason: str = ""

    def to_dict(self) -> dict:
        return {"nerve_a": self.nerve_a.to_dict(), "nerve_b": self.nerve_b.to_dict(),
                "vertex_map": {label_text(k): str(v) for k, v in sorted(self.vertex_map.items(), key=str)},
                "isomorphism": self.isomorphism, "reason": self.reason}


def down_set_complex(T: TieredPocset, top: RollerClass) -> SimplicialComplex:
    P = enumerate_classes(T)
    below = [str(c) for c in P.classes if leq(c, top)]
    return order_complex(below, _leq_by_label(P.classes), check=False)


def nerve_pair(T: TieredPocset, strict: bool = False) -> NervePair:
    boundary = simplicial_boundary(T)
    tops = boundary.maximal_faces()
    nerve_a = nerve({t: SimplicialComplex([t]) for t in tops})
    P = enumerate_classes(T)
    max_roller = P.maximal()
    upsilon = {str(v): down_set_complex(T, v) for v in max_roller}
    nerve_b = nerve(upsilon)
    by_components = {component_labels(T, A): A for A in ubs_classes(T)}
    vertex_map = {}
    reason = ""
    for t in tops:
        A = by_components.get(t)
        if A is None:
            reason = f"maximal simplex {t} is not the component set of a class"
            break
        vertex_map[t] = str(umbra(T, A))
    iso = not reason
    if iso:
        if sorted(vertex_map.values()) != sorted(upsilon) or len(set(vertex_map.values())) != len(tops):
            iso, reason = False, "vertex map is not a bijection onto the maximal Roller classes"
        elif nerve_a.relabel(vertex_map) != nerve_b:
            iso, reason = False, "vertex bijection does not carry faces onto faces"
    result = NervePair(nerve_a, nerve_b, vertex_map, iso, reason or "certified")
    if strict and not iso:
        raise VerificationError(reason, certificate=result.to_dict())
    return result


@dataclass
class SigmaCover:
    cover: Cover
    nerve: SimplicialComplex
    selected: list[str]
    substitution: str
    cones: dict

    def to_dict(self) -> dict:
        return {"members": {k: v.to_dict() for k, v in sorted(self.cover.members.items())},
                "nerve": self.nerve.to_dict(), "selected": list(self.selected),
                "substitution": self.substitution,
                "cones": {k: v for k, v in sorted(self.cones.items())}}


def sigma_cover(T: TieredPocset, restrict_to: Callable[[RollerClass], bool] | None = None,
                substitution: str = "") -> SigmaCover:
    """Cover of the order complex of the selected classes by the down-sets of maximal ones."""
    P = enumerate_classes(T)
    if restrict_to is None:
        selected = list(P.classes)
        substitution = substitution or "all Roller classes used as the visible set"
    else:
        selected = [c for c in P.classes if restrict_to(c)]
    labels = [str(c) for c in selected]
    ambient = order_complex(labels, _leq_by_label(selected), check=False)
    tops = [c for c in selected if not any(c != d and leq(c, d) for d in selected)]
    members = {}
    for v in tops:
        below = [str(c) for c in selected if leq(c, v)]
        members[str(v)] = order_complex(below, _leq_by_label(selected), check=False)
    cover = Cover(ambient, members)
    if not cover.verify():
        raise VerificationError("sigma sets do not cover the complex")
    N = nerve(members)
    cones = {}
    for face in N.faces:
        inter = members[face[0]]
        for k in face[1:]:
            inter = inter.intersection(members[k])
        cones["&".join(face)] = inter.is_cone()
    return SigmaCover(cover, N, labels, substitution, cones)


# ---------------------------------------------------------------- bundle

@dataclass
class BoundaryBundle:
    simplicial: SimplicialComplex
    roller: SimplicialComplex
    maps: MapReport
    nerves: NervePair
    sigma: SigmaCover

    def betti_table(self) -> dict:
        out = {}
        for name, K in (("simplicial", self.simplicial), ("roller", self.roller),
                        ("ubs", self.maps.ubs_complex), ("sigma_nerve", self.sigma.nerve)):
            out[name] = {RATIONALS: betti(K, RATIONALS), GF2: betti(K, GF2)}
        return out


def trim(b: list[int]) -> list[int]:
    b = list(b)
    while len(b) > 1 and b[-1] == 0:
        b.pop()
    return b


def build_bundle(T: TieredPocset) -> BoundaryBundle:
    return BoundaryBundle(simplicial_boundary(T), roller_complex(T), ubs_complex_and_maps(T),
                          nerve_pair(T), sigma_cover(T))


def verify_report(T: TieredPocset, seed: int = 0, budget: int = 50) -> dict:
    """Per-fixture verification of the boundary theorems at the combinatorial level."""
    B = build_bundle(T)
    table = B.betti_table()
    homology = {f: [trim(table[k][f]) for k in ("simplicial", "roller", "ubs")]
                for f in (RATIONALS, GF2)}
    same = all(v[0] == v[1] == v[2] for v in homology.values())
    field_stable = all(trim(table[k][RATIONALS]) == trim(table[k][GF2]) for k in table)
    collapses = {}
    for name, K in B.sigma.cover.members.items():
        res = collapse_certificate(K, budget=budget, seed=seed)
        collapses[name] = res.collapsible
    checks = {
        "maps": B.maps.ok,
        "nerve_isomorphism": B.nerves.isomorphism,
        "homology_agrees": same,
        "field_stable": field_stable,
        "sigma_cones": all(B.sigma.cones.values()),
        "sigma_collapsible": all(collapses.values()),
        "sigma_nerve_homology": trim(table["sigma_nerve"][RATIONALS]) == homology[RATIONALS][1],
    }
    return {
        "name": T.name,
        "seed": seed,
        "simplicial_boundary": B.simplicial.to_dict(),
        "roller_complex": B.roller.to_dict(),
        "maps": B.maps.to_dict(),
        "nerves": B.nerves.to_dict(),
        "sigma": B.sigma.to_dict(),
        "betti": {k: {f: trim(v) for f, v in d.items()} for k, d in table.items()},
        "checks": checks,
        "pass": all(checks.values()),
    }
