"""Command-line front end: ``cubebound <command> ...``.

Exit status is 0 when every check passes, 1 on a failed verification or an
invalid query, and 2 when an input cannot be parsed.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .boundaries import (nerve_pair, roller_complex, sigma_cover, simplicial_boundary,
                         ubs_complex_and_maps, verify_report)
from .checks import algebra_report
from .cubecomplex import DEFAULT_CAP, duality_roundtrip, realize
from .descriptor import UBSDescriptor
from .document import FixtureDocument, fixture_paths, load
from .errors import (CubeboundError, DomainError, InternalLimitError, ParseError,
                     ResourceLimitError, VerificationError)
from .metric import Rescaling, l2_distance, wall_count_check
from .pocset import FinitePocset
from .roller import enumerate_classes, l1_visible
from .simplicial import SimplicialComplex
from .tiered import TieredPocset
from .titscone import (CubicalCone, circumcenter, pseudocenter, realization, roller_patterns,
                       visibility_and_nerve)
from .ubs import (class_of, components, dominant_components, is_ubs, minimal_classes,
                  minimal_decomposition, prune, ubs_classes)

DEFAULT_WINDOW = 4


class Failed(Exception):
    """A report was produced but some check in it failed."""

    def __init__(self, report):
        super().__init__("verification failed")
        self.report = report


# ---------------------------------------------------------------- helpers

def describe(S: SimplicialComplex) -> str:
    tops = S.maximal_faces()
    if not tops:
        return "empty"
    if len(tops) == 1:
        return f"one {len(tops[0]) - 1}-simplex"
    return f"{len(tops)} maximal simplices, f-vector {S.f_vector()}"


def finite_of(doc: FixtureDocument, window: int | None) -> FinitePocset:
    if doc.kind == "finite":
        return doc.payload
    T = tiered_of(doc)
    return T.truncate(window if window is not None else DEFAULT_WINDOW)


def tiered_of(doc: FixtureDocument) -> TieredPocset:
    if doc.kind == "tiered":
        return doc.payload
    if doc.kind == "cone":
        return doc.payload.to_tiered()
    raise DomainError(f"{doc.name} is a finite pocset; this command needs a tiered or cone document")


def cone_of(doc: FixtureDocument) -> CubicalCone:
    if doc.kind != "cone":
        raise DomainError(f"{doc.name} is not a cone document")
    return doc.payload


def parse_descriptor(text: str | None) -> UBSDescriptor | None:
    if text is None:
        return None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad descriptor: {exc.msg}", location=f"--set:{exc.colno}") from None
    try:
        return UBSDescriptor.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad descriptor: {exc}", location="--set") from None


def parse_pattern(C: CubicalCone, text: str | None):
    if text is None:
        return C.patterns[-1]
    return C.pattern([t.strip() for t in text.split(",") if t.strip()])


def rounded(v, digits: int = 12):
    return [round(float(t), digits) for t in v]


# ---------------------------------------------------------------- commands

def cmd_validate(doc, args):
    if doc.kind == "cone":
        T = doc.payload.to_tiered()
        rep = T.validate().to_dict()
        rep["coordinates"] = list(doc.payload.coords)
    else:
        rep = doc.payload.validate().to_dict()
    rep["name"] = doc.name
    rep["kind"] = doc.kind
    rep["pass"] = rep["valid"]
    return rep


def cmd_realize(doc, args):
    P = finite_of(doc, args.window)
    X = realize(P, cap=args.cap)
    if args.emit == "dot":
        return X.to_dot()
    rep = X.to_dict()
    ok, msg = duality_roundtrip(P, X)
    rep["duality_roundtrip"] = {"ok": ok, "message": msg}
    rep["pass"] = ok
    return rep


def _complex(doc, args):
    return realize(finite_of(doc, args.window), cap=args.cap)


def cmd_median(doc, args):
    X = _complex(doc, args)
    x, y, z = (X.vertex(v) for v in args.vertices)
    return {"median": X.name(X.median(x, y, z))}


def cmd_gate(doc, args):
    X = _complex(doc, args)
    x = X.vertex(args.vertex)
    C = X.hull([X.vertex(v) for v in args.onto.split(",")])
    g = X.gate(C, x)
    return {"gate": X.name(g), "walls": sorted(str(h) for h in X.separators(x, g)),
            "subcomplex": sorted(X.name(v) for v in C.vertex_list())}


def cmd_ubs(doc, args):
    T = tiered_of(doc)
    S = parse_descriptor(args.set)
    if args.action == "is":
        if S is None:
            raise DomainError("ubs is needs --set")
        res = is_ubs(T, S).to_dict()
        res["pass"] = True
        return res
    if args.action == "prune":
        if S is None:
            raise DomainError("ubs prune needs --set")
        return {"pruned": prune(T, S).to_dict()}
    if args.action == "decompose":
        if S is not None:
            return {"components": [c.to_dict() for c in minimal_decomposition(T, S)]}
        return {"classes": {str(A): [c.to_dict() for c in components(T, A)] for A in ubs_classes(T)},
                "minimal": [str(A) for A in minimal_classes(T)]}
    target = S if S is not None else ubs_classes(T)[-1]
    label = str(class_of(prune(T, S))) if S is not None else str(target)
    return {"class": label, "dominant": [c.to_dict() for c in dominant_components(T, target)]}


def cmd_roller(doc, args):
    T = tiered_of(doc)
    P = enumerate_classes(T)
    if args.action == "classes":
        return {"classes": [c.to_dict() | {"label": str(c)} for c in P.classes],
                "count": len(P.classes)}
    if args.action == "poset":
        return P.to_dot() if args.emit == "dot" else P.to_dict()
    return {"visible": {str(A): l1_visible(T, A) for A in ubs_classes(T)}}


def cmd_boundary(doc, args):
    T = tiered_of(doc)
    if args.action == "verify":
        rep = verify_report(T, seed=args.seed, budget=args.budget)
        rep["summary"] = f"∂△: {describe(simplicial_boundary(T))}"
        return rep
    if args.action == "ubs":
        rep = ubs_complex_and_maps(T)
        return rep.ubs_complex.to_dot() if args.emit == "dot" else rep.to_dict() | {"pass": rep.ok}
    S = simplicial_boundary(T) if args.action == "simplicial" else roller_complex(T)
    if args.emit == "dot":
        return S.to_dot()
    return S.to_dict() | {"summary": describe(S)}


def _visible_selector(doc):
    if doc.kind != "cone":
        return None, ""
    rep = visibility_and_nerve(doc.payload)
    visible = {v.coords for v in rep.visible}
    return (lambda c: tuple(c.deep) in {tuple(sorted(v)) for v in visible}), "visible classes"


def cmd_nerve(doc, args):
    T = tiered_of(doc)
    if args.action == "pair":
        res = nerve_pair(T)
        return res.to_dict() | {"pass": res.isomorphism}
    select, _ = _visible_selector(doc)
    cov = sigma_cover(T, select)
    return cov.to_dict() | {"pass": all(cov.cones.values())}


def _rescaling(args, labels):
    if not args.rescale:
        return None
    try:
        data = json.loads(args.rescale)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad rescaling: {exc.msg}", location=f"--rescale:{exc.colno}") from None
    return Rescaling.by_prefix(labels, {str(k): float(v) for k, v in data.items()})


def cmd_metric(doc, args):
    X = _complex(doc, args)
    rho = _rescaling(args, X.pocset.labels)
    if args.action == "dist":
        if len(args.vertices) != 2:
            raise DomainError("metric dist needs two vertices")
        try:
            est = l2_distance(X, args.vertices[0], args.vertices[1], rho, args.tol)
        except ResourceLimitError as exc:
            raise Failed({"error": str(exc), "best": exc.best.to_dict() if exc.best else None})
        return est.to_dict()
    return wall_count_check(X, rho, args.tol)


def cmd_cone(doc, args):
    C = cone_of(doc)
    if args.action == "classes":
        pats, order = roller_patterns(C)
        return {"classes": [str(p) for p in pats],
                "order": [[str(pats[i]), str(pats[j])] for i, j in order]}
    if args.action == "nerve":
        rep = visibility_and_nerve(C)
        return rep.to_dict() | {"pass": rep.agrees}
    v = parse_pattern(C, args.pattern)
    Q = realization(C, v)
    if args.action == "Q":
        return Q.to_dict()
    if args.action == "circumcenter":
        c, r = circumcenter(Q)
        return {"pattern": str(v), "center": rounded(c), "radius": round(r, 12)}
    return pseudocenter(C, v).to_dict()


# ---------------------------------------------------------------- verify-all

def _expected(doc: FixtureDocument) -> dict:
    """Recompute every pinned value of the document's expected block."""
    got = {}
    for key in doc.expected:
        if key == "vertices":
            got[key] = len(realize(doc.payload).vertices)
        elif key == "census":
            got[key] = list(realize(doc.payload).census().values())
        elif key == "simplicial_boundary":
            got[key] = [list(f) for f in simplicial_boundary(tiered_of(doc)).maximal_faces()]
        elif key == "ubs_classes":
            got[key] = [str(A) for A in ubs_classes(tiered_of(doc))]
        elif key == "minimal_classes":
            got[key] = [str(A) for A in minimal_classes(tiered_of(doc))]
        elif key == "roller_classes":
            got[key] = [str(c) for c in enumerate_classes(tiered_of(doc)).classes]
        elif key == "dominant":
            T = tiered_of(doc)
            got[key] = [c.ubs_class.label for c in dominant_components(T, ubs_classes(T)[-1])]
        else:
            got[key] = None
    return got


def verify_document(doc: FixtureDocument, seed: int = 0, budget: int = 50, tol: float = 1e-3,
                    window: int | None = None) -> dict:
    checks: dict[str, bool] = {}
    rep: dict = {"name": doc.name, "kind": doc.kind, "seed": seed}
    if doc.kind == "finite":
        P = doc.payload
        checks["valid"] = P.validate().valid
        X = realize(P)
        checks["duality_roundtrip"] = duality_roundtrip(P, X)[0]
        alg = algebra_report(X, 100, seed)
        checks["median_gate_algebra"] = alg["pass"]
        walls = {}
        families = sorted({str(h).rstrip("0123456789") for h in P.labels})
        rescalings = {"uniform": None,
                      "parity": Rescaling({h: 1.0 + (i % 2) for i, h in enumerate(P.labels)}),
                      "double-" + families[0]: Rescaling.by_prefix(P.labels, {families[0]: 2.0})}
        for name, rho in rescalings.items():
            walls[name] = wall_count_check(X, rho, tol)
            checks[f"wall_count_{name}"] = walls[name]["pass"]
        rep.update({"complex": X.to_dict(), "algebra": alg, "wall_counts": walls,
                    "summary": f"complex: {len(X.vertices)} vertices, dimension {X.dimension}"})
    else:
        T = tiered_of(doc)
        checks["valid"] = T.validate().valid
        bound = verify_report(T, seed=seed, budget=budget)
        if doc.kind == "cone":
            select, label = _visible_selector(doc)
            cov = sigma_cover(T, select, label)
            checks["sigma_visible_cones"] = all(cov.cones.values())
            cone_rep = visibility_and_nerve(doc.payload)
            checks["cone_nerve_homology"] = cone_rep.agrees
            polys = {}
            for v in doc.payload.patterns:
                Q = realization(doc.payload, v)
                c, r = circumcenter(Q)
                pc = pseudocenter(doc.payload, v)
                polys[str(v)] = {"diameter": round(Q.diameter(), 12), "center": rounded(c),
                                 "radius": round(r, 12), "pseudocenter": pc.to_dict()}
                checks[f"polytope_{v}"] = Q.diameter() <= math.pi / 2 + 1e-9 and r < math.pi / 2
            rep["cone"] = {"nerve": cone_rep.to_dict(), "realizations": polys}
        checks.update({f"boundary_{k}": v for k, v in bound["checks"].items()})
        N = window if window is not None else DEFAULT_WINDOW
        F = T.truncate(N)
        X = realize(F)
        checks["truncation_roundtrip"] = duality_roundtrip(F, X)[0]
        alg = algebra_report(X, 100, seed)
        checks["truncation_algebra"] = alg["pass"]
        rep.update({"boundary": bound, "truncation": {"window": N, "vertices": len(X.vertices),
                                                      "algebra": alg},
                    "summary": f"∂△: {describe(simplicial_boundary(T))}"})
    if doc.expected:
        got = _expected(doc)
        rep["expected"] = {k: {"want": doc.expected[k], "got": got[k]} for k in sorted(doc.expected)}
        for k in doc.expected:
            checks[f"expected_{k}"] = got[k] == doc.expected[k]
    rep["checks"] = checks
    rep["pass"] = all(checks.values())
    return rep


def cmd_verify_all(paths, args):
    docs = [load(p) for p in (paths or fixture_paths())]
    docs.sort(key=lambda d: d.name)
    reports = [verify_document(d, args.seed, args.budget, args.tol, args.window) for d in docs]
    return {"fixtures": reports, "seed": args.seed,
            "summary": {r["name"]: ("pass" if r["pass"] else "FAIL") + " | " + r["summary"]
                        for r in reports},
            "pass": all(r["pass"] for r in reports)}


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", type=int, default=None, help="truncation depth for tiered inputs")
    common.add_argument("--tol", type=float, default=1e-3, help="distance tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--budget", type=int, default=50, help="collapse-search restarts")
    common.add_argument("--emit", choices=("json", "dot"), default="json")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="vertex cap for realizations")
    common.add_argument("--out", type=Path, default=None, help="write the report here")

    p = argparse.ArgumentParser(prog="cubebound", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, *actions):
        sp = sub.add_parser(name, parents=[common])
        if actions:
            sp.add_argument("action", choices=actions)
        sp.add_argument("input", type=Path)
        return sp

    add("validate")
    add("realize")
    add("median").add_argument("vertices", nargs=3)
    g = add("gate")
    g.add_argument("vertex")
    g.add_argument("--onto", required=True, help="comma-separated vertices whose hull is the target")
    add("ubs", "is", "prune", "decompose", "dominant").add_argument(
        "--set", default=None, help='descriptor JSON, e.g. {"tails": {"B": 0}}')
    add("roller", "classes", "poset", "visible")
    add("boundary", "simplicial", "roller", "ubs", "verify")
    add("nerve", "pair", "sigma")
    m = add("metric", "dist", "wallqi")
    m.add_argument("vertices", nargs="*")
    m.add_argument("--rescale", default=None, help='length per label prefix, e.g. {"x": 2}')
    add("cone", "classes", "Q", "circumcenter", "pseudocenter", "nerve").add_argument(
        "--pattern", default=None, help="comma-separated coordinates sent to infinity")
    va = sub.add_parser("verify-all", parents=[common])
    va.add_argument("inputs", nargs="*", type=Path)
    return p


COMMANDS = {"validate": cmd_validate, "realize": cmd_realize, "median": cmd_median,
            "gate": cmd_gate, "ubs": cmd_ubs, "roller": cmd_roller, "boundary": cmd_boundary,
            "nerve": cmd_nerve, "metric": cmd_metric, "cone": cmd_cone}


def emit(result, out: Path | None) -> None:
    text = result if isinstance(result, str) else \
        json.dumps(result, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if out is not None:
        out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify-all":
            result = cmd_verify_all(args.inputs, args)
        else:
            result = COMMANDS[args.command](load(args.input), args)
    except ParseError as exc:
        emit({"error": "parse", "message": str(exc), "location": exc.location}, None)
        return 2
    except VerificationError as exc:
        emit({"error": "verification", "message": str(exc), "certificate": exc.certificate}, args.out)
        return 1
    except Failed as exc:
        emit(exc.report, args.out)
        return 1
    except (DomainError, ResourceLimitError, InternalLimitError, CubeboundError) as exc:
        emit({"error": type(exc).__name__, "message": str(exc)}, args.out)
        return 1
    emit(result, args.out)
    if isinstance(result, dict) and result.get("pass") is False:
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
