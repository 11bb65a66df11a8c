"""The shared fixture document: a JSON object with a ``kind`` field.

``finite``  ``{"hyperplanes": [...], "relations": [{"pair": [h, k], "nest": "a+ < b-"}]}``
            (unlisted pairs are transverse)
``tiered``  ``{"families": [...], "rules": [CrossRule...], "stab": int?}``
``cone``    ``{"coordinates": [...], "constraints": ["x >= z", ...]}`` or
            ``{"coordinates": [...], "pieces": [{"support": [...], "constraints": [...]}]}``

Any kind may carry ``name`` and an ``expected`` block mapping operation names
to pinned serialized values.  Serialization is sorted-key JSON, so a parsed
document always re-serializes to the same bytes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import DomainError, ParseError
from .pocset import FinitePocset, Relation
from .tiered import CrossRule, TieredPocset, parse_variant, variant_text

KINDS = ("finite", "tiered", "cone")


@dataclass
class FixtureDocument:
    kind: str
    name: str
    payload: object
    expected: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "name": self.name}
        if self.kind == "finite":
            P = self.payload
            out["hyperplanes"] = [str(h) for h in P.labels]
            rels = []
            for i, h in enumerate(P.labels):
                for j in range(i + 1, len(P.labels)):
                    r = P.relate_index(i, j)
                    if r.nested:
                        rels.append({"pair": [str(h), str(P.labels[j])], "nest": variant_text(r.nest)})
            out["relations"] = rels
        elif self.kind == "tiered":
            T = self.payload
            out["families"] = list(T.families)
            out["rules"] = [r.to_json() for r in T.rules]
            out["stab"] = T.stab
        else:
            out.update(self.payload.to_json())
        if self.expected:
            out["expected"] = self.expected
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _location(exc: json.JSONDecodeError) -> str:
    return f"line {exc.lineno}, column {exc.colno}"


def loads(text: str, source: str = "<string>") -> FixtureDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, location=f"{source}:{_location(exc)}") from None
    if not isinstance(data, dict):
        raise ParseError("document must be an object", location=source)
    return from_dict(data, source)


def from_dict(data: dict, source: str = "<document>") -> FixtureDocument:
    kind = data.get("kind")
    if kind not in KINDS:
        raise ParseError(f"kind must be one of {KINDS}, got {kind!r}", location=f"{source}:kind")
    name = str(data.get("name", ""))
    expected = data.get("expected", {}) or {}
    if not isinstance(expected, dict):
        raise ParseError("expected block must be an object", location=f"{source}:expected")
    try:
        if kind == "finite":
            payload = _finite(data, source)
        elif kind == "tiered":
            rules = []
            for n, r in enumerate(data.get("rules", [])):
                try:
                    rules.append(CrossRule.from_json(r))
                except ParseError as exc:
                    raise ParseError(str(exc), location=f"{source}:rules[{n}]") from None
            payload = TieredPocset(data["families"], rules, stab=data.get("stab"), name=name)
        else:
            from .titscone import CubicalCone
            payload = CubicalCone.from_json(data, name=name)
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}",
                         location=f"{source}:{exc.args[0]}") from None
    except DomainError as exc:
        raise ParseError(str(exc), location=source) from None
    return FixtureDocument(kind, name, payload, dict(expected))


def _finite(data: dict, source: str) -> FinitePocset:
    labels = [str(h) for h in data["hyperplanes"]]
    rels = {}
    for n, r in enumerate(data.get("relations", [])):
        try:
            h, k = r["pair"]
            nest = r.get("nest")
            rels[(str(h), str(k))] = Relation(parse_variant(nest)) if nest else Relation(None)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise ParseError(str(exc), location=f"{source}:relations[{n}]") from None
            raise ParseError(f"bad relation {r!r}", location=f"{source}:relations[{n}]") from None
    return FinitePocset(labels, rels)


def load(path: str | Path) -> FixtureDocument:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(exc.strerror, location=str(p)) from None
    doc = loads(text, str(p))
    if not doc.name:
        doc.name = p.stem
        if doc.kind == "tiered":
            doc.payload.name = doc.name
    return doc


def fixture_dir() -> Path:
    return Path(str(resources.files("cubebound") / "fixtures"))


def fixture_paths() -> list[Path]:
    return sorted(fixture_dir().glob("*.doc"))


def load_fixture(name: str) -> FixtureDocument:
    return load(fixture_dir() / f"{name}.doc")


def bundled() -> dict[str, FixtureDocument]:
    return {p.stem: load(p) for p in fixture_paths()}
