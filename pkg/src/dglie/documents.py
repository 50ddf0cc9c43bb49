"""JSON documents for algebras, morphisms, and presentations.

One schema file (shipped next to this module) covers the five document
kinds: dgla, dg_algebra, artin_algebra, presentation, and morphism.  Every
document carries a schema_version; unknown fields are rejected.  Rationals
travel as "p/q" strings (plain integers are accepted on input).  Basis
labels inside a document must be globally unique so that structure-constant
entries can reference them unambiguously.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import jsonschema

from .core import ChainComplex, GradedLinearMap, GradedVectorSpace, zero_map
from .dgla import DgLieAlgebra, DgLieMorphism
from .core import ChainMap
from .envelope import DgAlgebra
from .errors import MalformedInput
from .moduli import ArtinAlgebra, Presentation
from .polynomials import Poly

SCHEMA_VERSION = 1

KINDS = ("dgla", "dg_algebra", "artin_algebra", "presentation", "morphism")

_schema_cache = None


def input_schema() -> dict:
    global _schema_cache
    if _schema_cache is None:
        text = (
            resources.files("dglie").joinpath("schema/input-schema.json").read_text()
        )
        _schema_cache = json.loads(text)
    return _schema_cache


def parse_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise MalformedInput(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInput(f"not a rational: {value!r}") from exc
    raise MalformedInput(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


@dataclass
class InputDocument:
    kind: str
    name: str
    description: str
    payload: dict

    @classmethod
    def from_dict(cls, data: dict) -> "InputDocument":
        try:
            jsonschema.validate(data, input_schema())
        except jsonschema.ValidationError as exc:
            raise MalformedInput(f"schema violation: {exc.message}") from exc
        if data["schema_version"] != SCHEMA_VERSION:
            raise MalformedInput(
                f"unsupported schema_version {data['schema_version']}"
            )
        return cls(
            kind=data["kind"],
            name=data.get("name", ""),
            description=data.get("description", ""),
            payload=data["payload"],
        )


def load_document(path) -> InputDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedInput(f"document in {path} is not an object")
    return InputDocument.from_dict(data)


# ---------------------------------------------------------------------------
# label resolution
# ---------------------------------------------------------------------------


def _space_from_basis(basis: dict) -> tuple[GradedVectorSpace, dict]:
    table: dict[str, tuple[int, int]] = {}
    clean: dict[int, list[str]] = {}
    for deg_str, labels in basis.items():
        try:
            deg = int(deg_str)
        except ValueError as exc:
            raise MalformedInput(f"bad degree key {deg_str!r}") from exc
        clean[deg] = list(labels)
    space = GradedVectorSpace(clean)
    for deg in space.support:
        for i, label in enumerate(space.labels(deg)):
            if label in table:
                raise MalformedInput(
                    f"label {label!r} appears in two degrees; document labels "
                    f"must be globally unique"
                )
            table[label] = (deg, i)
    return space, table


def _differential_from_entries(space, table, entries) -> GradedLinearMap:
    blocks: dict[int, list[list[Fraction]]] = {}
    for entry in entries:
        src = entry["source"]
        tgt = entry["target"]
        if src not in table or tgt not in table:
            raise MalformedInput(f"differential references unknown label")
        (p, i), (q, j) = table[src], table[tgt]
        if q != p - 1:
            raise MalformedInput(
                f"differential entry {src} -> {tgt} is not degree -1"
            )
        block = blocks.setdefault(
            p, [[Fraction(0)] * space.dim(p) for _ in range(space.dim(p - 1))]
        )
        block[j][i] += parse_rational(entry["coeff"])
    return GradedLinearMap(space, space, -1, blocks)


def to_dgla(doc: InputDocument) -> tuple[DgLieAlgebra, dict]:
    """Build a dg-Lie algebra from a document; returns (algebra, label table)."""
    if doc.kind != "dgla":
        raise MalformedInput(f"expected a dgla document, got {doc.kind}")
    payload = doc.payload
    space, table = _space_from_basis(payload["basis"])
    diff = _differential_from_entries(space, table, payload.get("differential", []))
    cx = ChainComplex(space, diff, check=False)
    entries = []
    for entry in payload.get("bracket", []):
        for field in ("left", "right", "result"):
            if entry[field] not in table:
                raise MalformedInput(f"bracket references unknown label {entry[field]!r}")
        x, y, z = table[entry["left"]], table[entry["right"]], table[entry["result"]]
        if z[0] != x[0] + y[0]:
            raise MalformedInput(
                f"bracket entry [{entry['left']},{entry['right']}] -> "
                f"{entry['result']} is degree-inconsistent"
            )
        entries.append((x, y, z[1], parse_rational(entry["coeff"])))
    return DgLieAlgebra(cx, entries), table


def dgla_to_payload(g: DgLieAlgebra) -> dict:
    space = g.space
    labels_seen = set()
    for deg in space.support:
        for label in space.labels(deg):
            if label in labels_seen:
                raise MalformedInput(
                    f"label {label!r} repeats across degrees; cannot serialize"
                )
            labels_seen.add(label)
    basis = {str(deg): list(space.labels(deg)) for deg in space.support}
    differential = []
    for deg in space.support:
        for i in range(space.dim(deg)):
            for (q, j), c in sorted(g.d_key((deg, i)).items()):
                differential.append(
                    {
                        "source": space.labels(deg)[i],
                        "target": space.labels(q)[j],
                        "coeff": format_rational(c),
                    }
                )
    bracket = []
    for (x, y), vec in sorted(g._raw.items()):
        for (q, k), c in sorted(vec.items()):
            bracket.append(
                {
                    "left": g.label(x),
                    "right": g.label(y),
                    "result": space.labels(q)[k],
                    "coeff": format_rational(c),
                }
            )
    return {"basis": basis, "differential": differential, "bracket": bracket}


def document_dict(kind: str, name: str, payload: dict, description: str = "") -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "name": name,
        "payload": payload,
    }
    if description:
        doc["description"] = description
    return doc


def to_dg_algebra(doc: InputDocument) -> tuple[DgAlgebra, dict]:
    if doc.kind != "dg_algebra":
        raise MalformedInput(f"expected a dg_algebra document, got {doc.kind}")
    payload = doc.payload
    space, table = _space_from_basis(payload["basis"])
    diff = _differential_from_entries(space, table, payload.get("differential", []))
    cx = ChainComplex(space, diff, check=False)
    unit = payload["unit"]
    if unit not in table:
        raise MalformedInput(f"unit label {unit!r} not in the basis")
    entries = []
    for entry in payload.get("product", []):
        for field in ("left", "right", "result"):
            if entry[field] not in table:
                raise MalformedInput(f"product references unknown label {entry[field]!r}")
        x, y, z = table[entry["left"]], table[entry["right"]], table[entry["result"]]
        if z[0] != x[0] + y[0]:
            raise MalformedInput("product entry is degree-inconsistent")
        entries.append((x, y, z[1], parse_rational(entry["coeff"])))
    return DgAlgebra(cx, table[unit], entries), table


def to_artin(doc: InputDocument) -> ArtinAlgebra:
    if doc.kind != "artin_algebra":
        raise MalformedInput(f"expected an artin_algebra document, got {doc.kind}")
    payload = doc.payload
    labels = list(payload["basis"])
    index = {label: i for i, label in enumerate(labels)}
    if len(index) != len(labels):
        raise MalformedInput("duplicate artinian basis labels")
    entries = []
    for entry in payload.get("product", []):
        for field in ("left", "right", "result"):
            if entry[field] not in index:
                raise MalformedInput(f"product references unknown label {entry[field]!r}")
        entries.append(
            (
                index[entry["left"]],
                index[entry["right"]],
                index[entry["result"]],
                parse_rational(entry["coeff"]),
            )
        )
    augmentation = [Fraction(0)] * len(labels)
    for label, value in payload.get("augmentation", {}).items():
        if label not in index:
            raise MalformedInput(f"augmentation references unknown label {label!r}")
        augmentation[index[label]] = parse_rational(value)
    return ArtinAlgebra(labels, entries, augmentation)


def artin_to_payload(R: ArtinAlgebra) -> dict:
    product = []
    for (i, j), vec in sorted(R.table.items()):
        for k, c in sorted(vec.items()):
            product.append(
                {
                    "left": R.labels[i],
                    "right": R.labels[j],
                    "result": R.labels[k],
                    "coeff": format_rational(c),
                }
            )
    augmentation = {
        label: format_rational(c)
        for label, c in zip(R.labels, R.augmentation)
        if c
    }
    return {
        "basis": list(R.labels),
        "product": product,
        "augmentation": augmentation,
    }


def to_presentation(doc: InputDocument) -> Presentation:
    if doc.kind != "presentation":
        raise MalformedInput(f"expected a presentation document, got {doc.kind}")
    payload = doc.payload
    generators = list(payload["generators"])
    if len(set(generators)) != len(generators):
        raise MalformedInput("duplicate generator names")
    relations = []
    for rel in payload.get("relations", []):
        poly = Poly()
        for term in rel:
            coeff = parse_rational(term["coeff"])
            mono = Poly.const(coeff)
            for var, exp in sorted(term.get("powers", {}).items()):
                if var not in generators:
                    raise MalformedInput(f"relation uses unknown generator {var!r}")
                mono = mono * Poly.var(var) ** int(exp)
            poly = poly + mono
        relations.append(poly)
    return Presentation(generators, relations)


def to_morphism(doc: InputDocument):
    """Build a dg-Lie morphism document: inline source and target dglas."""
    if doc.kind != "morphism":
        raise MalformedInput(f"expected a morphism document, got {doc.kind}")
    payload = doc.payload
    src_doc = InputDocument("dgla", "", "", payload["source"])
    tgt_doc = InputDocument("dgla", "", "", payload["target"])
    source, src_table = to_dgla(src_doc)
    target, tgt_table = to_dgla(tgt_doc)
    blocks: dict[int, list[list[Fraction]]] = {}
    for entry in payload.get("map", []):
        if entry["source"] not in src_table:
            raise MalformedInput(f"map references unknown source label {entry['source']!r}")
        if entry["target"] not in tgt_table:
            raise MalformedInput(f"map references unknown target label {entry['target']!r}")
        (p, i) = src_table[entry["source"]]
        (q, j) = tgt_table[entry["target"]]
        if p != q:
            raise MalformedInput("morphism entries must preserve degree")
        block = blocks.setdefault(
            p,
            [
                [Fraction(0)] * source.space.dim(p)
                for _ in range(target.space.dim(p))
            ],
        )
        block[j][i] += parse_rational(entry["coeff"])
    gmap = GradedLinearMap(source.space, target.space, 0, blocks)
    chain_map = ChainMap(source.complex, target.complex, gmap)
    return DgLieMorphism(source, target, chain_map)
