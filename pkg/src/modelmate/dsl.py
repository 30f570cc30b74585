"""Line-oriented text format for domain models, plus a JSON interchange form.

The format is deliberately small::

    package HospitalSystem

    class Hospital {
      name: String
      numRooms: int
    }

    Hospital o-- Staff
    Doctor -|> Staff
    Doctor --> Patient : treats

``-->`` is a plain association, ``o--`` aggregation, ``*--`` composition and
``-|>`` inheritance (subclass on the left).  ``#`` starts a comment.
Identifiers are letters only (camelCase by convention).  Input may use CRLF;
output is always LF-terminated UTF-8.
"""

from __future__ import annotations

import re

from .errors import ModelError, ParseError
from .model import Association, Attribute, ClassEntity, Model

_IDENT = re.compile(r"[A-Za-z]+\Z")
_PACKAGE = re.compile(r"package\s+([A-Za-z]+)\s*\Z")
_CLASS_OPEN = re.compile(r"class\s+([A-Za-z]+)\s*\{\s*(\})?\s*\Z")
_ATTRIBUTE = re.compile(r"([A-Za-z]+)\s*:\s*([A-Za-z]+)\s*\Z")
_EDGE = re.compile(
    r"([A-Za-z]+)\s*(-->|o--|\*--|-\|>)\s*([A-Za-z]+)\s*(?::\s*([A-Za-z]+)\s*)?\Z"
)

_GLYPH_TO_KIND = {
    "-->": "association",
    "o--": "aggregation",
    "*--": "composition",
    "-|>": "inheritance",
}
_KIND_TO_GLYPH = {kind: glyph for glyph, kind in _GLYPH_TO_KIND.items()}


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    if pos >= 0:
        line = line[:pos]
    return line.strip()


def parse_model(text: str) -> Model:
    """Parse model text, raising ParseError with the offending line."""
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    model: Model | None = None
    current: ClassEntity | None = None

    for lineno, raw in enumerate(lines, start=1):
        line = _strip_comment(raw)
        if not line:
            continue

        if model is None:
            got = _PACKAGE.match(line)
            if not got:
                raise ParseError("expected 'package <Name>' first", lineno, 1)
            model = Model(got.group(1))
            continue

        if current is not None:
            if line == "}":
                current = None
                continue
            got = _ATTRIBUTE.match(line)
            if not got:
                raise ParseError(
                    "expected '<name>: <Type>' or '}' inside class body", lineno, 1
                )
            name, type_name = got.groups()
            if current.attribute(name) is not None:
                raise ParseError(
                    f"attribute {name!r} repeated in class {current.name!r}", lineno, 1
                )
            current.attributes.append(Attribute(name, type_name))
            continue

        if _PACKAGE.match(line):
            raise ParseError("duplicate package line", lineno, 1)

        got = _CLASS_OPEN.match(line)
        if got:
            name, closed = got.groups()
            if model.find_class(name) is not None:
                raise ParseError(f"class {name!r} declared twice", lineno, 1)
            cls = ClassEntity(name)
            model.classes.append(cls)
            if not closed:
                current = cls
            continue

        got = _EDGE.match(line)
        if got:
            source, glyph, target, label = got.groups()
            kind = _GLYPH_TO_KIND[glyph]
            if kind == "inheritance" and label is not None:
                raise ParseError("inheritance edges take no label", lineno, 1)
            try:
                model.add_association(source, target, kind, label)
            except ModelError as err:
                raise ParseError(str(err), lineno, 1) from err
            continue

        raise ParseError(f"unrecognized line {line!r}", lineno, 1)

    if model is None:
        raise ParseError("empty input, expected 'package <Name>'", 1, 1)
    if current is not None:
        raise ParseError(f"class {current.name!r} body never closed", len(lines), 1)
    model.last_edited = None
    return model


def serialize_model(model: Model) -> str:
    """Render the canonical text form (always parseable back)."""
    out: list[str] = [f"package {model.package_name}", ""]
    for cls in model.classes:
        out.append(f"class {cls.name} {{")
        for attr in cls.attributes:
            out.append(f"  {attr.name}: {attr.type_name}")
        out.append("}")
        out.append("")
    for assoc in model.associations:
        line = f"{assoc.source} {_KIND_TO_GLYPH[assoc.kind]} {assoc.target}"
        if assoc.name:
            line += f" : {assoc.name}"
        out.append(line)
    while out and out[-1] == "":
        out.pop()
    return "\n".join(out) + "\n"


# --- JSON interchange -------------------------------------------------------


def model_to_dict(model: Model) -> dict:
    return {
        "packageName": model.package_name,
        "classes": [
            {
                "name": cls.name,
                "attributes": [
                    {"name": a.name, "typeName": a.type_name} for a in cls.attributes
                ],
            }
            for cls in model.classes
        ],
        "associations": [
            {
                "source": a.source,
                "target": a.target,
                "kind": a.kind,
                "name": a.name,
            }
            for a in model.associations
        ],
    }


def model_from_dict(data: dict) -> Model:
    try:
        model = Model(str(data["packageName"]))
        for item in data.get("classes", ()):
            cls = ClassEntity(str(item["name"]))
            for attr in item.get("attributes", ()):
                cls.attributes.append(
                    Attribute(str(attr["name"]), str(attr.get("typeName", "String")))
                )
            model.classes.append(cls)
        for item in data.get("associations", ()):
            model.associations.append(
                Association(
                    str(item["source"]),
                    str(item["target"]),
                    str(item.get("kind", "association")),
                    item.get("name"),
                )
            )
    except (KeyError, TypeError) as err:
        raise ParseError(f"bad interchange payload: {err}") from err
    return model
