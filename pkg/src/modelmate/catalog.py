"""Few-shot example catalog: worked diagrams and answer pairs.

The catalog is a JSON file with five sections:

- ``diagrams``: named example diagrams; ones with association ``pairs``
  feed the class prompt, ones with an ``attributeExample`` (before/after
  attribute listings) feed the attribute prompt.
- ``attributeTypePairs``: ``[name, type]`` shots for type prediction.
- ``associationNamePairs``: ``[classA, classB, label]`` shots.
- ``associationTypePairs``: ``[classA, classB, kind]`` shots, where kind is
  one of inheritance/association/composition/aggregation/no.
- ``inheritancePairs``: ``{"pair": [a, b], "super": x}`` shots keeping the
  display order of the pair; ``super`` must be one of the two.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError

_KIND_VOCAB = {"inheritance", "association", "composition", "aggregation", "no"}


@dataclass
class AttributeExample:
    before: list[tuple[str, list[str]]]
    after: list[tuple[str, list[str]]]


@dataclass
class CatalogDiagram:
    name: str
    pairs: list[tuple[str, str]] = field(default_factory=list)
    attribute_example: AttributeExample | None = None


@dataclass
class InheritanceShot:
    pair: tuple[str, str]
    super_class: str


@dataclass
class ShotCatalog:
    diagrams: list[CatalogDiagram]
    attribute_type_pairs: list[tuple[str, str]]
    association_name_pairs: list[tuple[str, str, str]]
    association_type_pairs: list[tuple[str, str, str]]
    inheritance_pairs: list[InheritanceShot]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _listing(entries, width: int, section: str) -> list[tuple]:
    out = []
    for entry in entries:
        _require(
            isinstance(entry, list) and len(entry) == width,
            f"{section}: each entry must be a list of {width} strings",
        )
        _require(
            all(isinstance(part, str) and part.strip() for part in entry),
            f"{section}: entries must be non-empty strings",
        )
        out.append(tuple(entry))
    return out


def _attribute_listing(entries, section: str) -> list[tuple[str, list[str]]]:
    out = []
    for entry in entries:
        _require(
            isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], str),
            f"{section}: expected [className, [attributes...]] entries",
        )
        name, attrs = entry
        _require(
            isinstance(attrs, list) and all(isinstance(a, str) for a in attrs),
            f"{section}: attributes must be strings",
        )
        out.append((name, list(attrs)))
    return out


def catalog_from_dict(data: dict) -> ShotCatalog:
    _require(isinstance(data, dict), "catalog root must be an object")
    diagrams = []
    for item in data.get("diagrams", []):
        _require(isinstance(item, dict) and "name" in item, "diagrams: entries need a name")
        example = None
        if item.get("attributeExample") is not None:
            raw = item["attributeExample"]
            example = AttributeExample(
                before=_attribute_listing(raw.get("before", []), "attributeExample.before"),
                after=_attribute_listing(raw.get("after", []), "attributeExample.after"),
            )
            _require(bool(example.before and example.after),
                     "attributeExample needs both before and after listings")
        pairs = _listing(item.get("pairs", []), 2, "diagrams.pairs")
        diagrams.append(CatalogDiagram(item["name"], pairs, example))

    type_pairs = _listing(data.get("attributeTypePairs", []), 2, "attributeTypePairs")
    name_pairs = _listing(data.get("associationNamePairs", []), 3, "associationNamePairs")
    kind_pairs = _listing(data.get("associationTypePairs", []), 3, "associationTypePairs")
    for a, b, kind in kind_pairs:
        _require(kind in _KIND_VOCAB, f"associationTypePairs: unknown kind {kind!r}")

    inheritance = []
    for item in data.get("inheritancePairs", []):
        _require(
            isinstance(item, dict) and "pair" in item and "super" in item,
            "inheritancePairs: entries need pair and super",
        )
        pair = item["pair"]
        _require(isinstance(pair, list) and len(pair) == 2, "inheritancePairs: pair must hold two names")
        _require(item["super"] in pair, f"inheritancePairs: super {item['super']!r} not in pair {pair}")
        inheritance.append(InheritanceShot((pair[0], pair[1]), item["super"]))

    return ShotCatalog(diagrams, type_pairs, name_pairs, kind_pairs, inheritance)


def load_catalog(path: str | Path | None = None) -> ShotCatalog:
    """Load a catalog file, or the bundled default when path is None."""
    if path is None:
        text = resources.files("modelmate.data").joinpath("catalog.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"catalog is not valid JSON: {err}") from err
    return catalog_from_dict(data)
