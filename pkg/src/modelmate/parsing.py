"""Turning raw completion text back into model vocabulary.

Completions are noisy: stray whitespace, digits, odd casing, continuation
junk after the answer.  Every parser here is total over arbitrary text in
the sense that it either returns clean names or raises one of the typed
errors (ResponseRejected, UnknownKind, NotInPair); nothing propagates raw
provider text into the model.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import NotInPair, ResponseRejected, UnknownKind

_BRACKET_GROUP = re.compile(r"\[([^\]]*)\]")
_ATTR_SEGMENT = re.compile(r"([A-Za-z][A-Za-z ]*?)\s*:?\s*\[([^\]]*)\]")
_WORD = re.compile(r"[A-Za-z]+")

#: canonical spellings of the six well-known attribute types
KNOWN_TYPES = {
    "string": "String",
    "int": "int",
    "float": "float",
    "double": "double",
    "boolean": "boolean",
    "date": "Date",
}


def normalize_name(raw: str, style: str = "camel") -> str:
    """Clean a model-element name out of free text.

    Digits are dropped, punctuation and whitespace split words, and the
    words are joined in camelCase (or PascalCase for ``style="pascal"``).
    Only the very first letter is re-cased, so interior capitalization
    like ``doctorName`` survives.  Raises ResponseRejected when nothing
    name-like remains.
    """
    words = _WORD.findall(raw)
    if not words:
        raise ResponseRejected(f"no usable name in {raw!r}")
    head, *rest = words
    if style == "pascal":
        head = head[0].upper() + head[1:]
    else:
        head = head[0].lower() + head[1:]
    return head + "".join(word[0].upper() + word[1:] for word in rest)


@dataclass
class ClassBatch:
    """Names pulled from one related-concepts completion.

    ``pairs`` keeps the bracketed two-somes (candidate + companion edge),
    ``orphans`` holds singletons and overflow members.
    """

    pairs: list[tuple[str, str]] = field(default_factory=list)
    orphans: list[str] = field(default_factory=list)

    def names(self) -> list[str]:
        """Every mentioned name, in reading order, duplicates kept."""
        out: list[str] = []
        for a, b in self.pairs:
            out.extend((a, b))
        out.extend(self.orphans)
        return out


def parse_class_response(text: str) -> ClassBatch:
    """Pull ``[A, B]`` groups out of a related-concepts completion."""
    batch = ClassBatch()
    for group in _BRACKET_GROUP.findall(text):
        members = []
        for chunk in group.split(","):
            try:
                members.append(normalize_name(chunk, style="pascal"))
            except ResponseRejected:
                continue
        if len(members) >= 2:
            batch.pairs.append((members[0], members[1]))
            batch.orphans.extend(members[2:])
        elif members:
            batch.orphans.append(members[0])
    return batch


def parse_attribute_response(
    text: str, known_classes: dict[str, list[str]]
) -> dict[str, list[str]]:
    """Extract per-class NEW attribute names from an attribute completion.

    ``known_classes`` maps canvas (or pending) class names to the
    attribute names they already carry; only those classes are read, and
    already-present attributes are dropped.  Returns class -> new names.
    """
    fresh: dict[str, list[str]] = {}
    for raw_name, raw_attrs in _ATTR_SEGMENT.findall(text):
        try:
            class_name = normalize_name(raw_name, style="pascal")
        except ResponseRejected:
            continue
        if class_name not in known_classes:
            continue
        existing = set(known_classes[class_name])
        bucket = fresh.setdefault(class_name, [])
        for chunk in raw_attrs.split(","):
            try:
                attr = normalize_name(chunk, style="camel")
            except ResponseRejected:
                continue
            if attr in existing or attr in bucket:
                continue
            bucket.append(attr)
    return fresh


def _after_arrow(text: str) -> str:
    if "=>" in text:
        return text.rsplit("=>", 1)[1]
    return text


def parse_attribute_type_response(text: str) -> str:
    """First type token of a completion, canonicalized when well-known."""
    tail = _after_arrow(text).strip()
    token = re.split(r"[\s;,]+", tail)[0].strip(".:=>()[]{}\"'")
    if not token or not _WORD.search(token):
        raise ResponseRejected(f"no type token in {text!r}")
    return KNOWN_TYPES.get(token.lower(), token)


def parse_association_type_response(text: str) -> str:
    """Relation-kind answer: one of the five vocabulary words."""
    found = _WORD.search(text)
    if not found:
        raise UnknownKind(f"no kind word in {text!r}")
    word = found.group(0).lower()
    if word in ("inheritance", "association", "composition", "aggregation", "no"):
        return word
    raise UnknownKind(f"unexpected kind {word!r}")


def parse_inheritance_direction_response(text: str, pair: tuple[str, str]) -> str:
    """Which member of ``pair`` the completion names as the superclass.

    Matching is case-insensitive and returns the canvas spelling.
    """
    found = _WORD.search(text)
    if not found:
        raise NotInPair(f"no class named in {text!r}")
    word = found.group(0).lower()
    for member in pair:
        if member.lower() == word:
            return member
    raise NotInPair(f"{found.group(0)!r} is neither of {pair}")


def parse_association_name_response(text: str) -> str:
    """Label for an association edge, camelCased."""
    tail = _after_arrow(text)
    segment = re.split(r"[;,\n]", tail)[0]
    return normalize_name(segment, style="camel")
