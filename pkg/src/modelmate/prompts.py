"""Few-shot prompt builders: one per suggestion kind.

Each prompt is a fixed instruction line, catalog shots, then the encoded
model under construction as the query.  Builders are pure: identical
inputs give byte-identical text.  Shots never contain the query's own
names (they are filtered out case-insensitively), so the provider cannot
echo the answer from the examples.
"""

from __future__ import annotations

import enum
import random
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .catalog import ShotCatalog
from .model import Model


class PromptKind(enum.Enum):
    CLASS = "class"
    ATTRIBUTE = "attribute"
    ATTRIBUTE_TYPE = "attribute-type"
    ASSOCIATION_NAME = "association-name"
    ASSOCIATION_TYPE = "association-type"
    INHERITANCE_DIRECTION = "inheritance-direction"


INSTRUCTIONS = {
    PromptKind.CLASS: "Generate related concepts:",
    PromptKind.ATTRIBUTE: "Generate missing attributes for each class in this class diagram:",
    PromptKind.ATTRIBUTE_TYPE: "Generate attribute type:",
    PromptKind.ASSOCIATION_NAME: "Predict association name:",
    PromptKind.ASSOCIATION_TYPE: (
        "Specify the nature of the association between these concepts: "
        "inheritance or association or composition or no:"
    ),
    # the doubled spaces are part of the fixed instruction string
    PromptKind.INHERITANCE_DIRECTION: "Select the  super class  in this UML inheritance relationship:",
}


@dataclass(frozen=True)
class Prompt:
    kind: PromptKind
    text: str


@dataclass(frozen=True)
class PairSelection:
    """Class groups to encode in a class prompt, already in final order.

    Groups are usually connected pairs; when the canvas graph is too
    sparse they fall back to singletons (one bracket per class).  The
    seed that produced the ordering is kept for reproducibility.
    """

    groups: tuple[tuple[str, ...], ...]
    permutation_seed: int


def select_pairs(
    model: Model,
    permutation_seed: int,
    max_pairs: int = 4,
    focus: str | None = None,
) -> PairSelection:
    """Pick the class pairs a class prompt will encode.

    Walks the association graph breadth-first from the most recently
    edited class and keeps up to ``max_pairs`` connected pairs.  With
    fewer than two connected pairs the whole canvas is encoded as
    singleton groups instead.  The resulting group order is shuffled
    with ``permutation_seed`` so repeated prompts vary.
    """
    names = model.class_names()
    adjacency: dict[str, list[tuple[str, str]]] = {name: [] for name in names}
    for assoc in model.associations:
        adjacency[assoc.source].append((assoc.source, assoc.target))
        adjacency[assoc.target].append((assoc.source, assoc.target))

    start = focus or model.last_edited
    if start not in adjacency:
        start = names[0] if names else None

    pairs: list[tuple[str, str]] = []
    if start is not None:
        seen_pairs: set[tuple[str, str]] = set()
        visited = {start}
        queue = deque([start])
        while queue and len(pairs) < max_pairs:
            current = queue.popleft()
            for source, target in adjacency[current]:
                key = tuple(sorted((source, target)))
                if key in seen_pairs:
                    continue
                seen_pairs.add(key)
                pairs.append((source, target))
                if len(pairs) >= max_pairs:
                    break
                for nxt in (source, target):
                    if nxt not in visited:
                        visited.add(nxt)
                        queue.append(nxt)

    if len(pairs) >= 2:
        groups: list[tuple[str, ...]] = [tuple(p) for p in pairs]
    else:
        groups = [(name,) for name in names]
    random.Random(permutation_seed).shuffle(groups)
    return PairSelection(tuple(groups), permutation_seed)


def _render_groups(groups: Sequence[Sequence[str]]) -> str:
    return ", ".join("[" + ", ".join(group) + "]" for group in groups)


def build_class_prompt(model: Model, catalog: ShotCatalog, selection: PairSelection) -> Prompt:
    """Related-concept prompt: diagram shots, then the canvas as the query."""
    lines = [INSTRUCTIONS[PromptKind.CLASS]]
    for diagram in catalog.diagrams:
        if diagram.pairs:
            lines.append(f"{diagram.name}: {_render_groups(diagram.pairs)}")
    lines.append(f"{model.package_name}: {_render_groups(selection.groups)}")
    return Prompt(PromptKind.CLASS, "\n".join(lines))


def _attribute_segments(listing: Sequence[tuple[str, Sequence[str]]]) -> str:
    return "; ".join(f"{name}: [{', '.join(attrs)}]" for name, attrs in listing)


def build_attribute_prompt(
    model: Model,
    catalog: ShotCatalog,
    extra_classes: Sequence[tuple[str, Sequence[str]]] = (),
) -> Prompt:
    """Missing-attribute prompt over the whole canvas.

    ``extra_classes`` lets the caller append classes that are not on the
    canvas yet (pending class candidates), so the provider fills them too.
    """
    lines = [INSTRUCTIONS[PromptKind.ATTRIBUTE]]
    for diagram in catalog.diagrams:
        example = diagram.attribute_example
        if example is None:
            continue
        lines.append(
            f"package {diagram.name}: {_attribute_segments(example.before)}"
            f" => {_attribute_segments(example.after)}"
        )
    listing = [(cls.name, cls.attribute_names()) for cls in model.classes]
    listing.extend((name, list(attrs)) for name, attrs in extra_classes)
    lines.append(f"package {model.package_name}: {_attribute_segments(listing)} =>")
    return Prompt(PromptKind.ATTRIBUTE, "\n".join(lines))


def build_attribute_type_prompt(catalog: ShotCatalog, attribute_name: str) -> Prompt:
    """Type prompt: known name=>type pairs on one line, query last."""
    shots = [
        f"{name} => {type_name}"
        for name, type_name in catalog.attribute_type_pairs
        if name.lower() != attribute_name.lower()
    ]
    shots.append(f"{attribute_name} =>")
    return Prompt(
        PromptKind.ATTRIBUTE_TYPE,
        f"{INSTRUCTIONS[PromptKind.ATTRIBUTE_TYPE]}\n{', '.join(shots)}",
    )


def _leaks(query: tuple[str, str], *names: str) -> bool:
    lowered = {q.lower() for q in query}
    return any(name.lower() in lowered for name in names)


def build_association_name_prompt(
    model: Model, catalog: ShotCatalog, pair: tuple[str, str]
) -> Prompt:
    """Label prompt: catalog shots plus the canvas's own named edges."""
    shots = [
        f"{a}, {b} => {label}"
        for a, b, label in catalog.association_name_pairs
        if not _leaks(pair, a, b)
    ]
    for assoc in model.associations:
        if assoc.name and not _leaks(pair, assoc.source, assoc.target):
            shots.append(f"{assoc.source}, {assoc.target} => {assoc.name}")
    lines = [INSTRUCTIONS[PromptKind.ASSOCIATION_NAME]]
    if shots:
        lines.append(" ; ".join(shots) + " ;")
    lines.append(f"{pair[0]}, {pair[1]} =>")
    return Prompt(PromptKind.ASSOCIATION_NAME, "\n".join(lines))


def build_association_type_prompt(catalog: ShotCatalog, pair: tuple[str, str]) -> Prompt:
    """Relation-kind prompt: one shot per line, query pair last."""
    lines = [INSTRUCTIONS[PromptKind.ASSOCIATION_TYPE]]
    for a, b, kind in catalog.association_type_pairs:
        if not _leaks(pair, a, b):
            lines.append(f"{a}, {b} => {kind}")
    lines.append(f"{pair[0]}, {pair[1]} =>")
    return Prompt(PromptKind.ASSOCIATION_TYPE, "\n".join(lines))


def build_inheritance_direction_prompt(
    catalog: ShotCatalog, pair: tuple[str, str]
) -> Prompt:
    """Superclass-pick prompt; shots keep their original display order."""
    lines = [INSTRUCTIONS[PromptKind.INHERITANCE_DIRECTION]]
    for shot in catalog.inheritance_pairs:
        if not _leaks(pair, *shot.pair):
            lines.append(f"{shot.pair[0]}, {shot.pair[1]} => {shot.super_class}")
    lines.append(f"{pair[0]}, {pair[1]} =>")
    return Prompt(PromptKind.INHERITANCE_DIRECTION, "\n".join(lines))
