"""Suggestion generation: prompt, parse, tally, rank.

One iteration runs class suggestions (n permuted prompts, occurrences
tallied across the responses), then attribute suggestions (one canvas-wide
prompt plus a type prompt per new attribute name), then association
suggestions (a relation-kind prompt per candidate pair, refined by a
direction or label prompt).  Tallied occurrences below ``min_frequency``
are dropped; survivors land in the model's candidate store with their
tally added to the stored confidence.
"""

from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass, field

from .catalog import ShotCatalog
from .errors import (
    AlreadyInModel,
    AuthError,
    EmptyModel,
    NotInPair,
    ProviderError,
    ResponseRejected,
    SelfLoopForbidden,
    UnknownKind,
)
from .gateway import Gateway, params_for
from .model import (
    AssociationPayload,
    AttributePayload,
    Candidate,
    ClassPayload,
    Model,
)
from .parsing import (
    parse_association_name_response,
    parse_association_type_response,
    parse_attribute_response,
    parse_attribute_type_response,
    parse_class_response,
    parse_inheritance_direction_response,
)
from .prompts import (
    PromptKind,
    build_association_name_prompt,
    build_association_type_prompt,
    build_attribute_prompt,
    build_attribute_type_prompt,
    build_class_prompt,
    build_inheritance_direction_prompt,
    select_pairs,
)

log = logging.getLogger(__name__)

#: fallback type when the type prompt yields nothing usable
DEFAULT_TYPE = "String"

KIND_WORDS = {
    "association": "association",
    "aggregation": "aggregation",
    "composition": "composition",
    "inheritance": "inheritance",
}


@dataclass(frozen=True)
class RecommenderConfig:
    """Knobs for one suggestion iteration."""

    n: int = 3
    min_frequency: int | None = None
    max_canvas_pairs: int = 10
    model_name: str = "text-davinci-002"

    def effective_min_frequency(self) -> int:
        if self.min_frequency is not None:
            return self.min_frequency
        return 2 if self.n >= 3 else 1


@dataclass
class StageResult:
    """Candidates one stage touched, plus carried context and soft errors."""

    candidates: list[Candidate] = field(default_factory=list)
    pending_pairs: list[tuple[str, str]] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)


@dataclass
class SuggestionSet:
    """Ranked store snapshot handed to callers after an iteration."""

    classes: list[Candidate] = field(default_factory=list)
    attributes: list[Candidate] = field(default_factory=list)
    associations: list[Candidate] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "classes": [candidate_to_dict(c) for c in self.classes],
            "attributes": [candidate_to_dict(c) for c in self.attributes],
            "associations": [candidate_to_dict(c) for c in self.associations],
            "errors": list(self.errors),
        }


def candidate_to_dict(candidate: Candidate) -> dict:
    payload = candidate.payload
    if isinstance(payload, ClassPayload):
        body = {
            "name": payload.name,
            "companionPairs": [list(p) for p in payload.companion_pairs],
        }
    elif isinstance(payload, AttributePayload):
        body = {
            "className": payload.class_name,
            "name": payload.name,
            "typeName": payload.type_name,
            "typeWarning": payload.type_warning,
        }
    else:
        body = {
            "source": payload.source,
            "target": payload.target,
            "kind": payload.kind,
            "name": payload.name,
        }
    return {
        "candidateId": candidate.candidate_id,
        "kind": candidate.kind,
        "confidence": candidate.confidence,
        "payload": body,
    }


def snapshot(model: Model, errors: list[str] | None = None) -> SuggestionSet:
    return SuggestionSet(
        classes=model.candidates.list("class"),
        attributes=model.candidates.list("attribute"),
        associations=model.candidates.list("association"),
        errors=list(errors or ()),
    )


def _complete(gateway: Gateway, text: str, kind: PromptKind, config: RecommenderConfig) -> str:
    return gateway.complete(text, params_for(kind, config.model_name)).text


def suggest_classes(
    model: Model,
    catalog: ShotCatalog,
    gateway: Gateway,
    config: RecommenderConfig,
    rng: random.Random,
) -> StageResult:
    """n permuted related-concept prompts, tallied and thresholded."""
    if model.is_empty():
        raise EmptyModel("cannot suggest classes for an empty canvas")
    result = StageResult()
    canvas = set(model.class_names())
    tally: Counter[str] = Counter()
    companions: dict[str, list[tuple[str, str]]] = {}
    seen_pairs: list[tuple[str, str]] = []
    failures = 0
    last_error: ProviderError | None = None

    for _ in range(config.n):
        selection = select_pairs(model, rng.getrandbits(32))
        prompt = build_class_prompt(model, catalog, selection)
        try:
            text = _complete(gateway, prompt.text, PromptKind.CLASS, config)
        except AuthError:
            raise
        except ProviderError as err:
            failures += 1
            last_error = err
            result.errors.append(f"classes: {err}")
            continue
        batch = parse_class_response(text)
        for name in batch.names():
            if name not in canvas:
                tally[name] += 1
        for pair in batch.pairs:
            if pair[0] == pair[1]:
                continue
            key = tuple(sorted(pair))
            if key not in {tuple(sorted(p)) for p in seen_pairs}:
                seen_pairs.append(pair)
            for member in pair:
                if member not in canvas:
                    companions.setdefault(member, [])
                    if pair not in companions[member]:
                        companions[member].append(pair)

    if failures == config.n and last_error is not None:
        raise ProviderError(f"all {config.n} class prompts failed") from last_error

    threshold = config.effective_min_frequency()
    surviving: set[str] = set()
    for name, count in tally.items():
        if count < threshold:
            continue
        payload = ClassPayload(name, tuple(companions.get(name, ())))
        try:
            result.candidates.append(model.upsert_candidate(payload, count))
            surviving.add(name)
        except AlreadyInModel:
            continue

    for pair in seen_pairs:
        if all(member in canvas or member in surviving for member in pair):
            result.pending_pairs.append(pair)
    return result


def _ranked_extras(model: Model) -> list[tuple[str, list[str]]]:
    return [(c.payload.name, []) for c in model.candidates.list("class")]  # type: ignore[union-attr]


def suggest_attributes(
    model: Model,
    catalog: ShotCatalog,
    gateway: Gateway,
    config: RecommenderConfig,
    extra_classes: list[tuple[str, list[str]]] | None = None,
) -> StageResult:
    """Canvas-wide attribute prompt, then a type prompt per new name.

    The prompt is identical across the n repetitions, so the cache
    collapses them to a single provider call; pending class candidates are
    appended to the query so the provider dresses them too.
    """
    if model.is_empty():
        raise EmptyModel("cannot suggest attributes for an empty canvas")
    result = StageResult()
    extras = _ranked_extras(model) if extra_classes is None else extra_classes
    known = {cls.name: cls.attribute_names() for cls in model.classes}
    for name, attrs in extras:
        known.setdefault(name, list(attrs))

    prompt = build_attribute_prompt(model, catalog, extras)
    tally: Counter[tuple[str, str]] = Counter()
    order: list[tuple[str, str]] = []
    failures = 0
    last_error: ProviderError | None = None
    for _ in range(config.n):
        try:
            text = _complete(gateway, prompt.text, PromptKind.ATTRIBUTE, config)
        except AuthError:
            raise
        except ProviderError as err:
            failures += 1
            last_error = err
            result.errors.append(f"attributes: {err}")
            continue
        for class_name, new_attrs in parse_attribute_response(text, known).items():
            for attr in new_attrs:
                key = (class_name, attr)
                if key not in tally:
                    order.append(key)
                tally[key] += 1

    if failures == config.n and last_error is not None:
        raise ProviderError(f"all {config.n} attribute prompts failed") from last_error

    threshold = config.effective_min_frequency()
    types: dict[str, tuple[str, bool]] = {}
    for class_name, attr in order:
        count = tally[(class_name, attr)]
        if count < threshold:
            continue
        if attr not in types:
            types[attr] = _attribute_type(gateway, catalog, attr, config, result)
        type_name, warned = types[attr]
        payload = AttributePayload(class_name, attr, type_name, warned)
        try:
            result.candidates.append(model.upsert_candidate(payload, count))
        except AlreadyInModel:
            continue
    return result


def _attribute_type(
    gateway: Gateway,
    catalog: ShotCatalog,
    attribute_name: str,
    config: RecommenderConfig,
    result: StageResult,
) -> tuple[str, bool]:
    prompt = build_attribute_type_prompt(catalog, attribute_name)
    try:
        text = _complete(gateway, prompt.text, PromptKind.ATTRIBUTE_TYPE, config)
        return parse_attribute_type_response(text), False
    except AuthError:
        raise
    except (ProviderError, ResponseRejected) as err:
        log.warning("type lookup for %r failed (%s); defaulting to %s",
                    attribute_name, err, DEFAULT_TYPE)
        result.errors.append(f"attribute-type {attribute_name}: {err}")
        return DEFAULT_TYPE, True


def _canvas_pairs(model: Model, cap: int) -> list[tuple[str, str]]:
    """Unconnected canvas pairs, the focus class's pairs first."""
    names = model.class_names()
    focus = model.last_edited
    ordered = names if focus not in names else (
        [focus] + [n for n in names if n != focus]
    )
    out: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            key = tuple(sorted((a, b)))
            if key in seen or model.pair_edge(a, b) is not None:
                continue
            seen.add(key)
            out.append((a, b))
            if len(out) >= cap:
                return out
    return out


def suggest_associations(
    model: Model,
    catalog: ShotCatalog,
    gateway: Gateway,
    config: RecommenderConfig,
    pending_pairs: list[tuple[str, str]] | None = None,
) -> StageResult:
    """Kind-check each candidate pair, then refine.

    ``no`` answers drop the pair; inheritance answers get a direction
    prompt (subclass/superclass resolved before the candidate is stored);
    every other kind gets a label prompt.  Pairs come from the class
    stage's companions first, then from unconnected canvas pairs.
    """
    if model.is_empty():
        raise EmptyModel("cannot suggest associations for an empty canvas")
    result = StageResult()
    queue: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    for pair in list(pending_pairs or ()) + _canvas_pairs(model, config.max_canvas_pairs):
        key = tuple(sorted(pair))
        if pair[0] == pair[1] or key in seen:
            continue
        if model.pair_edge(*pair) is not None:
            continue
        seen.add(key)
        queue.append(pair)

    for pair in queue:
        try:
            kind_text = _complete(
                gateway,
                build_association_type_prompt(catalog, pair).text,
                PromptKind.ASSOCIATION_TYPE,
                config,
            )
            kind = parse_association_type_response(kind_text)
        except AuthError:
            raise
        except (ProviderError, UnknownKind) as err:
            result.errors.append(f"association {pair}: {err}")
            continue
        if kind == "no":
            continue

        if kind == "inheritance":
            try:
                direction_text = _complete(
                    gateway,
                    build_inheritance_direction_prompt(catalog, pair).text,
                    PromptKind.INHERITANCE_DIRECTION,
                    config,
                )
                super_class = parse_inheritance_direction_response(direction_text, pair)
            except AuthError:
                raise
            except (ProviderError, NotInPair) as err:
                result.errors.append(f"direction {pair}: {err}")
                continue
            sub = pair[0] if pair[1] == super_class else pair[1]
            payload = AssociationPayload(sub, super_class, "inheritance")
        else:
            label: str | None
            try:
                name_text = _complete(
                    gateway,
                    build_association_name_prompt(model, catalog, pair).text,
                    PromptKind.ASSOCIATION_NAME,
                    config,
                )
                label = parse_association_name_response(name_text)
            except AuthError:
                raise
            except (ProviderError, ResponseRejected):
                label = None
            payload = AssociationPayload(pair[0], pair[1], KIND_WORDS[kind], label)

        try:
            result.candidates.append(model.upsert_candidate(payload))
        except (AlreadyInModel, SelfLoopForbidden):
            continue
    return result


def run_iteration(
    model: Model,
    catalog: ShotCatalog,
    gateway: Gateway,
    config: RecommenderConfig,
    rng: random.Random,
    kinds: set[str] | None = None,
) -> SuggestionSet:
    """One full suggestion pass; ``kinds`` limits the stages run."""
    if model.is_empty():
        raise EmptyModel("cannot run suggestions on an empty canvas")
    wanted = kinds or {"classes", "attributes", "associations"}
    errors: list[str] = []
    pending: list[tuple[str, str]] = []
    if "classes" in wanted:
        stage = suggest_classes(model, catalog, gateway, config, rng)
        errors.extend(stage.errors)
        pending = stage.pending_pairs
    if "attributes" in wanted:
        stage = suggest_attributes(model, catalog, gateway, config)
        errors.extend(stage.errors)
    if "associations" in wanted:
        stage = suggest_associations(model, catalog, gateway, config, pending_pairs=pending)
        errors.extend(stage.errors)
    return snapshot(model, errors)
