"""In-memory domain model: classes, attributes, associations, candidates.

The model is the single source of truth during a modeling session.  Real
elements live on the "canvas"; suggested elements live in the candidate
store until they are accepted or dismissed.  Every mutation purges
candidates that now duplicate canvas content, so the two never overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import (
    AlreadyInModel,
    DuplicateAttribute,
    DuplicateName,
    DuplicatePair,
    SelfLoopForbidden,
    UnknownCandidate,
    UnknownClass,
    UnknownElement,
)

ASSOCIATION_KINDS = ("association", "aggregation", "composition", "inheritance")

#: Hard cap on candidates surfaced per kind, however many accumulate.
MAX_PRESENTED = 20


@dataclass
class Attribute:
    name: str
    type_name: str = "String"


@dataclass
class ClassEntity:
    name: str
    attributes: list[Attribute] = field(default_factory=list)

    def attribute(self, name: str) -> Attribute | None:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        return None

    def attribute_names(self) -> list[str]:
        return [a.name for a in self.attributes]


@dataclass
class Association:
    """Directed edge; for inheritance the source is the subclass."""

    source: str
    target: str
    kind: str = "association"
    name: str | None = None

    def pair(self) -> tuple[str, str]:
        """Unordered endpoint pair, canonically sorted."""
        return tuple(sorted((self.source, self.target)))  # type: ignore[return-value]


# --- candidate payloads ----------------------------------------------------


@dataclass(frozen=True)
class ClassPayload:
    """Suggested class plus the pair-associations it arrived with."""

    name: str
    companion_pairs: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class AttributePayload:
    class_name: str
    name: str
    type_name: str = "String"
    #: set when the type lookup failed and String was assumed
    type_warning: bool = False


@dataclass(frozen=True)
class AssociationPayload:
    source: str
    target: str
    kind: str = "association"
    name: str | None = None


Payload = ClassPayload | AttributePayload | AssociationPayload


def payload_kind(payload: Payload) -> str:
    if isinstance(payload, ClassPayload):
        return "class"
    if isinstance(payload, AttributePayload):
        return "attribute"
    return "association"


def payload_identity(payload: Payload) -> str:
    """Canonical dedup key.

    Associations key on the unordered endpoint pair only: a pair suggested
    again with a different kind or label reinforces the existing candidate
    rather than spawning a rival one.
    """
    if isinstance(payload, ClassPayload):
        return f"class:{payload.name}"
    if isinstance(payload, AttributePayload):
        return f"attribute:{payload.class_name}.{payload.name}"
    a, b = sorted((payload.source, payload.target))
    return f"association:{a}-{b}"


@dataclass
class Candidate:
    candidate_id: str
    kind: str
    payload: Payload
    confidence: int = 1


class CandidateStore:
    """Ranked holding area for suggestions, keyed by payload identity."""

    def __init__(self, max_presented: int = MAX_PRESENTED):
        self.max_presented = max_presented
        self._by_identity: dict[str, Candidate] = {}
        self._serial = 0

    def __len__(self) -> int:
        return len(self._by_identity)

    def upsert(self, payload: Payload, count: int = 1) -> Candidate:
        """Add a payload or bump the confidence of its existing twin.

        Class payloads merge companion pairs (union, first-seen order);
        other payloads keep the stored version and only gain confidence.
        """
        identity = payload_identity(payload)
        existing = self._by_identity.get(identity)
        if existing is not None:
            existing.confidence += count
            if isinstance(payload, ClassPayload) and payload.companion_pairs:
                merged = list(existing.payload.companion_pairs)  # type: ignore[union-attr]
                for pair in payload.companion_pairs:
                    if pair not in merged:
                        merged.append(pair)
                existing.payload = replace(existing.payload, companion_pairs=tuple(merged))  # type: ignore[arg-type]
            return existing
        self._serial += 1
        candidate = Candidate(f"c{self._serial}", payload_kind(payload), payload, count)
        self._by_identity[identity] = candidate
        return candidate

    def get(self, candidate_id: str) -> Candidate:
        for candidate in self._by_identity.values():
            if candidate.candidate_id == candidate_id:
                return candidate
        raise UnknownCandidate(f"no candidate {candidate_id!r}")

    def remove(self, candidate_id: str) -> Candidate:
        for identity, candidate in self._by_identity.items():
            if candidate.candidate_id == candidate_id:
                del self._by_identity[identity]
                return candidate
        raise UnknownCandidate(f"no candidate {candidate_id!r}")

    def discard_identity(self, identity: str) -> None:
        self._by_identity.pop(identity, None)

    def find(self, payload: Payload) -> Candidate | None:
        return self._by_identity.get(payload_identity(payload))

    def list(self, kind: str | None = None) -> list[Candidate]:
        """Candidates ranked by confidence desc then identity, capped."""
        picked = [
            c for c in self._by_identity.values() if kind is None or c.kind == kind
        ]
        picked.sort(key=lambda c: (-c.confidence, payload_identity(c.payload)))
        return picked[: self.max_presented]

    def all_candidates(self) -> list[Candidate]:
        """Every stored candidate, ranked, without the presentation cap."""
        picked = list(self._by_identity.values())
        picked.sort(key=lambda c: (-c.confidence, payload_identity(c.payload)))
        return picked


@dataclass
class AcceptedElement:
    """One canvas element materialized by an accept."""

    kind: str
    description: str


class Model:
    """A package of classes plus associations, with a candidate store."""

    def __init__(self, package_name: str = "Model"):
        self.package_name = package_name
        self.classes: list[ClassEntity] = []
        self.associations: list[Association] = []
        self.candidates = CandidateStore()
        #: name of the most recently created/edited class, for prompt focus
        self.last_edited: str | None = None

    # --- lookups ---------------------------------------------------------

    def find_class(self, name: str) -> ClassEntity | None:
        for cls in self.classes:
            if cls.name == name:
                return cls
        return None

    def require_class(self, name: str) -> ClassEntity:
        cls = self.find_class(name)
        if cls is None:
            raise UnknownClass(f"no class {name!r} on the canvas")
        return cls

    def class_names(self) -> list[str]:
        return [c.name for c in self.classes]

    def pair_edge(self, a: str, b: str) -> Association | None:
        wanted = tuple(sorted((a, b)))
        for assoc in self.associations:
            if assoc.pair() == wanted:
                return assoc
        return None

    def is_empty(self) -> bool:
        return not self.classes

    def element_count(self) -> int:
        """Classes + attributes + associations, the contribution denominator."""
        return (
            len(self.classes)
            + sum(len(c.attributes) for c in self.classes)
            + len(self.associations)
        )

    # --- canvas mutations --------------------------------------------------

    def add_class(self, name: str) -> ClassEntity:
        if self.find_class(name) is not None:
            raise DuplicateName(f"class {name!r} already exists")
        cls = ClassEntity(name)
        self.classes.append(cls)
        self.last_edited = name
        self._purge_candidates()
        return cls

    def remove_class(self, name: str) -> None:
        cls = self.require_class(name)
        self.classes.remove(cls)
        self.associations = [a for a in self.associations if name not in (a.source, a.target)]
        if self.last_edited == name:
            self.last_edited = None
        self._purge_candidates()

    def add_attribute(self, class_name: str, name: str, type_name: str = "String") -> Attribute:
        cls = self.require_class(class_name)
        if cls.attribute(name) is not None:
            raise DuplicateAttribute(f"{class_name}.{name} already exists")
        attr = Attribute(name, type_name)
        cls.attributes.append(attr)
        self.last_edited = class_name
        self._purge_candidates()
        return attr

    def remove_attribute(self, class_name: str, name: str) -> None:
        cls = self.require_class(class_name)
        attr = cls.attribute(name)
        if attr is None:
            raise UnknownElement(f"no attribute {class_name}.{name}")
        cls.attributes.remove(attr)
        self.last_edited = class_name
        self._purge_candidates()

    def add_association(
        self,
        source: str,
        target: str,
        kind: str = "association",
        name: str | None = None,
    ) -> Association:
        if source == target:
            raise SelfLoopForbidden(f"{source!r} cannot associate with itself")
        if kind not in ASSOCIATION_KINDS:
            raise ValueError(f"unknown association kind {kind!r}")
        self.require_class(source)
        self.require_class(target)
        if self.pair_edge(source, target) is not None:
            raise DuplicatePair(f"pair ({source}, {target}) already connected")
        assoc = Association(source, target, kind, name)
        self.associations.append(assoc)
        self.last_edited = source
        self._purge_candidates()
        return assoc

    def remove_association(self, source: str, target: str) -> None:
        assoc = self.pair_edge(source, target)
        if assoc is None:
            raise UnknownElement(f"no association between {source!r} and {target!r}")
        self.associations.remove(assoc)
        self._purge_candidates()

    # --- candidate lifecycle -------------------------------------------------

    def upsert_candidate(self, payload: Payload, count: int = 1) -> Candidate:
        """Stage a suggestion, refusing payloads already on the canvas."""
        if self._payload_on_canvas(payload):
            raise AlreadyInModel(payload_identity(payload))
        if isinstance(payload, AssociationPayload) and payload.source == payload.target:
            raise SelfLoopForbidden(f"{payload.source!r} cannot associate with itself")
        return self.candidates.upsert(payload, count)

    def dismiss_candidate(self, candidate_id: str) -> Candidate:
        return self.candidates.remove(candidate_id)

    def accept_candidate(self, candidate_id: str) -> list[AcceptedElement]:
        """Materialize a candidate onto the canvas.

        Class candidates also place their companion pairs: when both
        endpoints are real the pair becomes an (unnamed) association right
        away, otherwise it is re-queued as an association candidate.
        Elements that appeared on the canvas in the meantime are skipped
        silently.  Raises UnknownClass (leaving the candidate in place)
        when an attribute/association candidate references a missing class.
        """
        candidate = self.candidates.get(candidate_id)
        payload = candidate.payload
        created: list[AcceptedElement] = []

        if isinstance(payload, ClassPayload):
            if self.find_class(payload.name) is None:
                self._plain_add_class(payload.name)
                created.append(AcceptedElement("class", payload.name))
            self.candidates.remove(candidate_id)
            for a, b in payload.companion_pairs:
                if a == b:
                    continue
                if self.find_class(a) is not None and self.find_class(b) is not None:
                    if self.pair_edge(a, b) is None:
                        self.associations.append(Association(a, b, "association"))
                        created.append(AcceptedElement("association", f"{a}-{b}"))
                else:
                    try:
                        self.upsert_candidate(AssociationPayload(a, b))
                    except AlreadyInModel:
                        pass
        elif isinstance(payload, AttributePayload):
            cls = self.require_class(payload.class_name)
            if cls.attribute(payload.name) is None:
                cls.attributes.append(Attribute(payload.name, payload.type_name))
                created.append(
                    AcceptedElement("attribute", f"{payload.class_name}.{payload.name}")
                )
            self.candidates.remove(candidate_id)
        else:
            self.require_class(payload.source)
            self.require_class(payload.target)
            if self.pair_edge(payload.source, payload.target) is None:
                self.associations.append(
                    Association(payload.source, payload.target, payload.kind, payload.name)
                )
                created.append(
                    AcceptedElement("association", f"{payload.source}-{payload.target}")
                )
            self.candidates.remove(candidate_id)

        self.last_edited = self._accept_focus(payload)
        self._purge_candidates()
        return created

    # --- internals -------------------------------------------------------------

    def _plain_add_class(self, name: str) -> None:
        # add_class minus the purge; accept runs one purge at the end
        self.classes.append(ClassEntity(name))

    def _accept_focus(self, payload: Payload) -> str:
        if isinstance(payload, ClassPayload):
            return payload.name
        if isinstance(payload, AttributePayload):
            return payload.class_name
        return payload.source

    def _payload_on_canvas(self, payload: Payload) -> bool:
        if isinstance(payload, ClassPayload):
            return self.find_class(payload.name) is not None
        if isinstance(payload, AttributePayload):
            cls = self.find_class(payload.class_name)
            return cls is not None and cls.attribute(payload.name) is not None
        return self.pair_edge(payload.source, payload.target) is not None

    def _purge_candidates(self) -> None:
        for candidate in list(self.candidates.all_candidates()):
            if self._payload_on_canvas(candidate.payload):
                self.candidates.discard_identity(payload_identity(candidate.payload))
