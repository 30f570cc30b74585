"""A modeling session: one model, one assistance mode, one log.

Edits are applied by the caller's thread; suggestion refreshes run on a
single background worker so providers never block the canvas.  Refreshes
work on a deep copy of the model and merge the resulting confidence
deltas back under the session lock, so the live candidate store only ever
changes under that lock.  A monotonically increasing revision counter
tells pollers when anything (canvas or candidates) changed.
"""

from __future__ import annotations

import copy
import enum
import logging
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime
from typing import Callable

from .catalog import ShotCatalog
from .errors import ModelError, SessionEnded, WrongMode
from .gateway import Gateway
from .model import (
    AssociationPayload,
    AttributePayload,
    ClassPayload,
    Model,
    payload_identity,
)
from .recommend import RecommenderConfig, SuggestionSet, run_iteration, snapshot
from .sessionlog import KIND_TO_TOKEN, EdgeCell, LogRecord
from .dsl import serialize_model

log = logging.getLogger(__name__)

DEFAULT_DEBOUNCE_SECONDS = 0.5


class Mode(enum.Enum):
    NO_ASSISTANCE = "NoAssistance"
    AUTOMATIC = "Automatic"
    ON_REQUEST = "OnRequest"
    AT_END = "AtEnd"

    @property
    def log_token(self) -> str:
        return _MODE_TOKENS[self]


_MODE_TOKENS = {
    Mode.NO_ASSISTANCE: "no-assistance",
    Mode.AUTOMATIC: "auto",
    Mode.ON_REQUEST: "on-request",
    Mode.AT_END: "at-end",
}


def mode_from_string(raw: str) -> Mode:
    wanted = raw.strip().lower().replace("-", "").replace("_", "")
    for mode in Mode:
        if wanted in (mode.value.lower(), mode.log_token.replace("-", "")):
            return mode
    raise ValueError(f"unknown mode {raw!r}")


@dataclass(frozen=True)
class EditOp:
    """One canvas mutation, as named in the log vocabulary."""

    kind: str
    name: str | None = None
    class_name: str | None = None
    type_name: str = "String"
    source: str | None = None
    target: str | None = None
    association_kind: str = "association"
    label: str | None = None


class Session:
    def __init__(
        self,
        model: Model,
        catalog: ShotCatalog,
        gateway: Gateway,
        config: RecommenderConfig | None = None,
        mode: Mode = Mode.NO_ASSISTANCE,
        clock: Callable[[], datetime] = datetime.now,
        debounce_seconds: float = DEFAULT_DEBOUNCE_SECONDS,
        seed: int | None = None,
    ):
        self.model = model
        self.catalog = catalog
        self.gateway = gateway
        self.config = config if config is not None else RecommenderConfig()
        self.mode = mode
        self.records: list[LogRecord] = []
        self.revision = 0
        self.ended = False
        self.pre_finalize_source: str | None = None

        self._clock = clock
        self._rng = random.Random(seed)
        self._lock = threading.RLock()
        self._worker = ThreadPoolExecutor(max_workers=1)
        self._debounce = debounce_seconds
        self._timer: threading.Timer | None = None
        self._refresh_running = False
        self._refresh_queued = False

        self.started_at = self._clock()
        self._log("task-start")

    # --- logging -----------------------------------------------------------

    def _log(self, operation: str) -> None:
        attrib_reco: dict[str, list[tuple[str, str | None]]] = {}
        for candidate in self.model.candidates.list("attribute"):
            payload: AttributePayload = candidate.payload  # type: ignore[assignment]
            attrib_reco.setdefault(payload.class_name, []).append(
                (payload.name, payload.type_name)
            )

        assoc_reco: list[EdgeCell] = []
        covered: set[tuple[str, str]] = set()
        for candidate in self.model.candidates.list("association"):
            payload: AssociationPayload = candidate.payload  # type: ignore[assignment]
            covered.add(tuple(sorted((payload.source, payload.target))))
            assoc_reco.append(
                EdgeCell(payload.source, payload.target,
                         KIND_TO_TOKEN[payload.kind], payload.name)
            )
        for candidate in self.model.candidates.list("class"):
            payload: ClassPayload = candidate.payload  # type: ignore[assignment]
            for a, b in payload.companion_pairs:
                key = tuple(sorted((a, b)))
                if key in covered or self.model.pair_edge(a, b) is not None:
                    continue
                covered.add(key)
                assoc_reco.append(EdgeCell(a, b, "ass"))

        self.records.append(
            LogRecord(
                timestamp=self._clock(),
                mode=self.mode.log_token,
                operation=operation,
                classes_real=self.model.class_names(),
                class_reco=[c.payload.name for c in self.model.candidates.list("class")],  # type: ignore[union-attr]
                attrib_real={
                    cls.name: [(a.name, a.type_name) for a in cls.attributes]
                    for cls in self.model.classes
                },
                attrib_reco=attrib_reco,
                assoc_real=[
                    EdgeCell(a.source, a.target, KIND_TO_TOKEN[a.kind], a.name)
                    for a in self.model.associations
                ],
                assoc_reco=assoc_reco,
            )
        )

    # --- guards ------------------------------------------------------------

    def _ensure_active(self) -> None:
        if self.ended:
            raise SessionEnded("session already recorded task-end")

    # --- edits -------------------------------------------------------------

    def apply_edit(self, op: EditOp) -> int:
        """Apply a canvas mutation; returns the new revision."""
        self._ensure_active()
        with self._lock:
            try:
                self._dispatch(op)
            except ModelError as err:
                self._log(f"{op.kind}!{err.code}")
                raise
            self.revision += 1
            self._log(op.kind)
        if self.mode is Mode.AUTOMATIC:
            self._schedule_refresh()
        return self.revision

    def _dispatch(self, op: EditOp) -> None:
        if op.kind == "create-class":
            self.model.add_class(_required(op.name, "name"))
        elif op.kind == "delete-class":
            self.model.remove_class(_required(op.name, "name"))
        elif op.kind == "create-attribute":
            self.model.add_attribute(
                _required(op.class_name, "class_name"),
                _required(op.name, "name"),
                op.type_name,
            )
        elif op.kind == "delete-attribute":
            self.model.remove_attribute(
                _required(op.class_name, "class_name"), _required(op.name, "name")
            )
        elif op.kind == "create-association":
            self.model.add_association(
                _required(op.source, "source"),
                _required(op.target, "target"),
                op.association_kind,
                op.label,
            )
        elif op.kind == "delete-association":
            self.model.remove_association(
                _required(op.source, "source"), _required(op.target, "target")
            )
        else:
            raise ValueError(f"unknown edit kind {op.kind!r}")

    # --- candidates ----------------------------------------------------------

    def accept(self, candidate_id: str) -> int:
        self._ensure_active()
        with self._lock:
            candidate = self.model.candidates.get(candidate_id)
            operation = f"accept-{candidate.kind}"
            try:
                self.model.accept_candidate(candidate_id)
            except ModelError as err:
                self._log(f"{operation}!{err.code}")
                raise
            self.revision += 1
            self._log(operation)
        if self.mode is Mode.AUTOMATIC:
            self._schedule_refresh()
        return self.revision

    def dismiss(self, candidate_id: str) -> int:
        self._ensure_active()
        with self._lock:
            self.model.dismiss_candidate(candidate_id)
            self.revision += 1
            self._log("dismiss")
        return self.revision

    def suggestions(self) -> SuggestionSet:
        with self._lock:
            return snapshot(self.model)

    # --- assistance ----------------------------------------------------------

    def request_suggestions(self, kinds: set[str] | None = None) -> SuggestionSet:
        """Synchronous refresh; only valid in the on-request mode."""
        self._ensure_active()
        if self.mode is not Mode.ON_REQUEST:
            raise WrongMode(f"request-suggestions needs OnRequest, session is {self.mode.value}")
        result = self._refresh_once(kinds)
        with self._lock:
            self.revision += 1
            self._log("request-suggestions")
        return result

    def finalize(self) -> SuggestionSet:
        """End-of-task batch prediction; only valid in the at-end mode.

        The first call snapshots the canvas text so the contribution of
        the batch suggestions can be measured against it later.
        """
        self._ensure_active()
        if self.mode is not Mode.AT_END:
            raise WrongMode(f"finalize needs AtEnd, session is {self.mode.value}")
        with self._lock:
            if self.pre_finalize_source is None:
                self.pre_finalize_source = serialize_model(self.model)
        result = self._refresh_once(None)
        with self._lock:
            self.revision += 1
            self._log("request-suggestions")
        return result

    def set_mode(self, mode: Mode) -> int:
        self._ensure_active()
        with self._lock:
            self.mode = mode
            self.revision += 1
            self._log("mode-switch")
        return self.revision

    def end(self) -> int:
        """Record task-end and stop all background work."""
        self._ensure_active()
        with self._lock:
            self.ended = True
            self.ended_at = self._clock()
            self.revision += 1
            self._log("task-end")
        if self._timer is not None:
            self._timer.cancel()
        self._worker.shutdown(wait=False)
        return self.revision

    # --- background refresh ----------------------------------------------------

    def _schedule_refresh(self) -> None:
        """Debounced, coalesced enqueue: at most one running + one queued."""
        if self.ended:
            return
        if self._debounce > 0:
            with self._lock:
                if self._timer is not None:
                    self._timer.cancel()
                self._timer = threading.Timer(self._debounce, self._enqueue_refresh)
                self._timer.daemon = True
                self._timer.start()
        else:
            self._enqueue_refresh()

    def _enqueue_refresh(self) -> None:
        with self._lock:
            self._timer = None
            if self.ended:
                return
            if self._refresh_running:
                self._refresh_queued = True
                return
            self._refresh_running = True
        self._worker.submit(self._refresh_task)

    def _refresh_task(self) -> None:
        try:
            self._refresh_once(None)
            with self._lock:
                if not self.ended:
                    self.revision += 1
        except Exception:
            log.exception("background suggestion refresh failed")
        finally:
            requeue = False
            with self._lock:
                self._refresh_running = False
                if self._refresh_queued and not self.ended:
                    self._refresh_queued = False
                    self._refresh_running = True
                    requeue = True
            if requeue:
                self._worker.submit(self._refresh_task)

    def _refresh_once(self, kinds: set[str] | None) -> SuggestionSet:
        """Run one iteration on a model copy, merge deltas back under lock."""
        with self._lock:
            working = copy.deepcopy(self.model)
            baseline = {
                payload_identity(c.payload): c.confidence
                for c in working.candidates.all_candidates()
            }
            seed = self._rng.getrandbits(32)
        run_iteration(working, self.catalog, self.gateway, self.config,
                      random.Random(seed), kinds)
        with self._lock:
            for candidate in working.candidates.all_candidates():
                identity = payload_identity(candidate.payload)
                delta = candidate.confidence - baseline.get(identity, 0)
                if delta <= 0:
                    continue
                try:
                    self.model.upsert_candidate(candidate.payload, delta)
                except ModelError:
                    continue
            return snapshot(self.model)

    def wait_idle(self, timeout: float = 10.0) -> bool:
        """Block until no refresh is pending; for tests and shutdown."""
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self._lock:
                busy = self._refresh_running or self._refresh_queued or self._timer is not None
            if not busy:
                return True
            time.sleep(0.01)
        return False


def _required(value: str | None, field_name: str) -> str:
    if not value:
        raise ValueError(f"edit needs {field_name}")
    return value
