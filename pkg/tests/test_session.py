from __future__ import annotations

import threading
from datetime import datetime

import pytest

import modelmate.session as session_module
from modelmate.errors import (
    DuplicateName,
    SessionEnded,
    UnknownCandidate,
    WrongMode,
)
from modelmate.recommend import SuggestionSet
from modelmate.session import EditOp, Mode, Session, mode_from_string
from modelmate.sessionlog import format_records, parse_log, replay
from modelmate.dsl import serialize_model

from conftest import FakeClock


def _session(hospital_model, catalog, mock_gateway, **kwargs) -> Session:
    kwargs.setdefault("clock", FakeClock())
    kwargs.setdefault("seed", 0)
    return Session(hospital_model, catalog, mock_gateway, **kwargs)


def test_mode_from_string_accepts_both_spellings():
    assert mode_from_string("OnRequest") is Mode.ON_REQUEST
    assert mode_from_string("on-request") is Mode.ON_REQUEST
    assert mode_from_string("auto") is Mode.AUTOMATIC
    with pytest.raises(ValueError):
        mode_from_string("sometimes")


def test_init_logs_task_start(hospital_model, catalog, mock_gateway):
    session = _session(hospital_model, catalog, mock_gateway)
    assert session.started_at == datetime(2026, 1, 5, 10, 0, 0)
    assert len(session.records) == 1
    row = session.records[0]
    assert row.operation == "task-start"
    assert row.mode == "no-assistance"
    assert row.classes_real == ["Hospital", "Staff", "Doctor"]
    assert session.revision == 0
    session.end()


def test_edits_bump_revision_and_log_snapshots(hospital_model, catalog, mock_gateway):
    session = _session(hospital_model, catalog, mock_gateway)
    assert session.apply_edit(EditOp("create-class", name="Patient")) == 1
    assert session.apply_edit(
        EditOp("create-attribute", class_name="Patient", name="age", type_name="int")
    ) == 2
    assert session.apply_edit(
        EditOp("create-association", source="Patient", target="Doctor",
               association_kind="association", label="treatedBy")
    ) == 3
    row = session.records[-1]
    assert row.operation == "create-association"
    assert "Patient" in row.classes_real
    assert row.attrib_real["Patient"] == [("age", "int")]
    assert row.assoc_real[-1].label == "treatedBy"

    session.apply_edit(EditOp("delete-association", source="Patient", target="Doctor"))
    session.apply_edit(EditOp("delete-attribute", class_name="Patient", name="age"))
    session.apply_edit(EditOp("delete-class", name="Patient"))
    assert session.revision == 6
    assert session.records[-1].classes_real == ["Hospital", "Staff", "Doctor"]
    session.end()


def test_failed_edit_logs_error_marker_without_revision(
    hospital_model, catalog, mock_gateway
):
    session = _session(hospital_model, catalog, mock_gateway)
    with pytest.raises(DuplicateName):
        session.apply_edit(EditOp("create-class", name="Hospital"))
    assert session.revision == 0
    assert session.records[-1].operation == "create-class!duplicate-name"
    session.end()


def test_unknown_edit_kind_is_a_value_error(hospital_model, catalog, mock_gateway):
    session = _session(hospital_model, catalog, mock_gateway)
    with pytest.raises(ValueError):
        session.apply_edit(EditOp("gift-class", name="Pony"))
    with pytest.raises(ValueError):
        session.apply_edit(EditOp("create-class"))
    assert len(session.records) == 1
    session.end()


def test_assistance_calls_respect_modes(hospital_model, catalog, mock_gateway):
    session = _session(hospital_model, catalog, mock_gateway)
    with pytest.raises(WrongMode):
        session.request_suggestions()
    with pytest.raises(WrongMode):
        session.finalize()
    session.set_mode(Mode.AT_END)
    with pytest.raises(WrongMode):
        session.request_suggestions()
    session.set_mode(Mode.ON_REQUEST)
    with pytest.raises(WrongMode):
        session.finalize()
    session.end()


def test_on_request_flow_accept_and_replay(hospital_model, catalog, mock_gateway):
    session = _session(
        hospital_model, catalog, mock_gateway, mode=Mode.ON_REQUEST
    )
    result = session.request_suggestions()
    assert {c.payload.name for c in result.classes} == {
        "Patient",
        "Appointment",
        "Address",
    }
    assert session.records[-1].operation == "request-suggestions"
    assert session.records[-1].class_reco == ["Address", "Appointment", "Patient"]

    patient = next(c for c in result.classes if c.payload.name == "Patient")
    session.accept(patient.candidate_id)
    assert session.records[-1].operation == "accept-class"
    assert "Patient" in session.model.class_names()
    requeued = session.model.candidates.list("association")
    assert any(
        tuple(sorted((c.payload.source, c.payload.target)))
        == ("Appointment", "Patient")
        for c in requeued
    )

    current = session.suggestions()
    salary = next(
        c
        for c in current.attributes
        if (c.payload.class_name, c.payload.name) == ("Staff", "salary")
    )
    session.accept(salary.candidate_id)
    assert session.model.find_class("Staff").attribute("salary").type_name == "float"

    inheritance = next(
        c for c in current.associations if c.payload.kind == "inheritance"
    )
    session.accept(inheritance.candidate_id)
    edge = session.model.pair_edge("Doctor", "Staff")
    assert edge is not None and edge.kind == "inheritance"

    session.end()
    text = format_records(session.records)
    rebuilt = replay(parse_log(text), package_name="HospitalSystem")
    assert serialize_model(rebuilt) == serialize_model(session.model)


def test_dismiss_logs_and_removes(hospital_model, catalog, mock_gateway):
    session = _session(hospital_model, catalog, mock_gateway, mode=Mode.ON_REQUEST)
    result = session.request_suggestions()
    target = result.classes[0]
    before = session.revision
    session.dismiss(target.candidate_id)
    assert session.revision == before + 1
    assert session.records[-1].operation == "dismiss"
    assert all(
        c.candidate_id != target.candidate_id
        for c in session.suggestions().classes
    )
    with pytest.raises(UnknownCandidate):
        session.dismiss(target.candidate_id)
    session.end()


def test_repeated_request_reinforces_confidence(hospital_model, catalog, mock_gateway):
    session = _session(hospital_model, catalog, mock_gateway, mode=Mode.ON_REQUEST)
    first = session.request_suggestions()
    assert {c.confidence for c in first.classes} == {3}
    second = session.request_suggestions()
    assert {c.confidence for c in second.classes} == {6}
    session.end()


def test_request_can_limit_kinds(hospital_model, catalog, mock_gateway):
    session = _session(hospital_model, catalog, mock_gateway, mode=Mode.ON_REQUEST)
    result = session.request_suggestions(kinds={"classes"})
    assert result.classes and not result.attributes and not result.associations
    session.end()


def test_finalize_snapshots_canvas_once(hospital_model, catalog, mock_gateway):
    session = _session(hospital_model, catalog, mock_gateway, mode=Mode.AT_END)
    untouched = serialize_model(session.model)
    first = session.finalize()
    assert session.pre_finalize_source == untouched
    assert {c.confidence for c in first.classes} == {3}
    second = session.finalize()
    assert {c.confidence for c in second.classes} == {6}
    assert session.pre_finalize_source == untouched
    session.end()


def test_set_mode_logs_with_new_token(hospital_model, catalog, mock_gateway):
    session = _session(hospital_model, catalog, mock_gateway)
    session.set_mode(Mode.AT_END)
    assert session.records[-1].operation == "mode-switch"
    assert session.records[-1].mode == "at-end"
    session.end()


def test_end_blocks_every_operation(hospital_model, catalog, mock_gateway):
    session = _session(hospital_model, catalog, mock_gateway)
    session.end()
    assert session.records[-1].operation == "task-end"
    for call in (
        lambda: session.apply_edit(EditOp("create-class", name="X")),
        lambda: session.accept("nope"),
        lambda: session.request_suggestions(),
        lambda: session.finalize(),
        lambda: session.set_mode(Mode.AUTOMATIC),
        lambda: session.end(),
    ):
        with pytest.raises(SessionEnded):
            call()


def _counting_refresh(counter, gate=None):
    def fake_run_iteration(model, catalog, gateway, config, rng, kinds=None):
        counter.append(1)
        if gate is not None:
            gate.wait(timeout=5)
        return SuggestionSet()

    return fake_run_iteration


def test_automatic_burst_coalesces_to_one_refresh(
    hospital_model, catalog, mock_gateway, monkeypatch
):
    calls: list[int] = []
    monkeypatch.setattr(session_module, "run_iteration", _counting_refresh(calls))
    session = _session(
        hospital_model,
        catalog,
        mock_gateway,
        mode=Mode.AUTOMATIC,
        debounce_seconds=0.05,
    )
    for i in range(5):
        session.apply_edit(EditOp("create-class", name=f"Burst{chr(ord('A') + i)}"))
    assert session.wait_idle(timeout=5)
    assert len(calls) == 1
    assert session.revision == 6
    session.end()


def test_refresh_while_running_queues_exactly_one_more(
    hospital_model, catalog, mock_gateway, monkeypatch
):
    calls: list[int] = []
    gate = threading.Event()
    monkeypatch.setattr(session_module, "run_iteration", _counting_refresh(calls, gate))
    session = _session(
        hospital_model,
        catalog,
        mock_gateway,
        mode=Mode.AUTOMATIC,
        debounce_seconds=0.0,
    )
    session.apply_edit(EditOp("create-class", name="First"))
    deadline = threading.Event()
    for _ in range(200):
        if calls:
            break
        deadline.wait(0.01)
    assert calls, "first refresh never started"
    for name in ("Second", "Third", "Fourth"):
        session.apply_edit(EditOp("create-class", name=name))
    gate.set()
    assert session.wait_idle(timeout=5)
    assert len(calls) == 2
    assert session.revision == 4 + 2
    session.end()


def test_non_automatic_modes_never_schedule_refreshes(
    hospital_model, catalog, mock_gateway, monkeypatch
):
    calls: list[int] = []
    monkeypatch.setattr(session_module, "run_iteration", _counting_refresh(calls))
    session = _session(
        hospital_model, catalog, mock_gateway, mode=Mode.NO_ASSISTANCE,
        debounce_seconds=0.0,
    )
    session.apply_edit(EditOp("create-class", name="Quiet"))
    assert session.wait_idle(timeout=2)
    assert calls == []
    session.end()


def test_failed_background_refresh_is_swallowed(
    hospital_model, catalog, mock_gateway, monkeypatch
):
    def broken(model, catalog, gateway, config, rng, kinds=None):
        raise RuntimeError("provider fell over")

    monkeypatch.setattr(session_module, "run_iteration", broken)
    session = _session(
        hospital_model,
        catalog,
        mock_gateway,
        mode=Mode.AUTOMATIC,
        debounce_seconds=0.0,
    )
    session.apply_edit(EditOp("create-class", name="Lucky"))
    assert session.wait_idle(timeout=5)
    assert session.revision == 1
    assert [r.operation for r in session.records] == ["task-start", "create-class"]
    session.end()


def test_automatic_refresh_merges_candidates_into_live_model(catalog):
    from modelmate.gateway import FunctionProvider, Gateway
    from modelmate.model import Model

    def script(prompt: str, params) -> str:
        if prompt.startswith("Generate related concepts:"):
            return "[Gadget, Widget]"
        if prompt.startswith("Generate missing attributes"):
            return "Base: []"
        if prompt.startswith("Specify the nature"):
            return "no"
        raise AssertionError(f"unexpected prompt {prompt[:30]!r}")

    model = Model("Lab")
    session = Session(
        model,
        catalog,
        Gateway(FunctionProvider(script), sleep=lambda s: None),
        mode=Mode.AUTOMATIC,
        clock=FakeClock(),
        debounce_seconds=0.0,
        seed=0,
    )
    session.apply_edit(EditOp("create-class", name="Base"))
    assert session.wait_idle(timeout=5)
    assert session.revision == 2
    first = {(c.payload.name, c.confidence) for c in session.suggestions().classes}
    assert first == {("Gadget", 3), ("Widget", 3)}

    session.apply_edit(EditOp("create-class", name="Widget"))
    assert session.wait_idle(timeout=5)
    assert session.revision == 4
    second = {(c.payload.name, c.confidence) for c in session.suggestions().classes}
    assert second == {("Gadget", 6)}
    session.end()
