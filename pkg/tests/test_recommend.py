from __future__ import annotations

import random

import pytest

from modelmate.errors import EmptyModel, MockMiss, ProviderError
from modelmate.gateway import FunctionProvider, Gateway
from modelmate.model import Model
from modelmate.recommend import (
    RecommenderConfig,
    run_iteration,
    suggest_associations,
    suggest_attributes,
    suggest_classes,
)

EXPECTED_ATTRIBUTES = {
    ("Address", "city", "String"),
    ("Address", "country", "String"),
    ("Address", "postalCode", "String"),
    ("Address", "state", "String"),
    ("Address", "street", "String"),
    ("Appointment", "date", "Date"),
    ("Appointment", "doctorName", "String"),
    ("Appointment", "time", "String"),
    ("Patient", "id", "int"),
    ("Patient", "name", "String"),
    ("Patient", "phoneNumber", "float"),
    ("Staff", "salary", "float"),
    ("Staff", "speciality", "String"),
}


def _iterate(model, catalog, gateway, seed=0, **config_kwargs):
    config = RecommenderConfig(**config_kwargs)
    return run_iteration(model, catalog, gateway, config, random.Random(seed))


def test_effective_min_frequency_rule():
    assert RecommenderConfig(n=3).effective_min_frequency() == 2
    assert RecommenderConfig(n=4).effective_min_frequency() == 2
    assert RecommenderConfig(n=2).effective_min_frequency() == 1
    assert RecommenderConfig(n=1).effective_min_frequency() == 1
    assert RecommenderConfig(n=3, min_frequency=5).effective_min_frequency() == 5


def test_iteration_reproduces_published_suggestion_set(
    hospital_model, catalog, mock_gateway
):
    suggestions = _iterate(hospital_model, catalog, mock_gateway)
    assert suggestions.errors == []

    classes = {(c.payload.name, c.confidence) for c in suggestions.classes}
    assert classes == {("Patient", 3), ("Appointment", 3), ("Address", 3)}

    attributes = {
        (c.payload.class_name, c.payload.name, c.payload.type_name)
        for c in suggestions.attributes
    }
    assert attributes == EXPECTED_ATTRIBUTES
    assert all(c.confidence == 3 for c in suggestions.attributes)
    assert not any(c.payload.type_warning for c in suggestions.attributes)

    assert len(suggestions.associations) == 1
    edge = suggestions.associations[0].payload
    assert (edge.source, edge.target, edge.kind, edge.name) == (
        "Doctor",
        "Staff",
        "inheritance",
        None,
    )


def test_second_iteration_reinforces_confidence(hospital_model, catalog, mock_gateway):
    _iterate(hospital_model, catalog, mock_gateway)
    suggestions = _iterate(hospital_model, catalog, mock_gateway)
    assert {c.confidence for c in suggestions.classes} == {6}
    assert {c.confidence for c in suggestions.attributes} == {6}
    assert [c.confidence for c in suggestions.associations] == [2]


def test_class_candidates_carry_companion_pairs(hospital_model, catalog, mock_gateway):
    suggestions = _iterate(hospital_model, catalog, mock_gateway)
    by_name = {c.payload.name: c.payload for c in suggestions.classes}
    assert by_name["Patient"].companion_pairs == (("Patient", "Appointment"),)
    assert by_name["Address"].companion_pairs == (("Address", "Hospital"),)


def test_min_frequency_prunes_and_n_one_keeps_everything(
    hospital_model, catalog, mock_gateway
):
    strict = suggest_classes(
        hospital_model,
        catalog,
        mock_gateway,
        RecommenderConfig(min_frequency=4),
        random.Random(0),
    )
    assert strict.candidates == []
    assert hospital_model.candidates.all_candidates() == []

    model_again = _fresh_hospital(hospital_model)
    lone = _iterate(model_again, catalog, mock_gateway, n=1)
    assert {c.payload.name for c in lone.classes} == {
        "Patient",
        "Appointment",
        "Address",
    }
    assert {c.confidence for c in lone.classes} == {1}


def _fresh_hospital(template: Model) -> Model:
    from modelmate.dsl import parse_model, serialize_model

    model = parse_model(serialize_model(template))
    model.last_edited = None
    return model


def test_empty_model_is_rejected(catalog, mock_gateway):
    empty = Model("Blank")
    with pytest.raises(EmptyModel):
        run_iteration(empty, catalog, mock_gateway, RecommenderConfig(), random.Random(0))
    with pytest.raises(EmptyModel):
        suggest_classes(empty, catalog, mock_gateway, RecommenderConfig(), random.Random(0))
    with pytest.raises(EmptyModel):
        suggest_attributes(empty, catalog, mock_gateway, RecommenderConfig())
    with pytest.raises(EmptyModel):
        suggest_associations(empty, catalog, mock_gateway, RecommenderConfig())


def test_unscripted_prompt_surfaces_mock_miss(catalog, mock_gateway):
    model = Model("Zoo")
    model.add_class("Lion")
    with pytest.raises(MockMiss):
        run_iteration(model, catalog, mock_gateway, RecommenderConfig(), random.Random(0))


def _scripted_gateway(script) -> Gateway:
    return Gateway(FunctionProvider(script), sleep=lambda seconds: None)


def test_all_class_prompts_failing_raises(hospital_model, catalog):
    def script(prompt: str, params) -> str:
        raise ProviderError("offline")

    gateway = _scripted_gateway(script)
    with pytest.raises(ProviderError, match="all 3 class prompts failed"):
        suggest_classes(
            hospital_model, catalog, gateway, RecommenderConfig(), random.Random(0)
        )


def test_partial_class_failures_keep_survivors(hospital_model, catalog):
    failed: set[str] = set()

    def script(prompt: str, params) -> str:
        if prompt.startswith("Generate related concepts:"):
            if not failed:
                failed.add(prompt)
            if prompt in failed:
                raise ProviderError("flaky")
            return "[Patient, Appointment]"
        raise AssertionError("only class prompts expected")

    gateway = _scripted_gateway(script)
    stage = suggest_classes(
        hospital_model, catalog, gateway, RecommenderConfig(), random.Random(0)
    )
    assert stage.errors and "flaky" in stage.errors[0]
    names = {c.payload.name for c in stage.candidates}
    assert names == {"Patient", "Appointment"}
    assert {c.confidence for c in stage.candidates} == {2}


def test_type_lookup_failure_falls_back_to_string(catalog):
    def script(prompt: str, params) -> str:
        if prompt.startswith("Generate missing attributes"):
            return "Gizmo: [sprocketCount]"
        if prompt.startswith("Generate attribute type:"):
            raise ProviderError("no types today")
        raise AssertionError(f"unexpected prompt {prompt[:30]!r}")

    model = Model("Factory")
    model.add_class("Gizmo")
    gateway = _scripted_gateway(script)
    stage = suggest_attributes(model, catalog, gateway, RecommenderConfig())
    assert len(stage.candidates) == 1
    payload = stage.candidates[0].payload
    assert payload.type_name == "String"
    assert payload.type_warning is True
    assert any("sprocketCount" in err for err in stage.errors)


def test_attribute_prompt_collapses_to_single_call(catalog):
    calls: list[str] = []

    def script(prompt: str, params) -> str:
        calls.append(prompt)
        if prompt.startswith("Generate missing attributes"):
            return "Gizmo: [weight]"
        return "float"

    model = Model("Factory")
    model.add_class("Gizmo")
    gateway = _scripted_gateway(script)
    suggest_attributes(model, catalog, gateway, RecommenderConfig(n=3))
    attribute_calls = [c for c in calls if c.startswith("Generate missing attributes")]
    assert len(attribute_calls) == 1


def test_association_answers_drive_payloads(catalog):
    answers = {
        ("Customer", "Order"): ("association", "places"),
        ("Invoice", "Order"): ("composition", "bills"),
        ("Customer", "Invoice"): ("no", None),
    }

    def script(prompt: str, params) -> str:
        last = prompt.splitlines()[-1]
        pair = tuple(sorted(last.rstrip(" =>").split(", ")))
        if prompt.startswith("Specify the nature"):
            return answers[pair][0]
        if prompt.startswith("Predict association name:"):
            return answers[pair][1]
        raise AssertionError(f"unexpected prompt {prompt[:30]!r}")

    model = Model("Shop")
    for name in ("Order", "Customer", "Invoice"):
        model.add_class(name)
    gateway = _scripted_gateway(script)
    stage = suggest_associations(model, catalog, gateway, RecommenderConfig())
    payloads = {
        (frozenset((c.payload.source, c.payload.target)), c.payload.kind, c.payload.name)
        for c in stage.candidates
    }
    assert payloads == {
        (frozenset(("Order", "Customer")), "association", "places"),
        (frozenset(("Order", "Invoice")), "composition", "bills"),
    }
    assert stage.errors == []


def test_inheritance_answer_resolves_direction(catalog):
    def script(prompt: str, params) -> str:
        if prompt.startswith("Specify the nature"):
            return "inheritance"
        if prompt.startswith("Select the  super class"):
            return "vehicle"
        raise AssertionError(f"unexpected prompt {prompt[:30]!r}")

    model = Model("Fleet")
    model.add_class("Truck")
    model.add_class("Vehicle")
    gateway = _scripted_gateway(script)
    stage = suggest_associations(
        model, catalog, gateway, RecommenderConfig(),
        pending_pairs=[("Vehicle", "Truck")],
    )
    assert len(stage.candidates) == 1
    payload = stage.candidates[0].payload
    assert (payload.source, payload.target, payload.kind) == (
        "Truck",
        "Vehicle",
        "inheritance",
    )


def test_unknown_kind_answer_skips_pair_with_error(catalog):
    def script(prompt: str, params) -> str:
        return "friendship"

    model = Model("Shop")
    model.add_class("Order")
    model.add_class("Customer")
    gateway = _scripted_gateway(script)
    stage = suggest_associations(model, catalog, gateway, RecommenderConfig())
    assert stage.candidates == []
    assert len(stage.errors) == 1


def test_connected_pairs_are_not_requeried(catalog):
    prompts: list[str] = []

    def script(prompt: str, params) -> str:
        prompts.append(prompt)
        return "no"

    model = Model("Shop")
    model.add_class("Order")
    model.add_class("Customer")
    model.add_association("Order", "Customer", "association")
    gateway = _scripted_gateway(script)
    stage = suggest_associations(model, catalog, gateway, RecommenderConfig())
    assert prompts == []
    assert stage.candidates == []
