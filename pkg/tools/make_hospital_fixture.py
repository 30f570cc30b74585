"""Regenerate the bundled hospital mock fixture.

Builds every prompt the running example can emit (all permutations of the
class-prompt query groups, the canvas-wide attribute prompt, one type
prompt per new attribute name, the relation-kind prompts, the direction
prompt) and scripts a deterministic response for each.

Run from the repository root:  python tools/make_hospital_fixture.py
"""

from __future__ import annotations

import json
from itertools import permutations
from pathlib import Path

from modelmate.catalog import load_catalog
from modelmate.dsl import parse_model
from modelmate.gateway import fixture_record
from modelmate.prompts import (
    PairSelection,
    build_association_type_prompt,
    build_attribute_prompt,
    build_attribute_type_prompt,
    build_class_prompt,
    build_inheritance_direction_prompt,
)

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "modelmate" / "data"

CLASS_RESPONSE = "[Patient, Appointment], [Address, Hospital]"

ATTRIBUTE_RESPONSE = (
    "Hospital: [name]; Staff: [name, speciality, salary]; "
    "Doctor: [speciality, qualification]; Patient: [name, id, phone number]; "
    "Appointment: [date, time, doctorName]; "
    "Address: [street, city, state, postal code, country]"
)

# extras are the ranked class candidates after the class stage
EXTRA_CLASSES = [("Address", []), ("Appointment", []), ("Patient", [])]

TYPE_ANSWERS = {
    "speciality": "String",
    "salary": "float",
    "name": "String",
    "id": "int",
    "phoneNumber": "float",
    "date": "Date",
    "time": "String",
    "doctorName": "String",
    "street": " street => String",  # echo with leading junk, on purpose
    "city": "String",
    "state": "String",
    "postalCode": "String",
    "country": "String",
}

# pairs the association stage will query, with the scripted kind answer
PAIR_ANSWERS = [
    (("Patient", "Appointment"), "no"),
    (("Address", "Hospital"), "no"),
    (("Hospital", "Doctor"), "no"),
    (("Staff", "Doctor"), "inheritance"),
]

DIRECTION_ANSWERS = [(("Staff", "Doctor"), "staff")]


def build_records() -> list[dict]:
    catalog = load_catalog()
    model = parse_model((DATA_DIR / "hospital.dm").read_text("utf-8"))
    records: list[dict] = []

    # only one connected pair on the canvas, so the class prompt falls
    # back to singleton groups; register every ordering of them
    singles = [(name,) for name in model.class_names()]
    for perm in permutations(singles):
        prompt = build_class_prompt(model, catalog, PairSelection(tuple(perm), 0))
        records.append(fixture_record(prompt.text, CLASS_RESPONSE))

    prompt = build_attribute_prompt(model, catalog, EXTRA_CLASSES)
    records.append(fixture_record(prompt.text, ATTRIBUTE_RESPONSE))

    for attr_name, answer in TYPE_ANSWERS.items():
        prompt = build_attribute_type_prompt(catalog, attr_name)
        records.append(fixture_record(prompt.text, answer))

    for pair, answer in PAIR_ANSWERS:
        prompt = build_association_type_prompt(catalog, pair)
        records.append(fixture_record(prompt.text, answer))

    for pair, answer in DIRECTION_ANSWERS:
        prompt = build_inheritance_direction_prompt(catalog, pair)
        records.append(fixture_record(prompt.text, answer))

    return records


def main() -> None:
    records = build_records()
    target = DATA_DIR / "hospital_mock.json"
    target.write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {target} ({len(records)} records)")


if __name__ == "__main__":
    main()
