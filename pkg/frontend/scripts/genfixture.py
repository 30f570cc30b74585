#!/usr/bin/env python3
"""Regenerate tests/fixtures/e2e_mock.json for the browser e2e test.

Replays, in process, the exact operation sequence the e2e drives over
HTTP (same package name, same seed, same edits and accepts in the same
order) against a scripted provider, recording every prompt the provider
actually sees. Serving that recording with `modelmate serve --mock`
makes the e2e deterministic.

Run from the frontend directory:

    python3 scripts/genfixture.py
"""

import json
import re
import sys
from pathlib import Path

from modelmate.catalog import load_catalog
from modelmate.gateway import Gateway, fixture_record
from modelmate.model import Model
from modelmate.session import EditOp, Mode, Session

PACKAGE_NAME = "ClinicSystem"
SEED = 7

_ATTR_QUERY = re.compile(r"([A-Za-z][A-Za-z ]*?)\s*:?\s*\[([^\]]*)\]")


def scripted_response(prompt: str) -> str:
    if prompt.startswith("Generate related concepts:"):
        return "[Patient, Doctor], [Patient, Appointment]"
    if prompt.startswith("Generate missing attributes"):
        # Answer for every class the query line mentions; the parser
        # drops entries for classes it does not know about.
        query = prompt.rsplit("\n", 1)[-1]
        names = [m.group(1).strip() for m in _ATTR_QUERY.finditer(query)]
        parts = [f"{name}: [{name.lower()}Id, notes]" for name in names]
        return "; ".join(parts) if parts else "nothing: []"
    if prompt.startswith("Generate attribute type:"):
        return "String"
    if prompt.startswith("Specify the nature of the association"):
        return "association" if "Patient" in prompt and "Doctor" in prompt else "no"
    if prompt.startswith("Predict association name:"):
        return "treats"
    if prompt.startswith("Select the"):
        return "Doctor"
    raise AssertionError(f"unscripted prompt: {prompt[:80]!r}")


class RecordingProvider:
    def __init__(self):
        self.records = []
        self.seen = set()

    def complete_text(self, prompt: str, params) -> str:
        response = scripted_response(prompt)
        if prompt not in self.seen:
            self.seen.add(prompt)
            self.records.append(fixture_record(prompt, response))
        return response


def main() -> int:
    provider = RecordingProvider()
    session = Session(
        Model(PACKAGE_NAME),
        load_catalog(),
        Gateway(provider, sleep=lambda _: None),
        mode=Mode.AUTOMATIC,
        debounce_seconds=0.0,
        seed=SEED,
    )

    # Mirror of the e2e flow: add a class in Automatic mode, wait for the
    # background refresh, accept the top class candidate, wait again,
    # walk the modes, then Predict in AtEnd.
    session.apply_edit(EditOp("create-class", name="Clinic"))
    assert session.wait_idle(), "refresh after edit never settled"

    classes = session.suggestions().classes
    assert classes, "no class candidates after the first refresh"
    top = classes[0]
    assert top.payload.name == "Patient", f"ranking changed: {top.payload.name}"
    session.accept(top.candidate_id)
    assert session.wait_idle(), "refresh after accept never settled"

    session.set_mode(Mode.NO_ASSISTANCE)
    session.set_mode(Mode.ON_REQUEST)
    session.set_mode(Mode.AT_END)
    final = session.finalize()
    assert final.classes and final.attributes, "finalize produced an empty set"
    session.end()

    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "e2e_mock.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(provider.records, indent=2) + "\n", encoding="utf-8")
    print(f"{len(provider.records)} prompts -> {out}")
    print("accepted:", top.payload.name)
    print("final classes:", [c.payload.name for c in final.classes])
    print("final associations:", [(a.payload.source, a.payload.target) for a in final.associations])
    return 0


if __name__ == "__main__":
    sys.exit(main())
