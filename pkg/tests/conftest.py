from __future__ import annotations

from datetime import datetime, timedelta
from importlib import resources
from pathlib import Path

import pytest

from modelmate.catalog import load_catalog
from modelmate.dsl import parse_model
from modelmate.gateway import Gateway, MockProvider

DATA = resources.files("modelmate.data")
ANALYSIS_DIR = Path(__file__).resolve().parent / "data" / "analysis"


class FakeClock:
    """Deterministic clock that advances a fixed step per call."""

    def __init__(self, start: datetime | None = None, step_seconds: float = 1.0):
        self.current = start if start is not None else datetime(2026, 1, 5, 10, 0, 0)
        self.step = timedelta(seconds=step_seconds)

    def __call__(self) -> datetime:
        stamp = self.current
        self.current = stamp + self.step
        return stamp


@pytest.fixture
def catalog():
    return load_catalog()


@pytest.fixture
def hospital_model():
    return parse_model((DATA / "hospital.dm").read_text())


@pytest.fixture
def hospital_full_model():
    return parse_model((DATA / "hospital_full.dm").read_text())


@pytest.fixture
def mock_gateway():
    return Gateway(MockProvider.from_file(DATA / "hospital_mock.json"))


@pytest.fixture
def fake_clock():
    return FakeClock()
