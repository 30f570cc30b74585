"""Session log CSV: one row per operation, snapshotting canvas and candidates.

Nine columns::

    timestamp, mode, operation, classes-real, class-reco, attrib-real,
    attrib-reco, assoc-real, assoc-reco

The *-real columns snapshot the canvas after the operation; the *-reco
columns snapshot the candidate store.  Attribute cells look like
``Cls: [a, b]`` (optionally ``a:Type`` per attribute) and edge cells like
``[a-b]=>ass`` (optionally ``[a-b]=>ass:label``).  The reader is lenient:
it accepts second-only timestamps, braces or none around class lists,
missing colons before brackets, and rows where an unquoted comma leaked
extra cells (they are merged back into the last column).
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from .errors import MalformedRow
from .model import Association, Attribute, ClassEntity, Model

HEADER = (
    "timestamp, mode, operation, classes-real, class-reco, "
    "attrib-real, attrib-reco, assoc-real,assoc-reco"
)

MODE_TOKENS = ("no-assistance", "auto", "on-request", "at-end")

OPERATIONS = (
    "create-class",
    "delete-class",
    "create-attribute",
    "delete-attribute",
    "create-association",
    "delete-association",
    "accept-class",
    "accept-attribute",
    "accept-association",
    "dismiss",
    "request-suggestions",
    "mode-switch",
    "task-start",
    "task-end",
)

KIND_TO_TOKEN = {
    "association": "ass",
    "aggregation": "agg",
    "composition": "comp",
    "inheritance": "inh",
}
TOKEN_TO_KIND = {token: kind for kind, token in KIND_TO_TOKEN.items()}

_ATTR_CELL = re.compile(r"([A-Za-z][A-Za-z ]*?)\s*:?\s*\[([^\]]*)\]")
_EDGE_CELL = re.compile(
    r"\[\s*([A-Za-z]+)\s*-\s*([A-Za-z]+)\s*\]\s*=>\s*([A-Za-z]+)(?:\s*:\s*([A-Za-z]+))?"
)

AttrListing = dict[str, list[tuple[str, str | None]]]


@dataclass
class EdgeCell:
    a: str
    b: str
    kind: str  # ass / agg / comp / inh
    label: str | None = None


@dataclass
class LogRecord:
    timestamp: datetime
    mode: str
    operation: str
    classes_real: list[str] = field(default_factory=list)
    class_reco: list[str] = field(default_factory=list)
    attrib_real: AttrListing = field(default_factory=dict)
    attrib_reco: AttrListing = field(default_factory=dict)
    assoc_real: list[EdgeCell] = field(default_factory=list)
    assoc_reco: list[EdgeCell] = field(default_factory=list)


# --- writing ----------------------------------------------------------------


def _quote(cell: str) -> str:
    if '"' in cell or "," in cell or "\n" in cell:
        return '"' + cell.replace('"', '""') + '"'
    return cell


def _attr_item(name: str, type_name: str | None) -> str:
    return name if type_name is None else f"{name}:{type_name}"


def _attr_cell(listing: AttrListing) -> str:
    return ", ".join(
        f"{cls}: [{', '.join(_attr_item(n, t) for n, t in attrs)}]"
        for cls, attrs in listing.items()
    )


def _edge_item(edge: EdgeCell) -> str:
    base = f"[{edge.a}-{edge.b}]=>{edge.kind}"
    return base if edge.label is None else f"{base}:{edge.label}"


def format_records(records: list[LogRecord]) -> str:
    """Render records as CSV text, header included."""
    lines = [HEADER]
    for record in records:
        cells = [
            record.timestamp.strftime("%Y-%m-%d %H:%M:%S.%f")[:-3],
            record.mode,
            record.operation,
            "{" + ", ".join(record.classes_real) + "}" if record.classes_real else "",
            ", ".join(record.class_reco),
            _attr_cell(record.attrib_real),
            _attr_cell(record.attrib_reco),
            ", ".join(_edge_item(e) for e in record.assoc_real),
            ", ".join(_edge_item(e) for e in record.assoc_reco),
        ]
        lines.append(", ".join(_quote(cell) for cell in cells))
    return "\n".join(lines) + "\n"


def write_log(records: list[LogRecord], path: str | Path) -> None:
    Path(path).write_text(format_records(records), encoding="utf-8")


# --- reading ----------------------------------------------------------------


def _parse_timestamp(cell: str) -> datetime:
    cell = cell.strip()
    for fmt in ("%Y-%m-%d %H:%M:%S.%f", "%Y-%m-%d %H:%M:%S"):
        try:
            return datetime.strptime(cell, fmt)
        except ValueError:
            continue
    raise MalformedRow(f"bad timestamp {cell!r}")


def _parse_class_list(cell: str) -> list[str]:
    cell = cell.strip().strip("{}")
    return [name.strip() for name in cell.split(",") if name.strip()]


def _parse_attr_listing(cell: str) -> AttrListing:
    listing: AttrListing = {}
    for raw_class, raw_attrs in _ATTR_CELL.findall(cell):
        attrs = listing.setdefault(raw_class.strip(), [])
        for chunk in raw_attrs.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if ":" in chunk:
                name, type_name = (part.strip() for part in chunk.split(":", 1))
                attrs.append((name, type_name or None))
            else:
                attrs.append((chunk, None))
    return listing


def _parse_edges(cell: str) -> list[EdgeCell]:
    return [
        EdgeCell(a, b, kind, label or None)
        for a, b, kind, label in _EDGE_CELL.findall(cell)
    ]


def parse_log(text: str) -> list[LogRecord]:
    """Parse log CSV text; raises MalformedRow on unusable rows."""
    records: list[LogRecord] = []
    reader = csv.reader(io.StringIO(text), skipinitialspace=True)
    for index, cells in enumerate(reader):
        if not cells or not any(cell.strip() for cell in cells):
            continue
        if index == 0 and cells[0].strip().lower() == "timestamp":
            continue
        if len(cells) < 3:
            raise MalformedRow(f"row {index + 1}: expected at least 3 cells")
        if len(cells) > 9:
            # an unquoted comma leaked extra cells; fold them back right
            cells = cells[:8] + [", ".join(cells[8:])]
        while len(cells) < 9:
            cells.append("")
        operation = cells[2].strip()
        if operation == "accept-view":  # legacy spelling
            operation = "accept-class"
        records.append(
            LogRecord(
                timestamp=_parse_timestamp(cells[0]),
                mode=cells[1].strip(),
                operation=operation,
                classes_real=_parse_class_list(cells[3]),
                class_reco=_parse_class_list(cells[4]),
                attrib_real=_parse_attr_listing(cells[5]),
                attrib_reco=_parse_attr_listing(cells[6]),
                assoc_real=_parse_edges(cells[7]),
                assoc_reco=_parse_edges(cells[8]),
            )
        )
    return records


def read_log(path: str | Path) -> list[LogRecord]:
    return parse_log(Path(path).read_text(encoding="utf-8"))


# --- replay -----------------------------------------------------------------


def replay(records: list[LogRecord], package_name: str = "Replay") -> Model:
    """Rebuild the final model from a log.

    Every row snapshots the full canvas, so the last row is authoritative.
    Attributes without a recorded type default to String; edges whose
    endpoints never appear as classes are skipped.
    """
    model = Model(package_name)
    if not records:
        return model
    last = records[-1]
    for name in last.classes_real:
        if model.find_class(name) is None:
            model.classes.append(ClassEntity(name))
    for class_name, attrs in last.attrib_real.items():
        cls = model.find_class(class_name)
        if cls is None:
            cls = ClassEntity(class_name)
            model.classes.append(cls)
        for name, type_name in attrs:
            if cls.attribute(name) is None:
                cls.attributes.append(Attribute(name, type_name or "String"))
    for edge in last.assoc_real:
        if model.find_class(edge.a) is None or model.find_class(edge.b) is None:
            continue
        if model.pair_edge(edge.a, edge.b) is None:
            model.associations.append(
                Association(edge.a, edge.b, TOKEN_TO_KIND.get(edge.kind, "association"), edge.label)
            )
    return model
