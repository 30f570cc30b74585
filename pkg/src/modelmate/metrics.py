"""Study metrics computed from session logs and final models.

- acceptance rate: accepted suggestions over distinct suggested concepts
- contribution rate: accepted elements still in the final model over the
  final model's total element count
- overlap coefficient: |A intersect B| / min(|A|, |B|), optionally after
  coarsening names through synonym bags
- Kruskal-Wallis H across groups, tie-corrected, p from the chi-squared
  survival function
- timing: session duration between the task-start and task-end markers,
  plus the share of sessions finishing within a limit
"""

from __future__ import annotations

import re
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from scipy.special import gammaincc

from .errors import (
    DegenerateInput,
    EmptySet,
    InconsistentLog,
    MissingMarkers,
)
from .model import Model
from .sessionlog import LogRecord, replay

ACCEPT_OPS = ("accept-class", "accept-attribute", "accept-association")


# --- element identity --------------------------------------------------------


def element_set(model: Model) -> frozenset[str]:
    """Concept identifiers for one model, lowercased for comparison."""
    out: set[str] = set()
    for cls in model.classes:
        out.add(cls.name.lower())
        for attr in cls.attributes:
            out.add(f"{cls.name.lower()}.{attr.name.lower()}")
    for assoc in model.associations:
        a, b = sorted((assoc.source.lower(), assoc.target.lower()))
        out.add(f"{a}-{b}")
    return frozenset(out)


class SynonymBags:
    """Groups of interchangeable terms; each term maps to its bag's first."""

    def __init__(self, bags: Iterable[Sequence[str]] = ()):
        self._canonical: dict[str, str] = {}
        for bag in bags:
            terms = [t.strip().lower() for t in bag if t.strip()]
            if len(terms) < 2:
                continue
            for term in terms:
                self._canonical[term] = terms[0]

    @classmethod
    def from_text(cls, text: str) -> "SynonymBags":
        return cls(line.split(",") for line in text.splitlines() if line.strip())

    @classmethod
    def from_file(cls, path: str | Path) -> "SynonymBags":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    def canon(self, term: str) -> str:
        return self._canonical.get(term.lower(), term.lower())

    def coarsen(self, elements: frozenset[str]) -> frozenset[str]:
        out: set[str] = set()
        for element in elements:
            if "." in element:
                cls, attr = element.split(".", 1)
                out.add(f"{self.canon(cls)}.{self.canon(attr)}")
            elif "-" in element:
                parts = sorted(self.canon(p) for p in element.split("-"))
                out.add("-".join(parts))
            else:
                out.add(self.canon(element))
        return frozenset(out)


def overlap_coefficient(
    first: frozenset[str],
    second: frozenset[str],
    bags: SynonymBags | None = None,
) -> float:
    """Szymkiewicz-Simpson overlap of two concept sets."""
    if bags is not None:
        first, second = bags.coarsen(first), bags.coarsen(second)
    smaller = min(len(first), len(second))
    if smaller == 0:
        raise EmptySet("overlap needs two non-empty element sets")
    return len(first & second) / smaller


def pairwise_overlaps(
    sets: Sequence[frozenset[str]], bags: SynonymBags | None = None
) -> list[float]:
    if len(sets) < 2:
        raise DegenerateInput("pairwise overlap needs at least two sets")
    values = []
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            values.append(overlap_coefficient(sets[i], sets[j], bags))
    return values


def overlap_matrix(
    sets: Sequence[frozenset[str]], bags: SynonymBags | None = None
) -> list[list[float]]:
    if len(sets) < 2:
        raise DegenerateInput("overlap matrix needs at least two sets")
    size = len(sets)
    matrix = [[1.0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            value = overlap_coefficient(sets[i], sets[j], bags)
            matrix[i][j] = matrix[j][i] = value
    return matrix


# --- rates -------------------------------------------------------------------


@dataclass(frozen=True)
class RateResult:
    value: float
    flagged: bool = False  # set when the rate was 0/0


def _suggested_concepts(records: Sequence[LogRecord]) -> set[str]:
    suggested: set[str] = set()
    for record in records:
        for name in record.class_reco:
            suggested.add(f"class:{name}")
        for cls, attrs in record.attrib_reco.items():
            for name, _ in attrs:
                suggested.add(f"attribute:{cls}.{name}")
        for edge in record.assoc_reco:
            a, b = sorted((edge.a, edge.b))
            suggested.add(f"association:{a}-{b}")
    return suggested


def acceptance_rate(records: Sequence[LogRecord]) -> RateResult:
    """Accepted suggestions over distinct suggested concepts."""
    accepted = sum(1 for r in records if r.operation in ACCEPT_OPS)
    suggested = len(_suggested_concepts(records))
    if suggested == 0:
        if accepted:
            raise InconsistentLog("accept operations logged but nothing was suggested")
        return RateResult(0.0, flagged=True)
    return RateResult(accepted / suggested)


def _row_elements(record: LogRecord) -> set[str]:
    elements: set[str] = set()
    for name in record.classes_real:
        elements.add(f"class:{name}")
    for cls, attrs in record.attrib_real.items():
        for name, _ in attrs:
            elements.add(f"attribute:{cls}.{name}")
    for edge in record.assoc_real:
        a, b = sorted((edge.a, edge.b))
        elements.add(f"association:{a}-{b}")
    return elements


def contribution_rate(
    records: Sequence[LogRecord], final_model: Model | None = None
) -> RateResult:
    """Share of the final model that came from accepted suggestions."""
    model = final_model if final_model is not None else replay(records)
    total = model.element_count()

    accepted: set[str] = set()
    previous: set[str] = set()
    for record in records:
        current = _row_elements(record)
        if record.operation in ACCEPT_OPS:
            added = current - previous
            if not added:
                raise InconsistentLog(
                    f"{record.operation} at {record.timestamp} created no element"
                )
            accepted |= added
        previous = current

    if total == 0:
        # accepted elements may have been deleted again; an empty final
        # model just means there is nothing to attribute
        return RateResult(0.0, flagged=True)

    final_elements = _row_elements(records[-1]) if records else set()
    kept = accepted & final_elements
    return RateResult(len(kept) / total)


# --- Kruskal-Wallis ------------------------------------------------------------


@dataclass(frozen=True)
class KruskalResult:
    h: float
    p_value: float
    dof: int


def _average_ranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j + 2) / 2  # ranks are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def kruskal_wallis(groups: Sequence[Sequence[float]]) -> KruskalResult:
    """H statistic with average-rank tie correction; p via chi-squared."""
    if len(groups) < 2 or any(len(g) == 0 for g in groups):
        raise DegenerateInput("need at least two non-empty groups")
    pooled = [float(v) for group in groups for v in group]
    total = len(pooled)
    ranks = _average_ranks(pooled)

    h = 0.0
    offset = 0
    for group in groups:
        size = len(group)
        rank_sum = sum(ranks[offset : offset + size])
        h += rank_sum * rank_sum / size
        offset += size
    h = 12.0 / (total * (total + 1)) * h - 3.0 * (total + 1)

    tie_loss = 0.0
    seen: dict[float, int] = {}
    for value in pooled:
        seen[value] = seen.get(value, 0) + 1
    for count in seen.values():
        tie_loss += count**3 - count
    correction = 1.0 - tie_loss / (total**3 - total)
    dof = len(groups) - 1
    if correction == 0.0:  # every pooled value identical
        return KruskalResult(0.0, 1.0, dof)
    h /= correction

    p_value = float(gammaincc(dof / 2.0, max(h, 0.0) / 2.0))
    return KruskalResult(h, p_value, dof)


# --- timing ---------------------------------------------------------------------


def parse_time_limit(raw: str) -> float:
    """'MM:SS' (or plain seconds) -> seconds."""
    raw = raw.strip()
    if re.fullmatch(r"\d+:\d{2}", raw):
        minutes, seconds = raw.split(":")
        return int(minutes) * 60 + int(seconds)
    if re.fullmatch(r"\d+(\.\d+)?", raw):
        return float(raw)
    raise ValueError(f"bad time limit {raw!r}, expected MM:SS")


def session_duration(records: Sequence[LogRecord]) -> float:
    starts = [r.timestamp for r in records if r.operation == "task-start"]
    ends = [r.timestamp for r in records if r.operation == "task-end"]
    if not starts or not ends:
        raise MissingMarkers("log lacks task-start/task-end markers")
    return (max(ends) - min(starts)).total_seconds()


@dataclass(frozen=True)
class TimeStats:
    mean_seconds: float
    std_seconds: float
    completion_ratio: float
    durations: tuple[float, ...]


def time_stats(
    sessions: Sequence[Sequence[LogRecord]], limit_seconds: float = 600.0
) -> TimeStats:
    if not sessions:
        raise DegenerateInput("no sessions to time")
    durations = tuple(session_duration(records) for records in sessions)
    completed = sum(1 for d in durations if d <= limit_seconds)
    return TimeStats(
        mean_seconds=statistics.fmean(durations),
        std_seconds=statistics.pstdev(durations),
        completion_ratio=completed / len(durations),
        durations=durations,
    )


# --- aggregate report -------------------------------------------------------------


@dataclass
class ModeStats:
    sessions: int
    acceptance: list[RateResult]
    contribution: list[RateResult]
    times: TimeStats
    overlap_exact: list[float] = field(default_factory=list)
    overlap_coarse: list[float] = field(default_factory=list)

    def acceptance_mean(self) -> float:
        return statistics.fmean(r.value for r in self.acceptance)

    def acceptance_std(self) -> float:
        return statistics.pstdev([r.value for r in self.acceptance])

    def contribution_mean(self) -> float:
        return statistics.fmean(r.value for r in self.contribution)

    def contribution_std(self) -> float:
        return statistics.pstdev([r.value for r in self.contribution])


@dataclass
class StudyReport:
    by_mode: dict[str, ModeStats]
    kruskal: KruskalResult | None
    limit_seconds: float

    def to_dict(self) -> dict:
        out: dict = {"limitSeconds": self.limit_seconds, "modes": {}}
        for mode, stats in sorted(self.by_mode.items()):
            entry = {
                "sessions": stats.sessions,
                "acceptanceMean": stats.acceptance_mean(),
                "acceptanceStd": stats.acceptance_std(),
                "acceptanceFlagged": sum(1 for r in stats.acceptance if r.flagged),
                "contributionMean": stats.contribution_mean(),
                "contributionStd": stats.contribution_std(),
                "meanSeconds": stats.times.mean_seconds,
                "stdSeconds": stats.times.std_seconds,
                "completionRatio": stats.times.completion_ratio,
            }
            if stats.overlap_exact:
                entry["overlapExactMean"] = statistics.fmean(stats.overlap_exact)
                entry["overlapExactStd"] = statistics.pstdev(stats.overlap_exact)
            if stats.overlap_coarse:
                entry["overlapCoarseMean"] = statistics.fmean(stats.overlap_coarse)
                entry["overlapCoarseStd"] = statistics.pstdev(stats.overlap_coarse)
            out["modes"][mode] = entry
        if self.kruskal is not None:
            out["kruskalWallis"] = {
                "h": self.kruskal.h,
                "pValue": self.kruskal.p_value,
                "dof": self.kruskal.dof,
            }
        return out


def session_mode(records: Sequence[LogRecord]) -> str:
    """The mode a session ended in (its group for the study tables)."""
    return records[-1].mode if records else "no-assistance"


def analyze_sessions(
    sessions: Sequence[Sequence[LogRecord]],
    bags: SynonymBags | None = None,
    limit_seconds: float = 600.0,
) -> StudyReport:
    """Group sessions by mode and compute every table the study needs."""
    grouped: dict[str, list[Sequence[LogRecord]]] = {}
    for records in sessions:
        grouped.setdefault(session_mode(records), []).append(records)

    by_mode: dict[str, ModeStats] = {}
    for mode, group in grouped.items():
        stats = ModeStats(
            sessions=len(group),
            acceptance=[acceptance_rate(r) for r in group],
            contribution=[contribution_rate(r) for r in group],
            times=time_stats(group, limit_seconds),
        )
        if len(group) >= 2:
            sets = [element_set(replay(r)) for r in group]
            try:
                stats.overlap_exact = pairwise_overlaps(sets)
                if bags is not None:
                    stats.overlap_coarse = pairwise_overlaps(sets, bags)
            except EmptySet:
                pass  # a session ended with an empty canvas; skip overlap
        by_mode[mode] = stats

    kruskal = None
    duration_groups = [list(by_mode[m].times.durations) for m in sorted(by_mode)]
    if len(duration_groups) >= 2:
        kruskal = kruskal_wallis(duration_groups)
    return StudyReport(by_mode, kruskal, limit_seconds)


# --- text rendering -----------------------------------------------------------------


def format_mmss(seconds: float) -> str:
    whole = int(round(seconds))
    return f"{whole // 60:02d}:{whole % 60:02d}"


def render_report(report: StudyReport) -> str:
    lines = ["Sessions by mode", ""]
    lines.append(f"{'Mode':<16} {'N':>3} {'Time (std s)':>16} {'Done<=limit':>12}")
    for mode, stats in sorted(report.by_mode.items()):
        time_cell = f"{format_mmss(stats.times.mean_seconds)} ({stats.times.std_seconds:.0f})"
        lines.append(
            f"{mode:<16} {stats.sessions:>3} {time_cell:>16} "
            f"{stats.times.completion_ratio:>12.2f}"
        )
    lines.append("")
    lines.append(f"{'Mode':<16} {'Acceptance (std)':>20} {'Contribution (std)':>20}")
    for mode, stats in sorted(report.by_mode.items()):
        acc = f"{stats.acceptance_mean():.2f} ({stats.acceptance_std():.2f})"
        con = f"{stats.contribution_mean():.2f} ({stats.contribution_std():.2f})"
        lines.append(f"{mode:<16} {acc:>20} {con:>20}")
    rows = [
        (mode, stats)
        for mode, stats in sorted(report.by_mode.items())
        if stats.overlap_exact
    ]
    if rows:
        lines.append("")
        lines.append(f"{'Mode':<16} {'Overlap exact (std)':>22} {'Overlap bags (std)':>22}")
        for mode, stats in rows:
            exact = (
                f"{statistics.fmean(stats.overlap_exact):.2f} "
                f"({statistics.pstdev(stats.overlap_exact):.2f})"
            )
            coarse = "-"
            if stats.overlap_coarse:
                coarse = (
                    f"{statistics.fmean(stats.overlap_coarse):.2f} "
                    f"({statistics.pstdev(stats.overlap_coarse):.2f})"
                )
            lines.append(f"{mode:<16} {exact:>22} {coarse:>22}")
    if report.kruskal is not None:
        lines.append("")
        lines.append(
            f"Kruskal-Wallis over durations: H={report.kruskal.h:.4f} "
            f"p={report.kruskal.p_value:.4f} dof={report.kruskal.dof}"
        )
    return "\n".join(lines) + "\n"
