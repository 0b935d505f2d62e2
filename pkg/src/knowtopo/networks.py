"""Knowledge and collaboration networks from two-mode publication records."""

from __future__ import annotations

import csv
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EmptySelection, InputUnreadable
from .graph import WeightedGraph

log = logging.getLogger(__name__)

KNOWLEDGE = "knowledge"
COLLABORATION = "collaboration"
GRANULARITIES = ("yearly", "monthly")


def _dedup(items: Iterable[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(items))


@dataclass(frozen=True)
class PublicationRecord:
    """One work. ``period`` is a year, or ``year * 100 + month`` for monthly data."""

    work_id: str
    period: int
    field: str
    codes: tuple[str, ...] = ()
    authors: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.work_id:
            raise ValueError("work_id must be nonempty")
        object.__setattr__(self, "codes", _dedup(self.codes))
        object.__setattr__(self, "authors", _dedup(self.authors))

    @classmethod
    def from_dict(cls, obj: dict) -> "PublicationRecord":
        return cls(
            work_id=str(obj["work_id"]),
            period=int(obj["period"]),
            field=str(obj["field"]),
            codes=tuple(str(c) for c in obj.get("codes") or ()),
            authors=tuple(str(a) for a in obj.get("authors") or ()),
        )


@dataclass(frozen=True)
class NetworkSpec:
    kind: str
    field: str
    period: int
    window: int = 1
    granularity: str = field(default="yearly", compare=False)

    def __post_init__(self):
        if self.kind not in (KNOWLEDGE, COLLABORATION):
            raise ValueError(f"unknown network kind {self.kind!r}")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.kind == KNOWLEDGE and self.window != 1:
            raise ValueError("knowledge networks always use window 1")
        if self.granularity not in GRANULARITIES:
            raise ValueError(f"unknown granularity {self.granularity!r}")

    @property
    def label(self) -> str:
        return self.kind if self.kind == KNOWLEDGE else f"{self.kind}_w{self.window}"

    def first_period(self) -> int:
        return shift_period(self.period, -(self.window - 1), self.granularity)


def shift_period(period: int, steps: int, granularity: str = "yearly") -> int:
    """Move ``period`` by ``steps`` years or months."""
    if granularity == "yearly":
        return period + steps
    year, month = divmod(period, 100)
    if not 1 <= month <= 12:
        raise ValueError(f"monthly period {period} is not of the form YYYYMM")
    total = year * 12 + (month - 1) + steps
    y, m = divmod(total, 12)
    return y * 100 + m + 1


def period_range(start: int, end: int, granularity: str = "yearly") -> list[int]:
    out = []
    p = start
    while p <= end:
        out.append(p)
        p = shift_period(p, 1, granularity)
    return out


def cooccurrence_network(groups: Iterable[Sequence[str]]) -> WeightedGraph:
    """Every unordered pair of labels inside a group gains weight 1.

    Labels are indexed by first appearance; single-label groups contribute an
    isolated node.
    """
    index: dict[str, int] = {}
    counts: dict[tuple[int, int], int] = defaultdict(int)
    for group in groups:
        ids = []
        for label in _dedup(group):
            i = index.get(label)
            if i is None:
                i = index[label] = len(index)
            ids.append(i)
        ids.sort()
        for u, v in combinations(ids, 2):
            counts[u, v] += 1
    return WeightedGraph(len(index), tuple((u, v, w) for (u, v), w in sorted(counts.items())), tuple(index))


def _select(records: Iterable[PublicationRecord], field_name: str, lo: int, hi: int) -> list[PublicationRecord]:
    return [r for r in records if r.field == field_name and lo <= r.period <= hi]


def _empty(spec: NetworkSpec, strict: bool) -> WeightedGraph:
    msg = f"no records for {spec.label} network of field {spec.field!r} at period {spec.period}"
    if strict:
        raise EmptySelection(msg)
    log.warning(msg)
    return WeightedGraph(0, ())


def build_knowledge_network(
    records: Iterable[PublicationRecord], spec: NetworkSpec, strict: bool = False
) -> WeightedGraph:
    """Code co-occurrence network of ``spec.field`` in ``spec.period``.

    When nothing matches, raises :class:`EmptySelection` if ``strict``,
    otherwise logs a warning and returns the empty graph.
    """
    if spec.kind != KNOWLEDGE:
        raise ValueError("spec.kind must be 'knowledge'")
    selected = _select(records, spec.field, spec.period, spec.period)
    if not selected:
        return _empty(spec, strict)
    return cooccurrence_network(r.codes for r in selected)


def build_collaboration_network(
    records: Iterable[PublicationRecord], spec: NetworkSpec, strict: bool = False
) -> WeightedGraph:
    """Co-authorship network over the trailing window of ``spec.window``
    periods ending at ``spec.period``."""
    if spec.kind != COLLABORATION:
        raise ValueError("spec.kind must be 'collaboration'")
    selected = _select(records, spec.field, spec.first_period(), spec.period)
    if not selected:
        return _empty(spec, strict)
    return cooccurrence_network(r.authors for r in selected)


def build_network(records: Iterable[PublicationRecord], spec: NetworkSpec, strict: bool = False) -> WeightedGraph:
    if spec.kind == KNOWLEDGE:
        return build_knowledge_network(records, spec, strict)
    return build_collaboration_network(records, spec, strict)


def project_two_mode(pairs: Iterable[tuple[str, str]]) -> WeightedGraph:
    """One-mode projection of ``(work_id, label)`` incidences."""
    groups: dict[str, list[str]] = {}
    for work_id, label in pairs:
        groups.setdefault(work_id, []).append(label)
    return cooccurrence_network(groups.values())


# --- ingestion -------------------------------------------------------------


def read_records_jsonl(path: str | Path) -> list[PublicationRecord]:
    records = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    records.append(PublicationRecord.from_dict(json.loads(line)))
                except (ValueError, KeyError, TypeError) as exc:
                    raise InputUnreadable(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise InputUnreadable(str(exc)) from exc
    return records


def _read_csv(path: str | Path, columns: Sequence[str]) -> list[dict[str, str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not set(columns) <= set(reader.fieldnames):
                raise InputUnreadable(f"{path}: expected columns {','.join(columns)}")
            return list(reader)
    except OSError as exc:
        raise InputUnreadable(str(exc)) from exc


def read_records_csv(
    manifest_path: str | Path,
    codes_path: str | Path | None = None,
    authors_path: str | Path | None = None,
) -> list[PublicationRecord]:
    """Records from a ``work_id,period,field`` manifest plus optional
    ``work_id,code`` and ``work_id,author`` incidence files."""
    codes: dict[str, list[str]] = defaultdict(list)
    authors: dict[str, list[str]] = defaultdict(list)
    if codes_path is not None:
        for row in _read_csv(codes_path, ("work_id", "code")):
            codes[row["work_id"]].append(row["code"])
    if authors_path is not None:
        for row in _read_csv(authors_path, ("work_id", "author")):
            authors[row["work_id"]].append(row["author"])
    records = []
    for row in _read_csv(manifest_path, ("work_id", "period", "field")):
        try:
            records.append(
                PublicationRecord(
                    row["work_id"], int(row["period"]), row["field"],
                    tuple(codes.get(row["work_id"], ())), tuple(authors.get(row["work_id"], ())),
                )
            )
        except ValueError as exc:
            raise InputUnreadable(f"{manifest_path}: {exc}") from exc
    return records


def write_records_jsonl(records: Iterable[PublicationRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            obj = {"work_id": r.work_id, "period": r.period, "field": r.field,
                   "codes": list(r.codes), "authors": list(r.authors)}
            fh.write(json.dumps(obj, sort_keys=True) + "\n")
