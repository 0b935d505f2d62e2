"""Batch orchestration: records in, Betti tables, diagrams, distances,
classical measures and null-model reports out.

Every (field, period, network kind) is an independent task. Tasks run on a
process pool when ``workers > 1``; results are gathered in task order, so
output bytes never depend on scheduling.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import re
import sys
import zlib
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from itertools import combinations
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import scipy

from . import __version__
from .baselines import (
    MEASURE_NAMES,
    MODELS,
    RandomModelSpec,
    betti_null_test,
    default_rewire_probs,
    network_measures,
    pearson_correlation,
    spearman_correlation,
)
from .distances import METRICS, distance
from .errors import (
    ConfigInvalid,
    DegenerateInput,
    DimensionCapTooLarge,
    DimensionUnavailable,
    InputUnreadable,
    KnowTopoError,
)
from .filtration import DEFAULT_CELL_BUDGET, enumerate_flag_complex
from .graph import BettiProfile, PersistenceDiagram, WeightedGraph, format_number, write_edge_csv
from .networks import (
    COLLABORATION,
    GRANULARITIES,
    KNOWLEDGE,
    NetworkSpec,
    PublicationRecord,
    build_network,
    period_range,
    read_records_csv,
    read_records_jsonl,
)
from .persistence import betti_profile, diagram_from_reduction, reduce

log = logging.getLogger(__name__)

VERBS = ("build", "persist", "distances", "baselines", "measures", "all")
STAGES = {
    "build": {"build"},
    "persist": {"persist"},
    "distances": {"persist", "distances"},
    "baselines": {"persist", "baselines"},
    "measures": {"persist", "measures"},
    "all": {"build", "persist", "distances", "baselines", "measures"},
}
MANIFEST_NAME = "run_manifest.json"


@dataclass
class NullConfig:
    models: list[str] = field(default_factory=lambda: list(MODELS))
    seeds: int = 10
    ws_rewire_probs: list[float] = field(default_factory=default_rewire_probs)


@dataclass
class RunConfig:
    """Everything a run needs. See README for the JSON layout."""

    records: str | None = None
    manifest: str | None = None
    codes: str | None = None
    authors: str | None = None
    periods: tuple[int, int] | None = None
    granularity: str = "yearly"
    fields: list[str] | None = None
    kinds: list[str] = field(default_factory=lambda: [KNOWLEDGE, COLLABORATION])
    windows: list[int] = field(default_factory=lambda: [1, 3])
    cell_cap: int = 4
    homology_cap: int = 3
    metrics: list[str] = field(default_factory=lambda: list(METRICS))
    nulls: NullConfig | None = None
    output: str = "knowtopo_out"
    seed: int = 0
    workers: int = 1
    cell_budget: int = DEFAULT_CELL_BUDGET
    drop_isolates: bool = False
    drop_zero_persistence: bool = True
    field_map: str | None = None

    def validate(self) -> "RunConfig":
        if self.records is None and self.manifest is None:
            raise ConfigInvalid("config needs 'records' (JSON Lines) or 'manifest' (CSV) input")
        if self.periods is not None:
            lo, hi = self.periods
            if lo > hi:
                raise ConfigInvalid(f"empty period range {lo}:{hi}")
        if self.granularity not in GRANULARITIES:
            raise ConfigInvalid(f"granularity must be one of {GRANULARITIES}")
        for k in self.kinds:
            if k not in (KNOWLEDGE, COLLABORATION):
                raise ConfigInvalid(f"unknown network kind {k!r}")
        if not self.windows or any(w < 1 for w in self.windows):
            raise ConfigInvalid("windows must be positive")
        if self.cell_cap < 1 or self.homology_cap < 0:
            raise ConfigInvalid("cell_cap must be >= 1 and homology_cap >= 0")
        if self.homology_cap > self.cell_cap - 1:
            raise ConfigInvalid("homology_cap must be <= cell_cap - 1")
        for m in self.metrics:
            if m not in METRICS:
                raise ConfigInvalid(f"unknown metric {m!r}")
        if self.workers < 1:
            raise ConfigInvalid("workers must be >= 1")
        if self.cell_budget < 1:
            raise ConfigInvalid("cell_budget must be positive")
        if self.nulls is not None:
            for m in self.nulls.models:
                if m not in MODELS:
                    raise ConfigInvalid(f"unknown null model {m!r}")
            if self.nulls.seeds < 2:
                raise ConfigInvalid("null models need at least 2 seeds for the t-test")
        return self

    @classmethod
    def from_dict(cls, data: dict, base_dir: str | Path | None = None) -> "RunConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigInvalid(f"unknown config keys: {', '.join(sorted(unknown))}")
        kwargs = dict(data)
        try:
            if kwargs.get("periods") is not None:
                kwargs["periods"] = parse_periods(kwargs["periods"])
            if kwargs.get("nulls") is not None:
                kwargs["nulls"] = NullConfig(**kwargs["nulls"])
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(str(exc)) from exc
        if base_dir is not None:
            for key in ("records", "manifest", "codes", "authors", "field_map", "output"):
                if kwargs.get(key) is not None and not Path(kwargs[key]).is_absolute():
                    kwargs[key] = str(Path(base_dir) / kwargs[key])
        try:
            cfg = cls(**kwargs)
        except TypeError as exc:
            raise ConfigInvalid(str(exc)) from exc
        return cfg.validate()

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputUnreadable(str(exc)) from exc
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"{path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigInvalid("config must be a JSON object")
        return cls.from_dict(data, Path(path).parent)

    def canonical(self) -> dict:
        """Config content that determines outputs (output dir and worker
        count excluded)."""
        d = asdict(self)
        d.pop("output")
        d.pop("workers")
        if d["periods"] is not None:
            d["periods"] = list(d["periods"])
        return d

    def hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def parse_periods(value: Any) -> tuple[int, int]:
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) != 2:
            raise ValueError(f"period range must look like START:END, got {value!r}")
        return int(parts[0]), int(parts[1])
    lo, hi = value
    return int(lo), int(hi)


# --- tasks ------------------------------------------------------------------


@dataclass
class NetworkTask:
    spec: NetworkSpec
    records: list[PublicationRecord]
    cell_cap: int
    homology_cap: int
    cell_budget: int
    drop_isolates: bool
    drop_zero_persistence: bool
    persist: bool
    measures: bool

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.spec.field, self.spec.period, self.spec.label)


@dataclass
class TaskResult:
    field: str
    period: int
    kind: str
    status: str = "ok"
    message: str = ""
    graph: WeightedGraph | None = None
    homology_cap_reached: int | None = None
    profile: BettiProfile | None = None
    diagram: PersistenceDiagram | None = None
    measures: dict | None = None

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.field, self.period, self.kind)


def persistence_with_fallback(
    g: WeightedGraph, cell_cap: int, homology_cap: int, cell_budget: int, drop_zero: bool = True
) -> tuple[BettiProfile, PersistenceDiagram, int]:
    """Persistence at the requested caps, stepping the cell cap down while the
    enumeration exceeds ``cell_budget``. Returns the homology cap reached."""
    cap, h = cell_cap, homology_cap
    while True:
        try:
            f = enumerate_flag_complex(g, cap, cell_budget)
            break
        except DimensionCapTooLarge:
            if cap <= 1:
                raise
            cap -= 1
            h = min(h, cap - 1)
            log.warning("cell budget exceeded; retrying with cell cap %d", cap)
    r = reduce(f, h)
    return betti_profile(f, r), diagram_from_reduction(f, r, drop_zero), h


def run_network_task(task: NetworkTask) -> TaskResult:
    spec = task.spec
    res = TaskResult(spec.field, spec.period, spec.label)
    try:
        g = build_network(task.records, spec)
        if task.drop_isolates:
            g = g.without_isolates()
        res.graph = g
        if task.measures:
            res.measures = network_measures(g).as_dict()
        if task.persist:
            profile, diagram, h = persistence_with_fallback(
                g, task.cell_cap, task.homology_cap, task.cell_budget, task.drop_zero_persistence
            )
            res.profile, res.diagram, res.homology_cap_reached = profile, diagram, h
            if h < task.homology_cap:
                res.status = "degraded"
                res.message = f"cell budget reached; homology computed to dimension {h}"
    except KnowTopoError as exc:
        res.status = "failed"
        res.message = f"{type(exc).__name__}: {exc}"
    except Exception as exc:  # task isolation: record and carry on
        log.exception("task %s failed", task.key)
        res.status = "failed"
        res.message = f"{type(exc).__name__}: {exc}"
    return res


@dataclass
class NullTask:
    field: str
    period: int
    model: str
    param: float | None
    seed_index: int
    seed: tuple[int, ...]
    node_count: int
    edge_count: int
    cell_cap: int
    homology_cap: int
    cell_budget: int


@dataclass
class NullResult:
    task: NullTask
    status: str = "ok"
    message: str = ""
    edge_count: int | None = None
    profile: BettiProfile | None = None
    homology_cap_reached: int | None = None


def run_null_task(task: NullTask) -> NullResult:
    res = NullResult(task)
    try:
        spec = RandomModelSpec(task.model, task.node_count, task.edge_count, seeds=(0,))
        g = spec.generate(task.seed, task.param)
        res.edge_count = g.edge_count
        res.profile, _, res.homology_cap_reached = persistence_with_fallback(
            g, task.cell_cap, task.homology_cap, task.cell_budget
        )
    except KnowTopoError as exc:
        res.status = "failed"
        res.message = f"{type(exc).__name__}: {exc}"
    except Exception as exc:
        log.exception("null task failed")
        res.status = "failed"
        res.message = f"{type(exc).__name__}: {exc}"
    return res


def _run_all(fn, tasks: Sequence, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


def null_seed(base: int, field_name: str, period: int, model: str, param: float | None, index: int) -> tuple[int, ...]:
    tag = zlib.crc32(f"{field_name}|{period}|{model}|{param!r}".encode())
    return (base, tag, index)


# --- reporting --------------------------------------------------------------


@dataclass
class RunReport:
    verb: str
    output_dir: Path
    tasks: list[TaskResult]
    null_results: list[NullResult] = field(default_factory=list)
    files: dict[str, str] = field(default_factory=dict)
    manifest: dict = field(default_factory=dict)

    @property
    def failed(self) -> int:
        return sum(1 for t in self.tasks if t.status == "failed") + sum(
            1 for n in self.null_results if n.status == "failed"
        )

    @property
    def exit_code(self) -> int:
        return 2 if self.failed else 0


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text)


def task_slug(field_name: str, period: int, kind: str) -> str:
    return f"{_slug(field_name)}__{period}__{kind}"


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else format_number(v) for v in row])


def betti_header(homology_cap: int) -> list[str]:
    return (
        ["field", "period", "kind"]
        + [f"beta{k}" for k in range(homology_cap + 1)]
        + [f"delta{k}" for k in range(homology_cap + 2)]
    )


def betti_row(res: TaskResult, homology_cap: int) -> dict:
    """Betti/cell values keyed by series name; ``None`` where a dimension was
    not computed."""
    row: dict[str, Any] = {"field": res.field, "period": res.period, "kind": res.kind}
    h = res.homology_cap_reached if res.profile is not None else -1
    for k in range(homology_cap + 1):
        row[f"beta{k}"] = res.profile.betti[k] if res.profile is not None and k <= h else None
    for k in range(homology_cap + 2):
        row[f"delta{k}"] = res.profile.cells[k] if res.profile is not None and k <= h + 1 else None
    return row


def emit_timeseries(
    betti_rows: Sequence[dict],
    field_map: dict[str, str] | None = None,
    homology_cap: int = 3,
) -> list[tuple[str, str, int, str, float | None]]:
    """Long-format ``(level, field, period, series, value)`` rows.

    ``subfield`` rows repeat the task values. ``field`` rows are unweighted
    means over the subfields mapped to each field (identity mapping when
    ``field_map`` is None); missing values are skipped, and a series missing
    for every subfield stays missing rather than becoming zero.
    """
    series = [f"beta{k}" for k in range(homology_cap + 1)] + [f"delta{k}" for k in range(homology_cap + 2)]
    out: list[tuple[str, str, int, str, float | None]] = []
    grouped: dict[tuple[str, int], list[dict]] = defaultdict(list)
    for row in sorted(betti_rows, key=lambda r: (r["field"], r["period"])):
        for s in series:
            out.append(("subfield", row["field"], row["period"], s, row.get(s)))
        parent = (field_map or {}).get(row["field"], row["field"])
        grouped[parent, row["period"]].append(row)
    for (parent, period), rows in sorted(grouped.items()):
        for s in series:
            vals = [r[s] for r in rows if r.get(s) is not None]
            out.append(("field", parent, period, s, math.fsum(vals) / len(vals) if vals else None))
    return out


def _file_hash(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# --- the pipeline -----------------------------------------------------------


def load_records(cfg: RunConfig) -> list[PublicationRecord]:
    if cfg.records is not None:
        return read_records_jsonl(cfg.records)
    return read_records_csv(cfg.manifest, cfg.codes, cfg.authors)


def load_field_map(cfg: RunConfig) -> dict[str, str] | None:
    if cfg.field_map is None:
        return None
    try:
        with open(cfg.field_map, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputUnreadable(f"{cfg.field_map}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigInvalid("field map must be a JSON object of subfield -> field")
    return {str(k): str(v) for k, v in data.items()}


def plan_network_tasks(records: Sequence[PublicationRecord], cfg: RunConfig, stages: set[str]) -> list[NetworkTask]:
    """One task per (field, period, kind, window) for each period in which the
    field has at least one record."""
    by_field: dict[str, list[PublicationRecord]] = defaultdict(list)
    for r in records:
        if cfg.fields is not None and r.field not in cfg.fields:
            continue
        by_field[r.field].append(r)
    allowed = None
    if cfg.periods is not None:
        allowed = set(period_range(cfg.periods[0], cfg.periods[1], cfg.granularity))
    specs: list[NetworkSpec] = []
    for fname in sorted(by_field):
        periods = sorted({r.period for r in by_field[fname]})
        if allowed is not None:
            periods = [p for p in periods if p in allowed]
        for p in periods:
            if KNOWLEDGE in cfg.kinds:
                specs.append(NetworkSpec(KNOWLEDGE, fname, p, 1, cfg.granularity))
            if COLLABORATION in cfg.kinds:
                for w in sorted(set(cfg.windows)):
                    specs.append(NetworkSpec(COLLABORATION, fname, p, w, cfg.granularity))
    tasks = []
    for spec in specs:
        lo = spec.first_period()
        subset = [r for r in by_field[spec.field] if lo <= r.period <= spec.period]
        tasks.append(
            NetworkTask(
                spec, subset, cfg.cell_cap, cfg.homology_cap, cfg.cell_budget,
                cfg.drop_isolates, cfg.drop_zero_persistence,
                persist="persist" in stages, measures="measures" in stages,
            )
        )
    return tasks


def run_pipeline(cfg: RunConfig, verb: str = "all") -> RunReport:
    if verb not in VERBS:
        raise ConfigInvalid(f"unknown verb {verb!r}")
    cfg.validate()
    stages = STAGES[verb]
    records = load_records(cfg)
    field_map = load_field_map(cfg)
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)

    tasks = plan_network_tasks(records, cfg, stages)
    log.info("running %d network tasks with %d workers", len(tasks), cfg.workers)
    results: list[TaskResult] = _run_all(run_network_task, tasks, cfg.workers)
    report = RunReport(verb, out, results)
    written: list[Path] = []
    H = cfg.homology_cap

    if "build" in stages:
        rows = []
        for res in results:
            if res.graph is None:
                continue
            rel = Path("networks") / f"{task_slug(*res.key)}.csv"
            (out / rel).parent.mkdir(parents=True, exist_ok=True)
            write_edge_csv(res.graph, out / rel)
            written.append(out / rel)
            rows.append((res.field, res.period, res.kind, res.graph.node_count, res.graph.edge_count, rel.as_posix()))
        _write_csv(out / "networks.csv", ["field", "period", "kind", "nodes", "edges", "file"], rows)
        written.append(out / "networks.csv")

    persisted = [r for r in results if r.profile is not None]
    if "persist" in stages:
        _write_csv(
            out / "betti.csv",
            betti_header(H),
            ([row[c] for c in betti_header(H)] for row in (betti_row(r, H) for r in persisted)),
        )
        written.append(out / "betti.csv")
        for res in persisted:
            rel = Path("diagrams") / f"{task_slug(*res.key)}.csv"
            (out / rel).parent.mkdir(parents=True, exist_ok=True)
            res.diagram.write_csv(out / rel)
            written.append(out / rel)
        for kind in sorted({r.kind for r in persisted}):
            rows = [betti_row(r, H) for r in persisted if r.kind == kind]
            path = out / f"timeseries_{kind}.csv"
            _write_csv(path, ["level", "field", "period", "series", "value"], emit_timeseries(rows, field_map, H))
            written.append(path)

    if "distances" in stages:
        written += _write_distances(persisted, cfg, out)

    if "measures" in stages:
        written += _write_measures(results, cfg, out)

    if "baselines" in stages:
        report.null_results, null_meta = _run_nulls(persisted, cfg)
        written += _write_nulls(persisted, report.null_results, cfg, out)
    else:
        null_meta = None

    report.files = {p.relative_to(out).as_posix(): _file_hash(p) for p in sorted(set(written))}
    report.manifest = _manifest(cfg, verb, report, null_meta)
    with open(out / MANIFEST_NAME, "w", encoding="utf-8") as fh:
        json.dump(report.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


def _write_distances(persisted: list[TaskResult], cfg: RunConfig, out: Path) -> list[Path]:
    header = ["field_a", "period_a", "field_b", "period_b", "dimension", "metric", "distance"]
    dims = range(cfg.homology_cap + 1)
    means: list[tuple] = []
    written = []

    def safe_distance(a: TaskResult, b: TaskResult, k: int, metric: str) -> float | None:
        try:
            return distance(a.diagram, b.diagram, k, metric)
        except DimensionUnavailable:
            return None

    knowledge = [r for r in persisted if r.kind == KNOWLEDGE]
    by_period: dict[int, list[TaskResult]] = defaultdict(list)
    for r in knowledge:
        by_period[r.period].append(r)
    rows = []
    for period in sorted(by_period):
        group = sorted(by_period[period], key=lambda r: r.field)
        for k in dims:
            for metric in cfg.metrics:
                vals = []
                for a, b in combinations(group, 2):
                    d = safe_distance(a, b, k, metric)
                    if d is None:
                        continue
                    rows.append((a.field, period, b.field, period, k, metric, d))
                    vals.append(d)
                if vals:
                    finite = [v for v in vals if not math.isinf(v)]
                    mean = math.fsum(finite) / len(finite) if finite else None
                    means.append(("cross_field", period, k, metric, mean, len(finite), len(vals) - len(finite)))
    _write_csv(out / "distances_cross_field.csv", header, rows)
    written.append(out / "distances_cross_field.csv")

    collab_kinds = sorted({r.kind for r in persisted if r.kind != KNOWLEDGE})
    index = {r.key: r for r in persisted}
    for ckind in collab_kinds:
        rows = []
        per: dict[tuple[int, int, str], list[float]] = defaultdict(list)
        for r in knowledge:
            other = index.get((r.field, r.period, ckind))
            if other is None:
                continue
            for k in dims:
                for metric in cfg.metrics:
                    d = safe_distance(r, other, k, metric)
                    if d is None:
                        continue
                    rows.append((r.field, r.period, other.field, other.period, k, metric, d))
                    per[r.period, k, metric].append(d)
        name = f"distances_knowledge_vs_{ckind}.csv"
        _write_csv(out / name, header, rows)
        written.append(out / name)
        for (period, k, metric), vals in sorted(per.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
            finite = [v for v in vals if not math.isinf(v)]
            mean = math.fsum(finite) / len(finite) if finite else None
            means.append((f"knowledge_vs_{ckind}", period, k, metric, mean, len(finite), len(vals) - len(finite)))
    _write_csv(
        out / "distance_means.csv",
        ["comparison", "period", "dimension", "metric", "mean", "finite_pairs", "infinite_pairs"],
        means,
    )
    written.append(out / "distance_means.csv")
    return written


def _write_measures(results: list[TaskResult], cfg: RunConfig, out: Path) -> list[Path]:
    H = cfg.homology_cap
    rows = [
        (r.field, r.period, r.kind, *[r.measures[m] for m in MEASURE_NAMES])
        for r in results
        if r.measures is not None
    ]
    _write_csv(out / "measures.csv", ["field", "period", "kind", *MEASURE_NAMES], rows)
    written = [out / "measures.csv"]

    corr_rows = []
    series = [f"beta{k}" for k in range(H + 1)] + [f"delta{k}" for k in range(H + 2)]
    for kind in sorted({r.kind for r in results if r.measures is not None and r.profile is not None}):
        sample = [r for r in results if r.kind == kind and r.measures is not None and r.profile is not None]
        topo = [betti_row(r, H) for r in sample]
        for s in series:
            for m in MEASURE_NAMES:
                pts = [
                    (t[s], r.measures[m])
                    for t, r in zip(topo, sample)
                    if t[s] is not None and r.measures[m] is not None
                ]
                xs = [p[0] for p in pts]
                ys = [p[1] for p in pts]
                rho = r_p = None
                if len(pts) >= 3:
                    try:
                        rho = spearman_correlation(xs, ys)
                        r_p = pearson_correlation(xs, ys)
                    except DegenerateInput:
                        pass
                corr_rows.append((kind, s, m, len(pts), rho, r_p))
    _write_csv(out / "correlations.csv", ["kind", "topology", "measure", "n", "spearman", "pearson"], corr_rows)
    written.append(out / "correlations.csv")
    return written


def _run_nulls(persisted: list[TaskResult], cfg: RunConfig) -> tuple[list[NullResult], dict]:
    nc = cfg.nulls or NullConfig()
    tasks = []
    for r in persisted:
        if r.kind != KNOWLEDGE:
            continue
        n, m = r.graph.node_count, r.graph.edge_count
        for model in nc.models:
            params = list(nc.ws_rewire_probs) if model == "WS" else [None]
            for param in params:
                for i in range(nc.seeds):
                    tasks.append(
                        NullTask(
                            r.field, r.period, model, param, i,
                            null_seed(cfg.seed, r.field, r.period, model, param, i),
                            n, m, cfg.cell_cap, cfg.homology_cap, cfg.cell_budget,
                        )
                    )
    results = _run_all(run_null_task, tasks, cfg.workers)
    meta = defaultdict(dict)
    for res in results:
        t = res.task
        key = f"{t.field}|{t.period}"
        entry = meta[key].setdefault(
            f"{t.model}|{format_number(t.param)}",
            {"target_edges": t.edge_count, "edge_delta": [], "failures": 0},
        )
        if res.edge_count is not None:
            entry["edge_delta"].append(res.edge_count - t.edge_count)
        if res.status == "failed":
            entry["failures"] += 1
            entry["error"] = res.message
    return results, {k: meta[k] for k in sorted(meta)}


def _write_nulls(persisted: list[TaskResult], null_results: list[NullResult], cfg: RunConfig, out: Path) -> list[Path]:
    H = cfg.homology_cap
    header = (
        ["field", "period", "model", "param", "seed"]
        + [f"beta{k}" for k in range(H + 1)]
        + [f"t{k}" for k in range(H + 1)]
        + [f"p{k}" for k in range(H + 1)]
    )
    observed = {(r.field, r.period): r for r in persisted if r.kind == KNOWLEDGE}
    groups: dict[tuple, list[NullResult]] = defaultdict(list)
    for res in null_results:
        t = res.task
        groups[t.field, t.period, t.model, t.param].append(res)
    rows = []
    blanks = [None] * (2 * (H + 1))
    for (fname, period, model, param), group in groups.items():
        ok = [g for g in group if g.profile is not None]
        for g in group:
            betti = [
                g.profile.betti[k] if g.profile is not None and k <= g.homology_cap_reached else None
                for k in range(H + 1)
            ]
            rows.append((fname, period, model, param, g.task.seed_index, *betti, *blanks))
        obs = observed[fname, period]
        means, ts, ps = [], [], []
        for k in range(H + 1):
            vals = [g.profile.betti[k] for g in ok if k <= g.homology_cap_reached]
            obs_ok = k <= obs.homology_cap_reached
            means.append(float(np.mean(vals)) if vals else None)
            if len(vals) >= 2 and obs_ok:
                t, p = betti_null_test(obs.profile.betti[k], vals, 0)
                ts.append(t)
                ps.append(p)
            else:
                ts.append(None)
                ps.append(None)
        rows.append((fname, period, model, param, "mean", *means, *ts, *ps))
    _write_csv(out / "nulls.csv", header, rows)
    return [out / "nulls.csv"]


def _input_hashes(cfg: RunConfig) -> dict[str, str]:
    hashes = {}
    for key in ("records", "manifest", "codes", "authors", "field_map"):
        path = getattr(cfg, key)
        if path is not None:
            hashes[key] = _file_hash(Path(path))
    return hashes


def _manifest(cfg: RunConfig, verb: str, report: RunReport, null_meta: dict | None) -> dict:
    tasks = []
    for r in report.tasks:
        entry = {
            "field": r.field,
            "period": r.period,
            "kind": r.kind,
            "status": r.status,
        }
        if r.message:
            entry["message"] = r.message
        if r.graph is not None:
            entry["nodes"] = r.graph.node_count
            entry["edges"] = r.graph.edge_count
        if r.homology_cap_reached is not None:
            entry["homology_cap_reached"] = r.homology_cap_reached
        if r.diagram is not None:
            entry["filtration_fingerprint"] = r.diagram.graph_fingerprint
        tasks.append(entry)
    manifest = {
        "tool": "knowtopo",
        "verb": verb,
        "config_hash": cfg.hash(),
        "input_hashes": _input_hashes(cfg),
        "versions": {
            "knowtopo": __version__,
            "python": ".".join(map(str, sys.version_info[:3])),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "conventions": {
            "essential_points": "matched by sorted birth within a dimension; unequal counts give inf, "
            "excluded from means and counted as infinite_pairs",
            "zero_persistence_dropped": cfg.drop_zero_persistence,
            "vertex_birth": 0,
            "window": "trailing: period y with window i covers [y-i+1, y]",
            "missing_values": "empty cell",
        },
        "tasks": tasks,
        "task_counts": {
            status: sum(1 for r in report.tasks if r.status == status) for status in ("ok", "degraded", "failed")
        },
        "files": report.files,
    }
    if null_meta is not None:
        manifest["null_models"] = null_meta
        manifest["null_failures"] = sum(1 for n in report.null_results if n.status == "failed")
    return manifest


def verify_manifest(output_dir: str | Path) -> list[str]:
    """Files whose current hash differs from the manifest (empty if intact)."""
    out = Path(output_dir)
    with open(out / MANIFEST_NAME, encoding="utf-8") as fh:
        manifest = json.load(fh)
    bad = []
    for rel, digest in manifest["files"].items():
        path = out / rel
        if not path.exists() or _file_hash(path) != digest:
            bad.append(rel)
    return bad


def with_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None}).validate()
