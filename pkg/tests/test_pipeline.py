import csv
import json
from pathlib import Path

import pytest

from knowtopo.cli import main
from knowtopo.errors import ConfigInvalid
from knowtopo.networks import PublicationRecord, write_records_jsonl
from knowtopo.pipeline import (
    NullConfig,
    RunConfig,
    emit_timeseries,
    parse_periods,
    run_pipeline,
    verify_manifest,
)
from knowtopo.synthetic import synthetic_records


def tree_bytes(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def corpus(tmp_path):
    recs = []
    for i, fld in enumerate(("phys", "bio")):
        for p in (2000, 2001, 2002):
            recs += synthetic_records(20, 30, seed=100 * i + p, field=fld, period=p, n_authors=25)
    path = tmp_path / "records.jsonl"
    write_records_jsonl(recs, path)
    return path


def small_config(records, out, **kw):
    base = dict(records=str(records), output=str(out), nulls=NullConfig(seeds=3, ws_rewire_probs=[0.2, 0.8]))
    base.update(kw)
    return RunConfig(**base).validate()


def test_empty_records(tmp_path):
    path = tmp_path / "r.jsonl"
    path.write_text("")
    report = run_pipeline(small_config(path, tmp_path / "out"), "all")
    assert report.tasks == [] and report.exit_code == 0
    assert (tmp_path / "out" / "run_manifest.json").exists()


def test_single_knowledge_task(tmp_path):
    path = tmp_path / "r.jsonl"
    write_records_jsonl([PublicationRecord("w1", 2000, "phys", ("A", "B", "C"), ("x",))], path)
    cfg = small_config(path, tmp_path / "out", kinds=["knowledge"])
    report = run_pipeline(cfg, "persist")
    assert len(report.tasks) == 1
    rows = read_rows(tmp_path / "out" / "betti.csv")
    assert len(rows) == 1
    assert (rows[0]["beta0"], rows[0]["beta1"], rows[0]["delta2"]) == ("1", "0", "1")
    assert len(list((tmp_path / "out" / "diagrams").iterdir())) == 1


def test_rerun_is_byte_identical(corpus, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_pipeline(small_config(corpus, a), "all")
    run_pipeline(small_config(corpus, b), "all")
    assert tree_bytes(a) == tree_bytes(b)


def test_workers_do_not_change_output(corpus, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_pipeline(small_config(corpus, a, workers=1), "all")
    run_pipeline(small_config(corpus, b, workers=3), "all")
    assert tree_bytes(a) == tree_bytes(b)


def test_manifest_verification(corpus, tmp_path):
    out = tmp_path / "out"
    run_pipeline(small_config(corpus, out), "all")
    assert verify_manifest(out) == []
    manifest = json.loads((out / "run_manifest.json").read_text())
    assert manifest["task_counts"]["failed"] == 0
    (out / "betti.csv").write_text("tampered\n")
    assert verify_manifest(out) == ["betti.csv"]


def test_seed_changes_only_nulls(corpus, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_pipeline(small_config(corpus, a, seed=1), "all")
    run_pipeline(small_config(corpus, b, seed=2), "all")
    ta, tb = tree_bytes(a), tree_bytes(b)
    assert ta["betti.csv"] == tb["betti.csv"]
    assert ta["nulls.csv"] != tb["nulls.csv"]


def test_budget_fallback_degrades(corpus, tmp_path):
    cfg = small_config(corpus, tmp_path / "out", kinds=["knowledge"], cell_budget=150)
    report = run_pipeline(cfg, "persist")
    statuses = {t.status for t in report.tasks}
    assert "degraded" in statuses
    rows = read_rows(tmp_path / "out" / "betti.csv")
    # a degraded row leaves the dimensions it could not reach empty
    assert any(r["beta3"] == "" for r in rows)


def test_network_edge_lists(corpus, tmp_path):
    run_pipeline(small_config(corpus, tmp_path / "out"), "build")
    files = sorted(p.name for p in (tmp_path / "out" / "networks").iterdir())
    assert len(files) == 2 * 3 * 3
    assert (tmp_path / "out" / "networks" / files[0]).read_text().startswith("source,target,weight\n")


def test_timeseries_field_mean():
    rows = [
        {"field": "a1", "period": 2000, "beta1": 10},
        {"field": "a2", "period": 2000, "beta1": 20},
    ]
    out = emit_timeseries(rows, {"a1": "a", "a2": "a"}, homology_cap=1)
    field_rows = {(r[1], r[3]): r[4] for r in out if r[0] == "field"}
    assert field_rows["a", "beta1"] == 15
    assert field_rows["a", "beta0"] is None


def test_timeseries_single_subfield_identity():
    out = emit_timeseries([{"field": "x", "period": 1, "beta0": 3}], None, homology_cap=0)
    assert ("field", "x", 1, "beta0", 3.0) in out
    assert ("subfield", "x", 1, "beta0", 3) in out


def test_parse_periods():
    assert parse_periods("2000:2005") == (2000, 2005)
    assert parse_periods([2000, 2005]) == (2000, 2005)
    with pytest.raises(ValueError):
        parse_periods("2000")


def test_config_validation(tmp_path):
    with pytest.raises(ConfigInvalid):
        RunConfig().validate()
    with pytest.raises(ConfigInvalid):
        RunConfig.from_dict({"records": "x", "bogus": 1})
    with pytest.raises(ConfigInvalid):
        RunConfig(records="x", homology_cap=4, cell_cap=4).validate()
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"records": "r.jsonl", "periods": "2000:2001"}))
    loaded = RunConfig.load(cfg)
    assert loaded.records == str(tmp_path / "r.jsonl")
    assert loaded.periods == (2000, 2001)


def test_config_hash_ignores_output_and_workers():
    a = RunConfig(records="r", output="x", workers=1)
    b = RunConfig(records="r", output="y", workers=4)
    assert a.hash() == b.hash()
    assert a.hash() != RunConfig(records="r", seed=3).hash()


def test_cli_exit_codes(corpus, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["persist", "--records", str(corpus), "--output", str(out), "--homology-cap", "2"]) == 0
    assert read_rows(out / "betti.csv")[0].keys() >= {"beta2", "delta3"}
    assert main(["persist", "--records", str(tmp_path / "missing.jsonl"), "--output", str(out)]) == 1
    assert main(["persist", "--output", str(out)]) == 1
    assert main(["persist", "--records", str(corpus), "--periods", "2005:2000"]) == 1
    capsys.readouterr()


def test_cli_partial_failure_exit_code(tmp_path, monkeypatch):
    import knowtopo.pipeline as pl

    path = tmp_path / "r.jsonl"
    write_records_jsonl(
        [PublicationRecord("w1", 2000, "a", ("A", "B")), PublicationRecord("w2", 2000, "b", ("C", "D"))], path
    )
    real = pl.network_measures

    def flaky(g):
        if "C" in g.labels:
            raise RuntimeError("boom")
        return real(g)

    monkeypatch.setattr(pl, "network_measures", flaky)
    code = main(["measures", "--records", str(path), "--output", str(tmp_path / "o")])
    assert code == 2
    statuses = {(t.field, t.status) for t in run_pipeline(small_config(path, tmp_path / "p"), "measures").tasks}
    assert ("a", "ok") in statuses and ("b", "failed") in statuses


def test_fields_and_periods_filter(corpus, tmp_path):
    cfg = small_config(corpus, tmp_path / "out", fields=["bio"], periods=(2001, 2002), kinds=["knowledge"])
    report = run_pipeline(cfg, "persist")
    assert [(t.field, t.period) for t in report.tasks] == [("bio", 2001), ("bio", 2002)]
