import json
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from knowtopo.errors import EmptySelection, InputUnreadable
from knowtopo.networks import (
    NetworkSpec,
    PublicationRecord,
    build_collaboration_network,
    build_knowledge_network,
    project_two_mode,
    read_records_csv,
    read_records_jsonl,
    shift_period,
    write_records_jsonl,
)

K = NetworkSpec("knowledge", "phys", 2000)


def rec(i, codes=(), authors=(), period=2000, field="phys"):
    return PublicationRecord(f"w{i}", period, field, tuple(codes), tuple(authors))


def weights(g):
    return {frozenset((g.labels[u], g.labels[v])): w for u, v, w in g.edges}


def test_single_work_is_a_clique():
    g = build_knowledge_network([rec(0, "ABC")], K)
    assert g.node_count == 3
    assert sorted(w for *_, w in g.edges) == [1, 1, 1]


def test_counts_aggregate():
    g = build_knowledge_network([rec(0, "AB"), rec(1, "AB")], K)
    assert g.edges == ((0, 1, 2),)


def test_lone_codes_are_isolated_nodes():
    g = build_knowledge_network([rec(0, "A"), rec(1, "B")], K)
    assert (g.node_count, g.edge_count) == (2, 0)


def test_field_and_period_filter():
    records = [rec(0, "AB"), rec(1, "CD", field="bio"), rec(2, "EF", period=2001)]
    g = build_knowledge_network(records, K)
    assert set(g.labels) == {"A", "B"}


def test_empty_selection():
    assert build_knowledge_network([], K).node_count == 0
    with pytest.raises(EmptySelection):
        build_knowledge_network([], K, strict=True)


def test_repeated_codes_deduplicated():
    r = rec(0, ["A", "B", "A"])
    assert r.codes == ("A", "B")
    assert build_knowledge_network([r], K).edges == ((0, 1, 1),)


def test_collaboration_single_work():
    spec = NetworkSpec("collaboration", "phys", 2000, 1)
    g = build_collaboration_network([rec(0, authors="xyz")], spec)
    assert g.edge_count == 3 and all(w == 1 for *_, w in g.edges)


def test_collaboration_window_boundary():
    spec = NetworkSpec("collaboration", "phys", 2000, 3)
    old = rec(0, authors="pq", period=1997)
    inside = rec(1, authors="rs", period=1998)
    g = build_collaboration_network([old, inside], spec)
    assert set(g.labels) == {"r", "s"}


def test_collaboration_aggregates_across_window():
    spec = NetworkSpec("collaboration", "phys", 2000, 3)
    g = build_collaboration_network([rec(0, authors="xy", period=1999), rec(1, authors="xy", period=2000)], spec)
    assert g.edges == ((0, 1, 2),)


def test_single_author_works_are_isolated():
    spec = NetworkSpec("collaboration", "phys", 2000, 1)
    g = build_collaboration_network([rec(0, authors="x"), rec(1, authors="yz")], spec)
    assert g.node_count == 3 and g.edge_count == 1


def test_knowledge_window_fixed():
    with pytest.raises(ValueError):
        NetworkSpec("knowledge", "phys", 2000, 3)
    with pytest.raises(ValueError):
        NetworkSpec("collaboration", "phys", 2000, 0)


def test_project_two_mode_examples():
    assert weights(project_two_mode([("w1", "A"), ("w1", "B")])) == {frozenset("AB"): 1}
    g = project_two_mode([("w1", "A")])
    assert (g.node_count, g.edge_count) == (1, 0)
    g = project_two_mode([("w1", "A"), ("w1", "B"), ("w2", "B"), ("w2", "A"), ("w2", "C")])
    assert weights(g)[frozenset("AB")] == 2


record_lists = st.lists(
    st.lists(st.sampled_from("ABCDEFGH"), min_size=0, max_size=6),
    min_size=1,
    max_size=25,
)


@given(record_lists)
def test_projection_matches_knowledge_network(code_lists):
    records = [rec(i, codes) for i, codes in enumerate(code_lists)]
    g1 = build_knowledge_network(records, K)
    pairs = [(r.work_id, c) for r in records for c in r.codes]
    g2 = project_two_mode(pairs)
    assert g1 == g2


@given(record_lists, st.sampled_from("ABCDEFGHZ"))
def test_single_code_record_never_changes_weights(code_lists, code):
    records = [rec(i, codes) for i, codes in enumerate(code_lists)]
    before = build_knowledge_network(records, K)
    after = build_knowledge_network(records + [rec(999, [code])], K)
    assert weights(before) == weights(after)
    assert after.node_count - before.node_count in (0, 1)


@given(st.integers(2, 8))
def test_pair_increments(m):
    codes = [f"c{i}" for i in range(m)]
    g = build_knowledge_network([rec(0, codes)], K)
    assert g.edge_count == len(list(combinations(codes, 2)))


@given(record_lists)
def test_collaboration_window1_is_knowledge_construction(author_lists):
    records = [rec(i, authors=a) for i, a in enumerate(author_lists)]
    swapped = [rec(i, codes=a) for i, a in enumerate(author_lists)]
    spec = NetworkSpec("collaboration", "phys", 2000, 1)
    assert build_collaboration_network(records, spec) == build_knowledge_network(swapped, K)


def test_monthly_period_shift():
    assert shift_period(201201, -1, "monthly") == 201112
    assert shift_period(201112, 1, "monthly") == 201201
    assert shift_period(201203, -2, "monthly") == 201201
    spec = NetworkSpec("collaboration", "se", 201202, 3, "monthly")
    assert spec.first_period() == 201112


def test_jsonl_roundtrip(tmp_path):
    records = [rec(0, "AB", "xy"), rec(1, "C", (), period=2001, field="bio")]
    path = tmp_path / "r.jsonl"
    write_records_jsonl(records, path)
    assert read_records_jsonl(path) == records


def test_jsonl_bad_line(tmp_path):
    path = tmp_path / "r.jsonl"
    path.write_text(json.dumps({"work_id": "w", "period": 1}) + "\n")
    with pytest.raises(InputUnreadable):
        read_records_jsonl(path)


def test_csv_ingestion(tmp_path):
    (tmp_path / "m.csv").write_text("work_id,period,field\nw1,2000,phys\nw2,2001,phys\n")
    (tmp_path / "c.csv").write_text("work_id,code\nw1,A\nw1,B\nw2,C\n")
    (tmp_path / "a.csv").write_text("work_id,author\nw1,x\nw2,y\nw2,z\n")
    records = read_records_csv(tmp_path / "m.csv", tmp_path / "c.csv", tmp_path / "a.csv")
    assert records == [rec(1, "AB", "x"), PublicationRecord("w2", 2001, "phys", ("C",), ("y", "z"))]
