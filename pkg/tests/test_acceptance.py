"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its runtime (run with ``pytest tests/test_acceptance.py
-v -s`` to see them).

Expected values come from independent oracles (exhaustive mapping
enumeration, brute-force predicate scans, set algebra) or from hand
arithmetic frozen into the corpus files; tolerances and time budgets are
pinned here and nowhere else.
"""

from __future__ import annotations

import json
import random
import time
from itertools import permutations
from pathlib import Path

import pytest

from coopkb import AdmissionOutcome, ConceptNode, ConceptualGraph, GraphEdge, \
    KnowledgeBase, Quantifier
from coopkb.fl import lint_text, parse, serialize
from coopkb.journal import read_journal
from coopkb.model import Dimension
from coopkb.ontology import project
from coopkb.protocol import detect_conflicts
from coopkb.query import run_query
from coopkb.replication import (
    SimulationConfig,
    random_local_op,
    simulate,
    state_fingerprint,
)
from coopkb.seed import seed_id
from coopkb.store import rebuild
from coopkb.valuation import FilterCriteria, filter_objects

from conftest import AGENT, CORRECTIVE_RESTRICTION, EXT_GEN, SUBTYPE
from oracles import classify_pair_oracle, project_oracle
from test_fl import descriptions as description_strategy

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def report(name: str, started: float, budget: float | None = None) -> None:
    elapsed = time.monotonic() - started
    if budget is not None:
        assert elapsed < budget, f"{name}: {elapsed:.1f}s over the {budget}s budget"
    print(f"PASS {name} ({elapsed:.2f}s)")


def test_acceptance_bird_walkthrough():
    started = time.monotonic()
    kb = KnowledgeBase("acc")
    for u in ("wn", "john", "joe"):
        kb.register_user(u)
    kb.load_fl("kb#entity subtype: wn#bird\nkb#process subtype: wn#flight\n"
               "wn#bird subtype: wn#healthy_french_bird", "wn")
    john_graph = kb.graph_from_fl("every wn#bird agent: wn#flight", "john")
    john = kb.propose_statement("john", john_graph, connections=[(EXT_GEN, "wn#bird")])
    assert john.outcome is AdmissionOutcome.ACCEPTED

    joe_graph = kb.graph_from_fl("most wn#healthy_french_bird can agent: wn#flight", "joe")
    refused = kb.propose_statement("joe", joe_graph, connections=[])
    assert refused.outcome is AdmissionOutcome.NEEDS_CONNECTION

    accepted = kb.propose_statement(
        "joe", joe_graph, connections=[(CORRECTIVE_RESTRICTION, john.statement_id)])
    assert accepted.outcome is AdmissionOutcome.ACCEPTED

    john_stored = kb.store.statements[john.statement_id]
    joe_stored = kb.store.statements[accepted.statement_id]
    assert (john_stored.creator, sorted(john_stored.believers)) == ("john", ["john"])
    assert (joe_stored.creator, sorted(joe_stored.believers)) == ("joe", ["joe"])
    assert john.statement_id in run_query(kb.store, "search bird").data["objects"]
    report("bird-example walkthrough", started, budget=1.0)


def test_acceptance_paris_chain():
    started = time.monotonic()
    kb = KnowledgeBase("acc")
    kb.register_user("pm")
    kb.load_fl(
        "kb#entity subtype: pm#Paris\n"
        "pm#Paris specialization: pm#Paris_between_1950_and_1960\n"
        "pm#Paris_between_1950_and_1960 specialization: pm#Paris_in_1951",
        "pm")
    down = run_query(kb.store, "spec pm#Paris")
    assert [l.strip() for l in down.text.splitlines()] == [
        "pm#Paris", "pm#Paris_between_1950_and_1960", "pm#Paris_in_1951"]
    up = run_query(kb.store, "gen pm#Paris_in_1951")
    assert [l.strip() for l in up.text.splitlines()] == [
        "pm#Paris_in_1951", "pm#Paris_between_1950_and_1960", "pm#Paris"]
    report("paris chain spec/gen", started, budget=1.0)


def _six_category_kb() -> KnowledgeBase:
    kb = KnowledgeBase("acc")
    kb.register_user("u")
    kb.add_category("u#animal", "u", [(SUBTYPE, "kb#entity")])
    kb.add_category("u#bird", "u", [(SUBTYPE, "u#animal")])
    kb.add_category("u#sparrow", "u", [(SUBTYPE, "u#bird")])
    kb.add_category("u#penguin", "u", [(SUBTYPE, "u#bird")])
    kb.add_category("u#flight", "u", [(SUBTYPE, "kb#process")])
    return kb


ACC_CATS = ["kb#entity", "u#animal", "u#bird", "u#sparrow", "u#penguin", "u#flight"]


def _graphs_exhaustive_two_nodes(reltypes):
    quantifiers = [Quantifier.EVERY, Quantifier.SOME]
    graphs = []
    for c in ACC_CATS:
        for q in quantifiers:
            graphs.append(ConceptualGraph([ConceptNode(c, q)]))
    for c1 in ACC_CATS:
        for q1 in quantifiers:
            for c2 in ACC_CATS:
                for q2 in quantifiers:
                    nodes = [ConceptNode(c1, q1), ConceptNode(c2, q2)]
                    for t in reltypes:
                        graphs.append(ConceptualGraph(nodes, [GraphEdge(t, 0, 1)]))
    return graphs


def _graphs_random(rng, reltypes, count):
    quantifiers = [Quantifier.EVERY, Quantifier.MOST, Quantifier.SOME]
    out = []
    for _ in range(count):
        n = rng.randrange(3, 5)
        nodes = [ConceptNode(rng.choice(ACC_CATS), rng.choice(quantifiers))
                 for _ in range(n)]
        edges = [GraphEdge(rng.choice(reltypes), rng.randrange(i), i)
                 for i in range(1, n)]
        if rng.random() < 0.5:
            edges.append(GraphEdge(rng.choice(reltypes),
                                   rng.randrange(n), rng.randrange(n)))
        out.append(ConceptualGraph(nodes, edges))
    return out


def test_acceptance_projection_oracle():
    started = time.monotonic()
    kb = _six_category_kb()
    store = kb.store
    reltypes = [AGENT, seed_id("object")]
    disagreements = 0
    pairs = 0

    small = _graphs_exhaustive_two_nodes(reltypes)
    for a in small:
        for b in small:
            pairs += 1
            if (project(store, a, b) is not None) != project_oracle(store, a, b):
                disagreements += 1

    rng = random.Random(2024)
    big = _graphs_random(rng, reltypes, 100)
    for a in big:
        for b in big:
            pairs += 1
            if (project(store, a, b) is not None) != project_oracle(store, a, b):
                disagreements += 1

    assert disagreements == 0, f"{disagreements} of {pairs} pairs disagree"
    report(f"projection oracle agreement on {pairs} pairs", started, budget=60.0)


def test_acceptance_conflict_detection_oracle():
    started = time.monotonic()
    rng = random.Random(7)
    quantifiers = [Quantifier.EVERY, Quantifier.MOST, Quantifier.SOME]
    for trial in range(200):
        kb = KnowledgeBase("acc")
        kb.register_user("u")
        cats = []
        for i in range(4):
            parent = rng.choice(cats) if cats and rng.random() < 0.5 else "kb#entity"
            kb.add_category(f"u#c{i}", "u", [(SUBTYPE, parent)])
            cats.append(f"u#c{i}")

        def random_graph():
            n = rng.randrange(1, 4)
            nodes = [ConceptNode(rng.choice(cats), rng.choice(quantifiers))
                     for _ in range(n)]
            edges = [GraphEdge(AGENT, rng.randrange(i), i) for i in range(1, n)]
            return ConceptualGraph(nodes, edges, negated=rng.random() < 0.3)

        stored = []
        while len(stored) < rng.randrange(1, 11):
            g = random_graph()
            conn = (CORRECTIVE_RESTRICTION, stored[-1]) if stored and rng.random() < 0.3 \
                else (EXT_GEN, g.nodes[0].category)
            r = kb.propose_statement("u", g, connections=[conn])
            if r.statement_id is None:
                break
            stored.append(r.statement_id)

        probe = random_graph()
        got = {(c.object_id, c.kind.value) for c in detect_conflicts(kb.store, probe)}
        want = set()
        for sid in stored:
            kind = classify_pair_oracle(kb.store, probe, kb.store.statements[sid].graph)
            if kind:
                want.add((sid, kind))
        assert got == want, f"trial {trial}: {got} != {want}"
    report("conflict detection vs oracle on 200 random KBs", started, budget=120.0)


def test_acceptance_gate_audit():
    started = time.monotonic()
    kb = KnowledgeBase("acc")
    kb.register_user("seed_user")
    rng = random.Random(123)
    accepted = 0
    attempts = 0
    while accepted < 1000:
        attempts += 1
        assert attempts < 20_000, "op generator stalled"
        before = len(kb.records)
        try:
            random_local_op(kb, rng, str(attempts))
        except Exception:
            continue
        accepted += len(kb.records) - before
    failures = kb.store.audit_gate()
    assert failures == [], f"{len(failures)} unlinked statements"
    report(f"gate audit after {accepted} accepted operations", started)


def test_acceptance_replication_convergence():
    started = time.monotonic()
    for trial in range(100):
        cfg = SimulationConfig(seed=trial, peers=3, ops=14, rounds=10,
                               duplicate_rate=0.3)
        rep = simulate(cfg)
        assert rep.converged, f"trial {trial}: {rep.pair_equality}"

    # full permutation sweep: a 6-op script delivered in all 720 orders
    a = KnowledgeBase("A")
    b = KnowledgeBase("B")
    a.register_user("u1")
    a.add_category("u1#x", "u1", [(SUBTYPE, "kb#entity")])
    import coopkb.replication as repl
    repl.sync_pair(a, b)
    b.register_user("u2")
    b.propose_statement("u2", "a note", connections=[(EXT_GEN, "u1#x")])
    a.cast_vote("u1", "u1#x", Dimension.USEFULNESS, 0.5)
    b.cast_vote("u2", "u1#x", Dimension.USEFULNESS, -0.5)
    repl.sync_pair(a, b)
    ops = sorted(a.records.values(), key=lambda r: r.sort_key())
    assert len(ops) == 6
    reference = None
    for order in permutations(range(6)):
        fresh = KnowledgeBase("F")
        for idx in order:
            fresh.ingest([ops[idx].to_dict()])
        fp = state_fingerprint(fresh)
        reference = reference or fp
        assert fp == reference, f"order {order} diverged"
    report("replication convergence (100 trials + 720 delivery orders)",
           started, budget=120.0)


def _load_filter_corpus() -> tuple[KnowledgeBase, dict]:
    kb = KnowledgeBase("acc")
    spec_votes = json.loads((CORPUS / "filter/votes.json").read_text())
    for user in spec_votes["users"]:
        kb.register_user(user["name"], user["metadata"])
    for name, user in (("research_practices.fl", "prof"),
                       ("postdoc_additions.fl", "doc"),
                       ("student_additions.fl", "stud")):
        rep = kb.load_fl((CORPUS / "filter" / name).read_text(), user, file=name)
        assert not rep.diagnostics, rep.diagnostics
    from coopkb.model import statement_id_for
    for vote in spec_votes["votes"]:
        sid = statement_id_for(vote["text"], None)
        kb.cast_vote(vote["voter"], sid, vote["dimension"], vote["value"])
    return kb, spec_votes


def test_acceptance_filter_query():
    started = time.monotonic()
    kb, spec_votes = _load_filter_corpus()
    from coopkb.model import statement_id_for
    designated = {statement_id_for(t, None) for t in spec_votes["designated"]}
    criteria = FilterCriteria(
        min_scores={Dimension.USEFULNESS: 0.5},
        arguments_without_objections=True,
        creator_metadata={"degree": "PhD"},
    )
    got = set(filter_objects(kb.store, criteria))
    assert got == designated, f"{got} != {designated}"
    report("recommendation filter returns the designated set", started)


def test_acceptance_linter_taxonomy():
    started = time.monotonic()
    kb = KnowledgeBase("acc")
    for u in ("wfm", "pm", "s162557", "prof", "doc", "stud"):
        kb.register_user(u)
    clean_total = 0
    for path in sorted((CORPUS / "lint/clean").iterdir()):
        ds = lint_text(path.read_text(), kb.store,
                       html=path.suffix == ".html", file=path.name)
        clean_total += len(ds)
        assert ds == [], [d.format() for d in ds]
    classes = set()
    for path in sorted((CORPUS / "lint/errors").iterdir()):
        for d in lint_text(path.read_text(), kb.store, file=path.name):
            classes.add(d.cls)
    assert classes == {"lexical", "syntactic", "ontological", "indentation"}
    assert clean_total == 0
    report("linter covers all four diagnostic classes, clean corpus silent",
           started)


def test_acceptance_fl_roundtrip_and_crash_recovery(tmp_path):
    started = time.monotonic()
    # 500 random syntax trees survive serialize -> parse unchanged
    from hypothesis import given, settings
    from hypothesis import strategies as st

    seen = []

    @settings(max_examples=500, deadline=None, derandomize=True)
    @given(st.lists(description_strategy(), min_size=0, max_size=4))
    def run_case(trees):
        text = serialize(trees)
        assert [d.structure() for d in parse(text)] == \
            [d.structure() for d in trees]
        seen.append(1)

    run_case()
    assert len(seen) >= 500

    # crash recovery at every byte offset of a 50-op journal
    data = tmp_path / "srv"
    kb = KnowledgeBase("crash", data_dir=data)
    rng = random.Random(13)
    while len(kb.records) < 50:
        try:
            random_local_op(kb, rng, str(len(kb.records)))
        except Exception:
            continue
    kb.close()
    path = data / "journal.ndjson"
    blob = path.read_bytes()
    full_records = read_journal(path)
    assert len(full_records) == 50
    work = tmp_path / "probe.ndjson"
    for offset in range(len(blob) + 1):
        work.write_bytes(blob[:offset])
        recovered = read_journal(work)
        expected = blob[:offset].count(b"\n")
        assert len(recovered) == expected, f"offset {offset}"
        assert [r.to_dict() for r in recovered] == \
            [r.to_dict() for r in full_records[:expected]], f"offset {offset}"
    # booting from a truncated journal yields exactly the surviving prefix
    probe_dir = tmp_path / "boot"
    probe_dir.mkdir()
    (probe_dir / "meta.json").write_text(json.dumps({"server_id": "crash"}))
    for offset in (1, len(blob) // 3, len(blob) - 7, len(blob)):
        (probe_dir / "journal.ndjson").write_bytes(blob[:offset])
        booted = KnowledgeBase("ignored", data_dir=probe_dir)
        booted.close()
        prefix = rebuild(full_records[: blob[:offset].count(b"\n")])
        assert _store_fingerprint(booted.store) == _store_fingerprint(prefix)
    report("FL round trip (500 trees) + crash recovery at every offset",
           started)


def _store_fingerprint(store):
    kb = KnowledgeBase.__new__(KnowledgeBase)
    kb.store = store
    return state_fingerprint(kb)
