from __future__ import annotations

import random

import pytest

from coopkb import (
    AdmissionOutcome,
    ConceptNode,
    ConceptualGraph,
    ConflictKind,
    GraphEdge,
    KnowledgeBase,
    Quantifier,
)
from coopkb.errors import CycleDetected, SignatureViolation, UnknownObject, UnknownUser
from coopkb.protocol import detect_conflicts
from coopkb.query import object_detail
from coopkb.seed import seed_id

from conftest import AGENT, CORRECTIVE_RESTRICTION, EXT_GEN, OBJECTION, SUBTYPE
from oracles import classify_pair_oracle


def _bird_graph(kb, fl, user="john", negated=False):
    return kb.graph_from_fl(fl, user, negated=negated)


def test_bird_walkthrough(bird_kb):
    kb = bird_kb
    john_graph = _bird_graph(kb, "every wn#bird agent: wn#flight")
    john = kb.propose_statement("john", john_graph,
                                connections=[(EXT_GEN, "wn#bird")])
    assert john.outcome is AdmissionOutcome.ACCEPTED

    joe_graph = _bird_graph(kb, "most wn#healthy_french_bird can agent: wn#flight", "joe")
    rejected = kb.propose_statement("joe", joe_graph, connections=[])
    assert rejected.outcome is AdmissionOutcome.NEEDS_CONNECTION
    assert rejected.statement_id is None
    # nothing was stored by the rejected proposal
    assert len(kb.store.statements) == 1

    accepted = kb.propose_statement(
        "joe", joe_graph,
        connections=[(CORRECTIVE_RESTRICTION, john.statement_id)])
    assert accepted.outcome is AdmissionOutcome.ACCEPTED
    assert kb.store.statements[john.statement_id].creator == "john"
    assert kb.store.statements[accepted.statement_id].creator == "joe"
    assert kb.store.statements[john.statement_id].believers == {"john"}
    assert kb.store.statements[accepted.statement_id].believers == {"joe"}
    # the corrected statement is still there, loss-lessly
    detail = object_detail(kb.store, john.statement_id)
    assert detail.data["creator"] == "john"


def test_rejected_proposal_leaves_no_journal_trace(bird_kb):
    before = len(bird_kb.records)
    g = _bird_graph(bird_kb, "every wn#bird agent: wn#flight")
    bird_kb.propose_statement("john", g, connections=[])
    assert len(bird_kb.records) == before


def test_duplicate_proposal_suggests_belief(bird_kb):
    g = _bird_graph(bird_kb, "every wn#bird agent: wn#flight")
    first = bird_kb.propose_statement("john", g, connections=[(EXT_GEN, "wn#bird")])
    dup = bird_kb.propose_statement("joe", g, connections=[(EXT_GEN, "wn#bird")])
    assert dup.outcome is AdmissionOutcome.CONFLICT_DETECTED
    assert dup.conflicts[0].kind is ConflictKind.COMPLETE_REDUNDANCY
    assert "belief" in dup.required_action
    assert first.statement_id in dup.required_action


def test_detect_conflicts_identical(bird_kb):
    g = _bird_graph(bird_kb, "every wn#bird agent: wn#flight")
    bird_kb.propose_statement("john", g, connections=[(EXT_GEN, "wn#bird")])
    conflicts = detect_conflicts(bird_kb.store, g)
    assert [c.kind for c in conflicts] == [ConflictKind.COMPLETE_REDUNDANCY]


def test_detect_conflicts_partial(bird_kb):
    stored = _bird_graph(bird_kb, "every wn#sparrow agent: wn#flight")
    bird_kb.propose_statement("john", stored, connections=[(EXT_GEN, "wn#sparrow")])
    new = _bird_graph(bird_kb, "every wn#bird agent: wn#flight")
    conflicts = detect_conflicts(bird_kb.store, new)
    assert [c.kind for c in conflicts] == [ConflictKind.PARTIAL_REDUNDANCY]


def test_detect_conflicts_negation_inconsistency(bird_kb):
    stored = _bird_graph(bird_kb, "every wn#bird agent: wn#flight", negated=True)
    bird_kb.propose_statement("john", stored, connections=[(EXT_GEN, "wn#bird")])
    new = _bird_graph(bird_kb, "every wn#bird agent: wn#flight")
    conflicts = detect_conflicts(bird_kb.store, new)
    assert [c.kind for c in conflicts] == [ConflictKind.INCONSISTENCY]


def test_partial_redundancy_admits_with_warning(bird_kb):
    stored = _bird_graph(bird_kb, "every wn#sparrow agent: wn#flight")
    bird_kb.propose_statement("john", stored, connections=[(EXT_GEN, "wn#sparrow")])
    new = _bird_graph(bird_kb, "every wn#bird agent: wn#flight")
    result = bird_kb.propose_statement("john", new, connections=[(EXT_GEN, "wn#bird")])
    assert result.outcome is AdmissionOutcome.ACCEPTED
    assert [c.kind for c in result.conflicts] == [ConflictKind.PARTIAL_REDUNDANCY]


def test_inconsistency_admitted_with_corrective_cover(bird_kb):
    stored = _bird_graph(bird_kb, "every wn#bird agent: wn#flight")
    first = bird_kb.propose_statement("john", stored, connections=[(EXT_GEN, "wn#bird")])
    negated = _bird_graph(bird_kb, "every wn#bird agent: wn#flight", "joe", negated=True)
    blocked = bird_kb.propose_statement("joe", negated,
                                        connections=[(EXT_GEN, "wn#bird")])
    assert blocked.outcome is AdmissionOutcome.CONFLICT_DETECTED
    covered = bird_kb.propose_statement(
        "joe", negated, connections=[(CORRECTIVE_RESTRICTION, first.statement_id)])
    assert covered.outcome is AdmissionOutcome.ACCEPTED


def test_unknown_user_and_dangling_connection(bird_kb):
    g = _bird_graph(bird_kb, "every wn#bird agent: wn#flight")
    with pytest.raises(UnknownUser):
        bird_kb.propose_statement("nobody", g, connections=[(EXT_GEN, "wn#bird")])
    with pytest.raises(UnknownObject):
        bird_kb.propose_statement("john", g, connections=[(EXT_GEN, "zz#gone")])


def test_add_belief_provenance_roundtrip(bird_kb):
    g = _bird_graph(bird_kb, "every wn#bird agent: wn#flight")
    r = bird_kb.propose_statement("john", g, connections=[(EXT_GEN, "wn#bird")])
    bird_kb.add_belief("joe", r.statement_id)
    detail = object_detail(bird_kb.store, r.statement_id).data
    assert detail["creator"] == "john"
    assert detail["believers"] == ["joe", "john"]


def test_add_relation_objection_creator_recorded(bird_kb):
    g1 = _bird_graph(bird_kb, "every wn#bird agent: wn#flight")
    a = bird_kb.propose_statement("john", g1, connections=[(EXT_GEN, "wn#bird")])
    b = bird_kb.propose_statement("joe", "but penguins do not fly",
                                  connections=[(CORRECTIVE_RESTRICTION, a.statement_id)])
    rel = bird_kb.add_relation("joe", OBJECTION, a.statement_id, b.statement_id)
    assert rel.creator == "joe"
    assert rel.believers == {"joe"}


def test_add_relation_signature_violation(bird_kb):
    with pytest.raises(SignatureViolation):
        bird_kb.add_relation("wn", OBJECTION, "wn#bird", "wn#flight")


def test_add_relation_subtask_cycle(kb):
    kb.register_user("wfm")
    subtask = seed_id("subtask")
    kb.add_category("wfm#t1", "wfm", [(SUBTYPE, "kb#task")])
    kb.add_category("wfm#t2", "wfm", [(SUBTYPE, "kb#task")])
    kb.add_relation("wfm", subtask, "wfm#t1", "wfm#t2")
    with pytest.raises(CycleDetected):
        kb.add_relation("wfm", subtask, "wfm#t2", "wfm#t1")


def test_url_relation_allowed(kb):
    kb.register_user("wfm")
    kb.add_category("wfm#t1", "wfm", [(SUBTYPE, "kb#task")])
    r = kb.propose_statement("wfm", "http://example.org/howto",
                             connections=[(EXT_GEN, "wfm#t1")])
    rel = kb.add_relation("wfm", seed_id("url"), "wfm#t1", r.statement_id)
    assert rel.type == seed_id("url")


def test_gate_audit_clean_after_operations(bird_kb):
    g = _bird_graph(bird_kb, "every wn#bird agent: wn#flight")
    bird_kb.propose_statement("john", g, connections=[(EXT_GEN, "wn#bird")])
    bird_kb.propose_statement("joe", "birds are neat",
                              connections=[(EXT_GEN, "wn#bird")])
    assert bird_kb.store.audit_gate() == []


def test_conflict_detection_matches_oracle_random():
    rng = random.Random(11)
    for trial in range(25):
        kb = KnowledgeBase("c")
        kb.register_user("u")
        cats = []
        for i in range(4):
            name = f"u#c{i}"
            parent = rng.choice(cats) if cats and rng.random() < 0.5 else "kb#entity"
            kb.add_category(name, "u", [(SUBTYPE, parent)])
            cats.append(name)

        def random_graph():
            n = rng.randrange(1, 4)
            nodes = [ConceptNode(rng.choice(cats),
                                 rng.choice(list(Quantifier)[:3]))
                     for _ in range(n)]
            edges = [GraphEdge(AGENT, rng.randrange(i), i) for i in range(1, n)]
            return ConceptualGraph(nodes, edges, negated=rng.random() < 0.3)

        stored = []
        for _ in range(rng.randrange(1, 8)):
            g = random_graph()
            r = kb.propose_statement(
                "u", g, connections=[(CORRECTIVE_RESTRICTION, stored[-1])
                                     if stored and rng.random() < 0.3
                                     else (EXT_GEN, g.nodes[0].category)])
            if r.statement_id:
                stored.append(r.statement_id)

        probe = random_graph()
        got = {(c.object_id, c.kind.value)
               for c in detect_conflicts(kb.store, probe)}
        want = set()
        for sid in stored:
            stmt = kb.store.statements[sid]
            kind = classify_pair_oracle(kb.store, probe, stmt.graph)
            if kind:
                want.add((sid, kind))
        assert got == want, f"trial {trial}"
