from __future__ import annotations

import random

import pytest

from coopkb import Dimension, KnowledgeBase
from coopkb.errors import AmbiguousName, UnknownObject
from coopkb.fl import parse
from coopkb.query import (
    consistent_subset,
    gen,
    object_detail,
    pairwise_inconsistent,
    resolve_name,
    run_query,
    search,
    spec,
)
from coopkb.seed import ROOT_ID, seed_id

from conftest import CORRECTIVE_RESTRICTION, EXT_GEN, SUBTYPE
from oracles import search_oracle


def test_spec_paris_chain_in_order(paris_kb):
    result = run_query(paris_kb.store, "spec pm#Paris")
    lines = [l.strip() for l in result.text.splitlines()]
    assert lines == ["pm#Paris", "pm#Paris_between_1950_and_1960", "pm#Paris_in_1951"]


def test_gen_paris_reverse(paris_kb):
    result = run_query(paris_kb.store, "gen pm#Paris_in_1951")
    lines = [l.strip() for l in result.text.splitlines()]
    assert lines == ["pm#Paris_in_1951", "pm#Paris_between_1950_and_1960", "pm#Paris"]


def test_gen_of_root_is_single_node(kb):
    result = gen(kb.store, ROOT_ID)
    assert result.data["tree"]["children"] == []


def test_spec_unknown(kb):
    with pytest.raises(UnknownObject):
        run_query(kb.store, "spec zz#missing")


def test_ambiguous_unprefixed_name(bird_kb):
    bird_kb.register_user("pm")
    bird_kb.add_category("pm#bird", "pm", [(SUBTYPE, "kb#entity")])
    with pytest.raises(AmbiguousName) as exc:
        resolve_name(bird_kb.store, "bird")
    assert set(exc.value.candidates) == {"pm#bird", "wn#bird"}
    # a unique unprefixed name resolves
    assert resolve_name(bird_kb.store, "sparrow") == "wn#sparrow"


def test_depth_limit(paris_kb):
    result = run_query(paris_kb.store, "spec pm#Paris 1")
    lines = [l.strip() for l in result.text.splitlines()]
    assert lines == ["pm#Paris", "pm#Paris_between_1950_and_1960"]


def test_gen_spec_duality_random():
    from coopkb.ontology import spec_tree
    rng = random.Random(3)
    for _ in range(15):
        kb = KnowledgeBase("q")
        kb.register_user("u")
        names = ["kb#entity"]
        for i in range(rng.randrange(2, 14)):
            name = f"u#n{i}"
            parents = rng.sample(names, k=min(len(names), rng.choice([1, 2])))
            kb.add_category(name, "u", [(SUBTYPE, p) for p in parents])
            names.append(name)
        for x in names:
            spec_ids = spec_tree(kb.store, x, include_seed=True).node_ids()
            for y in spec_ids:
                assert x in spec_tree(kb.store, y, reverse=True,
                                      include_seed=True).node_ids()


def test_gen_stops_at_seed_boundary(paris_kb):
    # the bootstrap ontology above a user object is not part of its view
    ids = _collect(gen(paris_kb.store, "pm#Paris_in_1951").data["tree"])
    assert ids == {"pm#Paris_in_1951", "pm#Paris_between_1950_and_1960", "pm#Paris"}
    # rooted at a seed object, seeds show
    assert "kb#thing" in _collect(gen(paris_kb.store, "kb#task").data["tree"])


def _collect(node_dict) -> set[str]:
    out = {node_dict["object"]}
    for child in node_dict["children"]:
        out |= _collect(child)
    return out


def test_search_hits_and_oracle(bird_kb):
    kb = bird_kb
    kb.propose_statement("john", "all birds sing", connections=[(EXT_GEN, "wn#bird")])
    g = kb.graph_from_fl("every wn#bird agent: wn#flight", "john")
    kb.propose_statement("john", g, connections=[(EXT_GEN, "wn#bird")])
    result = search(kb.store, "bird")
    got = set(result.data["objects"])
    assert got == search_oracle(kb.store, "bird")
    assert "wn#bird" in got
    assert any(o.startswith("s_") for o in got)


def test_search_empty_is_rejected(bird_kb):
    assert search(bird_kb.store, "").data["objects"] == []
    assert search(bird_kb.store, "   ").data["objects"] == []


def test_search_matches_informal_labels(kb):
    kb.register_user("u")
    kb.add_category("u#x1", "u", [(SUBTYPE, "kb#entity")],
                    informal_labels=["zephyr machine"])
    assert "u#x1" in search(kb.store, "zephyr").data["objects"]


def test_consistent_subset_excludes_negation(bird_kb):
    kb = bird_kb
    g = kb.graph_from_fl("every wn#bird agent: wn#flight", "john")
    pos = kb.propose_statement("john", g, connections=[(EXT_GEN, "wn#bird")])
    neg_graph = kb.graph_from_fl("every wn#bird agent: wn#flight", "joe", negated=True)
    neg = kb.propose_statement(
        "joe", neg_graph, connections=[(CORRECTIVE_RESTRICTION, pos.statement_id)])
    kb.register_user("v1")
    kb.cast_vote("v1", pos.statement_id, Dimension.USEFULNESS, 0.9)
    selected = consistent_subset(kb.store).data["objects"]
    assert pos.statement_id in selected
    assert neg.statement_id not in selected


def test_consistent_subset_conflict_free_returns_all_formal(bird_kb):
    kb = bird_kb
    g1 = kb.graph_from_fl("every wn#bird agent: wn#flight", "john")
    g2 = kb.graph_from_fl("every wn#sparrow agent: wn#flight", "john")
    r1 = kb.propose_statement("john", g1, connections=[(EXT_GEN, "wn#bird")])
    r2 = kb.propose_statement("john", g2, connections=[(EXT_GEN, "wn#sparrow")])
    kb.propose_statement("john", "an informal remark",
                         connections=[(EXT_GEN, "wn#bird")])
    selected = set(consistent_subset(kb.store).data["objects"])
    assert selected == {r1.statement_id, r2.statement_id}


def test_consistent_subset_pairwise_consistent_random():
    rng = random.Random(9)
    for _ in range(12):
        kb = KnowledgeBase("s")
        kb.register_user("u")
        kb.add_category("u#t", "u", [(SUBTYPE, "kb#entity")])
        stored = []
        for i in range(rng.randrange(2, 12)):
            negated = rng.random() < 0.4
            g = kb.graph_from_fl(
                rng.choice(["every u#t agent: kb#entity",
                            "most u#t agent: kb#entity",
                            "every u#t object: kb#entity"]),
                "u", negated=negated)
            conn = (CORRECTIVE_RESTRICTION, stored[-1]) if stored and negated \
                else (EXT_GEN, "u#t")
            r = kb.propose_statement("u", g, connections=[conn])
            if r.statement_id:
                stored.append(r.statement_id)
        selected = consistent_subset(kb.store).data["objects"]
        for i, a in enumerate(selected):
            for b in selected[i + 1:]:
                assert not pairwise_inconsistent(kb.store, a, b)


def test_rendering_reparses_as_fl(bird_kb):
    kb = bird_kb
    g = kb.graph_from_fl("every wn#bird agent: wn#flight", "john")
    kb.propose_statement("john", g, connections=[(EXT_GEN, "wn#bird")])
    kb.propose_statement("john", "birds have feathers",
                         connections=[(EXT_GEN, "wn#bird")])
    kb.add_relation("john", seed_id("annotation"), "wn#bird", "wn#flight")
    text = run_query(kb.store, "spec wn#bird +rel").text
    reparsed = parse(text)
    assert reparsed, text
    assert reparsed[0].head.text == "wn#bird"


def test_object_detail_fields(bird_kb):
    detail = object_detail(bird_kb.store, "wn#bird").data
    assert detail["creator"] == "wn"
    assert detail["kind"] == "concept"
    assert "usefulness" in detail["scores"]
    assert any(r["type"].endswith("#subtype") for r in detail["relations"])


def test_run_query_subset_dimension(bird_kb):
    result = run_query(bird_kb.store, "subset originality")
    assert result.kind == "objects"
