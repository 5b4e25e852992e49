"""Anti-entropy sync between replicas, plus a deterministic simulator.

A sync round is digest/delta: the initiator sends its version vector, the
responder answers with every record above it, and symmetrically. Because
the journal is a grow-only set replayed in a fixed total order, ingest is
idempotent and commutative; convergence needs nothing smarter than
eventually exchanging digests along a connected schedule, and duplicated
or re-ordered deliveries are harmless.

The simulator drives N in-process replicas through a seeded random op
script and gossip schedule (with optional message drop/duplication) and
reports whether all pairs converged.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .kb import KnowledgeBase
from .model import Dimension, Quantifier
from .query import spec
from .seed import ROOT_ID, seed_id


def sync_pair(a: KnowledgeBase, b: KnowledgeBase) -> int:
    """One full bidirectional exchange; returns records transferred."""
    delta_for_b = a.delta_for(b.digest()["vector"])
    b.ingest(delta_for_b["records"])
    delta_for_a = b.delta_for(a.digest()["vector"])
    a.ingest(delta_for_a["records"])
    return len(delta_for_b["records"]) + len(delta_for_a["records"])


def stores_equal(a: KnowledgeBase, b: KnowledgeBase) -> bool:
    return state_fingerprint(a) == state_fingerprint(b)


def state_fingerprint(kb: KnowledgeBase) -> tuple:
    """Observable state, order-insensitively."""
    s = kb.store
    return (
        tuple(sorted((u.name, tuple(sorted(u.metadata.items())))
                     for u in s.users.values())),
        tuple(sorted((cid, c.creator, c.kind.value) for cid, c in s.categories.items())),
        tuple(sorted((sid, st.creator, st.informal or st.graph.canonical_key(),
                      tuple(sorted(st.believers)))
                     for sid, st in s.statements.items())),
        tuple(sorted((r.id, r.type, r.src, r.dst, r.creator,
                      tuple(sorted(r.believers)))
                     for r in s.relations.values())),
        tuple(sorted((k, slot.value) for k, slot in s.votes.items())),
    )


@dataclass
class SimulationConfig:
    seed: int = 0
    peers: int = 3
    ops: int = 30
    rounds: int = 40
    drop_rate: float = 0.0
    duplicate_rate: float = 0.0

    @staticmethod
    def from_dict(d: dict) -> "SimulationConfig":
        return SimulationConfig(
            seed=int(d.get("seed", 0)),
            peers=int(d.get("peers", 3)),
            ops=int(d.get("ops", 30)),
            rounds=int(d.get("rounds", 40)),
            drop_rate=float(d.get("drop_rate", 0.0)),
            duplicate_rate=float(d.get("duplicate_rate", 0.0)),
        )


@dataclass
class SimulationReport:
    converged: bool
    peers: int
    rounds_run: int
    messages: int
    records_transferred: int
    pair_equality: dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "peers": self.peers,
            "rounds_run": self.rounds_run,
            "messages": self.messages,
            "records_transferred": self.records_transferred,
            "pair_equality": dict(self.pair_equality),
        }


def random_local_op(kb: KnowledgeBase, rng: random.Random, tag: str) -> None:
    """One random accepted mutation; generation never fails the gate."""
    users = [u for u in kb.store.users if u != "kb"]
    if not users or rng.random() < 0.15:
        name = f"u{tag}_{rng.randrange(10_000)}"
        if name not in kb.store.users:
            kb.register_user(name, {"degree": rng.choice(["PhD", "MSc"])})
        return
    user = rng.choice(users)
    roll = rng.random()
    non_seed_cats = [c for c in kb.store.categories
                     if c not in kb.store.seed_ids]
    if roll < 0.35:
        parents = non_seed_cats + [ROOT_ID, seed_id("process")]
        name = f"{user}#c{tag}_{rng.randrange(100_000)}"
        if name not in kb.store.categories:
            kb.add_category(name, user, [(seed_id("subtype"), rng.choice(parents))])
    elif roll < 0.65 and non_seed_cats:
        cat = rng.choice(non_seed_cats)
        body = _tiny_graph(cat, rng)
        existing = list(kb.store.statements)
        connection_target = rng.choice(existing) if existing and rng.random() < 0.4 else cat
        kb.propose_statement(user, body,
                             connections=[(seed_id("extended_generalization"),
                                           connection_target)])
    elif roll < 0.8 and kb.store.statements:
        sid = rng.choice(sorted(kb.store.statements))
        kb.add_belief(user, sid)
    elif kb.store.statements or non_seed_cats:
        pool = sorted(kb.store.statements) + non_seed_cats
        kb.cast_vote(user, rng.choice(pool),
                     rng.choice(list(Dimension)),
                     round(rng.uniform(-1, 1), 3))


def _tiny_graph(cat: str, rng: random.Random):
    from .model import ConceptNode, ConceptualGraph, GraphEdge
    quantifier = rng.choice([Quantifier.EVERY, Quantifier.MOST, Quantifier.SOME])
    nodes = [ConceptNode(cat, quantifier)]
    edges = []
    if rng.random() < 0.5:
        nodes.append(ConceptNode(ROOT_ID, Quantifier.SOME))
        edges.append(GraphEdge(seed_id("agent"), 0, 1))
    return ConceptualGraph(nodes, edges, negated=rng.random() < 0.1)


def simulate(config: SimulationConfig) -> SimulationReport:
    rng = random.Random(config.seed)
    peers = [KnowledgeBase(f"srv{i}") for i in range(config.peers)]
    for i, kb in enumerate(peers):
        kb.register_user(f"op{i}")

    for n in range(config.ops):
        kb = rng.choice(peers)
        try:
            random_local_op(kb, rng, str(n))
        except Exception:  # noqa: BLE001 - random collisions are fine to skip
            continue

    messages = 0
    transferred = 0
    rounds = 0
    for rounds in range(1, config.rounds + 1):
        a, b = rng.sample(range(len(peers)), 2) if len(peers) > 1 else (0, 0)
        deliveries = 1
        if rng.random() < config.duplicate_rate:
            deliveries += 1
        if rng.random() < config.drop_rate:
            deliveries = 0
        for _ in range(deliveries):
            messages += 2
            transferred += sync_pair(peers[a], peers[b])
        if _all_equal(peers) and rounds >= len(peers):
            break
    # Quiescence: close the loop deterministically so every pair has met.
    for i in range(len(peers)):
        for j in range(i + 1, len(peers)):
            messages += 2
            transferred += sync_pair(peers[i], peers[j])

    equality = {}
    for i in range(len(peers)):
        for j in range(i + 1, len(peers)):
            equality[f"{peers[i].server_id}~{peers[j].server_id}"] = \
                stores_equal(peers[i], peers[j])
    converged = all(equality.values()) if equality else True
    if peers:
        # exercising queries on the converged state keeps the report honest
        spec(peers[0].store, ROOT_ID, 1)
    return SimulationReport(converged, len(peers), rounds, messages,
                            transferred, equality)


def _all_equal(peers: list[KnowledgeBase]) -> bool:
    if len(peers) < 2:
        return True
    first = state_fingerprint(peers[0])
    return all(state_fingerprint(p) == first for p in peers[1:])
