"""The knowledge-base server core.

One ``KnowledgeBase`` is one replica: it owns a store, an append-only
journal of operation records, a Lamport clock and a version vector. Local
mutations are validated against the current store, journaled, then applied;
records from peers are merged by set union and the store is rebuilt in the
records' deterministic total order, so replicas converge no matter who
talked to whom first.

Mutations are serialized through one writer lock; queries read the live
store, whose admitted objects never change (believer sets only grow).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from . import journal as journal_mod
from .errors import (
    BadIdentifier,
    CorruptSnapshot,
    DuplicateId,
    DuplicateUser,
    InvalidPayload,
    MalformedRecord,
    NoAttachment,
    SignatureViolation,
    UnknownObject,
    UnknownUser,
)
from .fl.ast import FlDescription, NodeRef
from .fl.html import document_from_text, parse_document
from .model import (
    ATTACHMENT_FAMILIES,
    GATE_FAMILIES,
    Category,
    CategoryId,
    CategoryKind,
    ConceptNode,
    ConceptualGraph,
    Dimension,
    GraphEdge,
    Modality,
    OperationRecord,
    Quantifier,
    RelationInstance,
    Source,
    Statement,
    make_relation,
    statement_id_for,
    validate_user_name,
)
from .ontology import ensure_acyclic
from .protocol import AdmissionOutcome, AdmissionResult, admission_decision
from .seed import seed_id
from .store import Store, rebuild
from .valuation import validate_vote

EXT_GEN = seed_id("extended_generalization")
SPECIALIZATION = seed_id("specialization")


@dataclass
class LoadReport:
    categories: int = 0
    statements: int = 0
    relations: int = 0
    beliefs: int = 0
    skipped: int = 0
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "categories": self.categories,
            "statements": self.statements,
            "relations": self.relations,
            "beliefs": self.beliefs,
            "skipped": self.skipped,
            "diagnostics": list(self.diagnostics),
        }


class KnowledgeBase:
    def __init__(self, server_id: str = "local", data_dir: str | Path | None = None):
        self.server_id = server_id
        self.store = Store()
        self.records: dict[tuple[str, int], OperationRecord] = {}
        self.vector: dict[str, int] = {}
        self.clock = 0
        self._pending: dict[tuple[str, int], OperationRecord] = {}
        self._lock = threading.RLock()
        self._writer: journal_mod.JournalWriter | None = None
        if data_dir is not None:
            self._open_data_dir(Path(data_dir))

    # -- persistence ---------------------------------------------------

    def _open_data_dir(self, data_dir: Path) -> None:
        data_dir.mkdir(parents=True, exist_ok=True)
        meta_path = data_dir / "meta.json"
        if meta_path.exists():
            meta = json.loads(meta_path.read_text())
            self.server_id = meta["server_id"]
        else:
            meta_path.write_text(json.dumps({"server_id": self.server_id}))
        journal_path = data_dir / journal_mod.JOURNAL_NAME
        for rec in journal_mod.read_journal(journal_path):
            self._absorb(rec)
        self._drain_pending(persist=False)
        self.store = rebuild(list(self.records.values()))
        self._writer = journal_mod.JournalWriter(journal_path)

    @property
    def journal_position(self) -> int:
        return len(self.records)

    def close(self) -> None:
        if self._writer is not None:
            self._writer.close()
            self._writer = None

    # -- local mutation plumbing ----------------------------------------

    def _next_record(self, payload: dict) -> OperationRecord:
        self.clock += 1
        seq = self.vector.get(self.server_id, 0) + 1
        return OperationRecord(self.server_id, seq, self.clock, payload)

    def _commit(self, payload: dict) -> OperationRecord:
        """Journal and apply one locally validated payload."""
        rec = self._next_record(payload)
        self.store.apply(rec, strict=True)
        self.records[rec.op_id] = rec
        self.vector[self.server_id] = rec.seq
        if self._writer is not None:
            self._writer.append(rec)
        return rec

    # -- operations ------------------------------------------------------

    def register_user(self, name: str, metadata: dict[str, str] | None = None) -> str:
        with self._lock:
            validate_user_name(name)
            if name in self.store.users:
                raise DuplicateUser(f"user {name!r} already registered")
            self._commit({"kind": "add_user",
                          "user": {"name": name, "metadata": metadata or {}}})
            return name

    def add_category(self, rendered_id: str, creator: str,
                     attachments: list[tuple[str, str]],
                     kind: CategoryKind | str = CategoryKind.CONCEPT,
                     informal_labels: list[str] | None = None) -> Category:
        with self._lock:
            kind = CategoryKind(kind)
            cid = CategoryId.parse(rendered_id)
            if creator not in self.store.users:
                raise UnknownUser(f"unknown user {creator!r}")
            if cid.prefix != creator:
                raise BadIdentifier(
                    f"category prefix {cid.prefix!r} must be its creator {creator!r}")
            if rendered_id in self.store.categories:
                raise DuplicateId(f"category {rendered_id} already exists")
            if not attachments:
                raise NoAttachment(
                    f"new category {rendered_id} needs at least one "
                    f"specialization-family attachment")
            rels = []
            for type_id, parent in attachments:
                self._require_relation_type(type_id)
                if self.store.family_of(type_id) not in ATTACHMENT_FAMILIES:
                    raise SignatureViolation(
                        f"attachment type {type_id} is not in the specialization "
                        f"or part families")
                if not self.store.object_exists(parent):
                    raise UnknownObject(f"attachment parent {parent} does not exist")
                rel = make_relation(type_id, parent, rendered_id, creator)
                ensure_acyclic(self.store, rel)
                rels.append(rel)
            cat = Category(cid, creator, kind,
                           informal_labels=list(informal_labels or []))
            self._commit({
                "kind": "add_category",
                "category": cat.to_dict(),
                "attachments": [r.to_dict() for r in rels],
            })
            return self.store.categories[rendered_id]

    def propose_statement(self, user: str, body: ConceptualGraph | str,
                          source: Source | None = None,
                          connections: list[tuple[str, str]] | None = None
                          ) -> AdmissionResult:
        with self._lock:
            connections = connections or []
            if user not in self.store.users:
                raise UnknownUser(f"unknown user {user!r}")
            for type_id, obj in connections:
                self._require_relation_type(type_id)
                if not self.store.object_exists(obj):
                    raise UnknownObject(f"connection endpoint {obj} does not exist")
            if isinstance(body, ConceptualGraph):
                body.validate()
                self._check_graph_references(body)
            result = admission_decision(self.store, body, connections)
            if result.outcome is not AdmissionOutcome.ACCEPTED:
                return result
            stmt = self._build_statement(user, body, source)
            rels = [make_relation(t, obj, stmt.id, user) for t, obj in connections]
            for rel in rels:
                self._check_signature(rel)
            self._commit({
                "kind": "add_statement",
                "statement": stmt.to_dict(),
                "connections": [r.to_dict() for r in rels],
            })
            result.statement_id = stmt.id
            result.relation_ids = [r.id for r in rels]
            return result

    def add_relation(self, user: str, type_id: str, src: str, dst: str,
                     modality: Modality = Modality.MAY,
                     cardinality: str = "one-or-many") -> RelationInstance:
        with self._lock:
            if user not in self.store.users:
                raise UnknownUser(f"unknown user {user!r}")
            self._require_relation_type(type_id)
            for end in (src, dst):
                if not self.store.object_exists(end):
                    raise UnknownObject(f"relation endpoint {end} does not exist")
            rel = make_relation(type_id, src, dst, user, modality, cardinality)
            self._check_signature(rel)
            ensure_acyclic(self.store, rel)
            if rel.id in self.store.relations:
                return self.store.relations[rel.id]
            self._commit({"kind": "add_relation", "relation": rel.to_dict()})
            return self.store.relations[rel.id]

    def add_belief(self, user: str, object_id: str) -> set[str]:
        with self._lock:
            if user not in self.store.users:
                raise UnknownUser(f"unknown user {user!r}")
            target = self.store.statements.get(object_id) \
                or self.store.relations.get(object_id)
            if target is None:
                raise UnknownObject(f"no statement or relation {object_id}")
            if user not in target.believers:
                self._commit({"kind": "add_belief", "user": user, "object": object_id})
            return set(target.believers)

    def cast_vote(self, voter: str, object_id: str, dimension: Dimension | str,
                  value: float):
        with self._lock:
            vote = validate_vote(self.store, voter, object_id,
                                 Dimension(dimension), value)
            self._commit({"kind": "cast_vote", "vote": vote.to_dict()})
            return vote

    def apply_operation(self, rec: OperationRecord) -> bool:
        """Apply one foreign record; duplicates are a successful no-op.

        Raises ``InvalidPayload`` when the record cannot take effect yet,
        either because it references unknown objects or because earlier
        records from its origin are still missing.
        """
        with self._lock:
            if rec.op_id in self.records:
                return False
            self.ingest([rec])
            skipped = {op_id for op_id, _ in self.store.skipped}
            if rec.op_id not in self.records or rec.op_id in skipped:
                raise InvalidPayload(
                    f"record {rec.op_id} did not take effect (missing references "
                    f"or an operation gap)")
            return True

    # -- snapshots -------------------------------------------------------

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "server_id": self.server_id,
                "clock": self.clock,
                "vector": dict(self.vector),
                "records": [rec.to_dict() for rec in
                            sorted(self.records.values(),
                                   key=OperationRecord.sort_key)],
            }

    @classmethod
    def restore(cls, snap: dict, data_dir: str | Path | None = None) -> "KnowledgeBase":
        try:
            kb = cls(snap["server_id"], data_dir)
            records = [OperationRecord.from_dict(d) for d in snap["records"]]
            kb.ingest(records)
            kb.clock = max(kb.clock, int(snap["clock"]))
        except (KeyError, TypeError, ValueError, MalformedRecord) as exc:
            raise CorruptSnapshot(f"snapshot is not usable: {exc}") from exc
        return kb

    # -- replication -----------------------------------------------------

    def digest(self) -> dict:
        with self._lock:
            return {"kind": "digest", "server_id": self.server_id,
                    "vector": dict(self.vector)}

    def delta_for(self, remote_vector: dict[str, int]) -> dict:
        """Records the remote's vector does not cover."""
        with self._lock:
            missing = [
                rec.to_dict()
                for rec in sorted(self.records.values(), key=OperationRecord.sort_key)
                if rec.seq > int(remote_vector.get(rec.server_id, 0))
            ]
            return {"kind": "delta", "server_id": self.server_id, "records": missing}

    def ingest(self, record_dicts: list[dict]) -> dict:
        """Union incoming records into the journal and rebuild the store.

        Malformed records are quarantined; records ahead of a per-origin
        gap wait in a pending pool until the gap closes. Idempotent and
        commutative: the final state depends only on the record set.
        """
        with self._lock:
            quarantined = 0
            for d in record_dicts:
                try:
                    rec = d if isinstance(d, OperationRecord) else OperationRecord.from_dict(d)
                except MalformedRecord:
                    quarantined += 1
                    continue
                self._absorb(rec)
            added = self._drain_pending(persist=True)
            if added:
                self.store = rebuild(list(self.records.values()))
            return {"added": added, "quarantined": quarantined,
                    "pending": len(self._pending)}

    def _absorb(self, rec: OperationRecord) -> None:
        if rec.op_id not in self.records:
            self._pending.setdefault(rec.op_id, rec)
        self.clock = max(self.clock, rec.logical_time)

    def _drain_pending(self, persist: bool) -> int:
        added = 0
        progress = True
        while progress:
            progress = False
            for op_id in sorted(self._pending):
                origin, seq = op_id
                if seq == self.vector.get(origin, 0) + 1:
                    rec = self._pending.pop(op_id)
                    self.records[op_id] = rec
                    self.vector[origin] = seq
                    if persist and self._writer is not None:
                        self._writer.append(rec)
                    added += 1
                    progress = True
        return added

    # -- FL loading --------------------------------------------------------

    def load_fl(self, text: str, as_user: str, html: bool = False,
                file: str = "<input>") -> LoadReport:
        """Admit the descriptions of an FL document, one transaction each.

        A description that fails to validate is reported in the returned
        diagnostics and skipped; the rest of the file still loads.
        """
        with self._lock:
            if as_user not in self.store.users:
                raise UnknownUser(f"unknown user {as_user!r}")
            report = LoadReport()
            doc = document_from_text(text, html)
            for exc in parse_document(doc, tolerant=True):
                report.diagnostics.append(f"{file}:{exc.line}:{exc.col}: {exc.detail}")
                report.skipped += 1
            for part in doc.formal_parts():
                creator = part.creator or as_user
                if creator not in self.store.users:
                    report.diagnostics.append(
                        f"{file}: @creator {creator} is not a registered user")
                    creator = as_user
                for desc in part.descriptions:
                    self._load_description(desc, None, creator, report, file)
            return report

    def _load_description(self, desc: FlDescription, parent: str | None,
                          creator: str, report: LoadReport, file: str) -> None:
        try:
            head_id = self._admit_description(desc, parent, creator, report)
        except Exception as exc:  # noqa: BLE001 - every failure skips one description
            report.skipped += 1
            report.diagnostics.append(
                f"{file}:{desc.line}: description {desc.head.text!r} skipped: {exc}")
            head_id = None
        if head_id is not None:
            for child in desc.children:
                self._load_description(child, head_id, creator, report, file)
        else:
            report.skipped += sum(1 for _ in _iter_descendants(desc))

    def _admit_description(self, desc: FlDescription, parent: str | None,
                           creator: str, report: LoadReport) -> str:
        desc_creator = desc.head.creator or creator
        if desc_creator not in self.store.users:
            raise UnknownUser(f"unknown creator {desc_creator!r}")
        if desc.head.quoted or desc.head.quantifier is not None:
            return self._admit_statement_description(desc, parent, desc_creator, report)
        return self._admit_category_description(desc, parent, desc_creator, report)

    def _admit_category_description(self, desc: FlDescription, parent: str | None,
                                    creator: str, report: LoadReport) -> str:
        head_id = self._resolve_category_ref(desc.head, creator)
        plan = _Plan(self)
        if head_id not in self.store.categories:
            if parent is None:
                raise NoAttachment(
                    f"{head_id} is new and has no parent to attach under")
            plan.new_category(head_id, _prefix_of(head_id), [(SPECIALIZATION, parent)],
                              relation_creator=creator)
        elif parent is not None:
            plan.new_relation(SPECIALIZATION, parent, head_id, creator)

        for block in desc.blocks:
            type_id = self._resolve_relation_name(block.relation)
            block_creator = block.creator or creator
            family = self.store.family_of(type_id)
            for target in block.targets:
                target_creator = target.creator or block_creator
                if target_creator not in self.store.users:
                    raise UnknownUser(f"unknown creator {target_creator!r}")
                if target.quoted:
                    stmt_id = plan.new_informal(target.text, target_creator, head_id,
                                                gate_covered=family in GATE_FAMILIES)
                    plan.new_relation(type_id, head_id, stmt_id, target_creator,
                                      modality=block.modality)
                else:
                    target_id = self._resolve_category_ref(target, creator)
                    known = target_id in self.store.categories or plan.knows(target_id)
                    if not known:
                        if family in ATTACHMENT_FAMILIES:
                            plan.new_category(target_id, _prefix_of(target_id),
                                              [(type_id, head_id)],
                                              relation_creator=target_creator,
                                              modality=block.modality)
                            continue
                        raise UnknownObject(
                            f"target {target_id} does not exist and "
                            f"{block.relation} cannot create it")
                    plan.new_relation(type_id, head_id, target_id, target_creator,
                                      modality=block.modality)
        plan.commit(report)
        return head_id

    def _admit_statement_description(self, desc: FlDescription, parent: str | None,
                                     creator: str, report: LoadReport) -> str:
        anchor = parent
        if desc.head.quoted:
            body: ConceptualGraph | str = desc.head.text
        else:
            body = self._graph_from_description(desc, creator, report)
            anchor = anchor or self._resolve_category_ref(desc.head, creator)
        stmt_id = statement_id_for(body if isinstance(body, str) else None,
                                   body if isinstance(body, ConceptualGraph) else None)
        if stmt_id in self.store.statements:
            self.add_belief(creator, stmt_id)
            report.beliefs += 1
        else:
            if anchor is None:
                raise NoAttachment(
                    "a statement at the top of a file needs an indentation parent "
                    "or a formal head naming its anchor category")
            result = self.propose_statement(creator, body,
                                            connections=[(EXT_GEN, anchor)])
            if result.outcome is not AdmissionOutcome.ACCEPTED:
                raise InvalidPayload(result.required_action)
            report.statements += 1
            report.relations += len(result.relation_ids)
            if result.conflicts:
                report.diagnostics.append(
                    f"warning: {stmt_id} admitted with partial redundancy against "
                    + ", ".join(c.object_id for c in result.conflicts))
        if desc.head.quoted:
            for block in desc.blocks:
                type_id = self._resolve_relation_name(block.relation)
                block_creator = block.creator or creator
                plan = _Plan(self)
                for target in block.targets:
                    target_creator = target.creator or block_creator
                    if target.quoted:
                        tid = plan.new_informal(target.text, target_creator, stmt_id,
                                                gate_covered=self.store.family_of(type_id)
                                                in GATE_FAMILIES)
                    else:
                        tid = self._resolve_category_ref(target, creator)
                        if tid not in self.store.categories:
                            raise UnknownObject(f"target {tid} does not exist")
                    plan.new_relation(type_id, stmt_id, tid, target_creator,
                                      modality=block.modality)
                plan.commit(report)
        return stmt_id

    def _graph_from_description(self, desc: FlDescription, creator: str,
                                report: LoadReport) -> ConceptualGraph:
        head_cat = self._resolve_category_ref(desc.head, creator)
        self._require_category(head_cat)
        modality = next((b.modality for b in desc.blocks if b.modality), None)
        if desc.head.quantifier:
            head_q = Quantifier(desc.head.quantifier)
        elif self.store.categories[head_cat].kind is CategoryKind.INDIVIDUAL:
            head_q = Quantifier.INDIVIDUAL
        else:
            head_q = Quantifier.EVERY
        nodes = [ConceptNode(head_cat, head_q,
                             Modality(modality) if modality else None)]
        edges: list[GraphEdge] = []
        for block in desc.blocks:
            type_id = self._resolve_relation_name(block.relation)
            for target in block.targets:
                if target.quoted:
                    stmt_id = statement_id_for(target.text, None)
                    if stmt_id not in self.store.statements:
                        plan = _Plan(self)
                        plan.new_informal(target.text, target.creator or creator,
                                          head_cat, gate_covered=False)
                        plan.commit(report)
                    edges.append(GraphEdge(type_id, 0, stmt_id))
                else:
                    cat = self._resolve_category_ref(target, creator)
                    self._require_category(cat)
                    nodes.append(ConceptNode(cat, self._target_quantifier(target, cat)))
                    edges.append(GraphEdge(type_id, 0, len(nodes) - 1))
        return ConceptualGraph(nodes, edges)

    def graph_from_fl(self, text: str, creator: str, negated: bool = False
                      ) -> ConceptualGraph:
        """One FL description parsed into a conceptual graph body."""
        from .fl.parser import parse
        descriptions = parse(text)
        if len(descriptions) != 1:
            raise InvalidPayload("expected exactly one description")
        report = LoadReport()
        graph = self._graph_from_description(descriptions[0], creator, report)
        graph.negated = negated
        return graph

    # -- shared resolution helpers ---------------------------------------

    def _resolve_category_ref(self, node: NodeRef, default_creator: str) -> str:
        if "#" in node.text:
            return node.text
        return f"{default_creator}#{node.text}"

    def _resolve_relation_name(self, name: str) -> str:
        if "#" in name:
            self._require_relation_type(name)
            return name
        candidates = sorted(
            cid for cid, cat in self.store.categories.items()
            if cat.kind is CategoryKind.RELATION and cat.id.name == name)
        if not candidates:
            raise UnknownObject(f"unknown relation type {name!r}")
        if len(candidates) > 1:
            raise InvalidPayload(
                f"ambiguous relation name {name!r}: " + ", ".join(candidates))
        return candidates[0]

    def _require_relation_type(self, type_id: str) -> None:
        cat = self.store.categories.get(type_id)
        if cat is None or cat.kind is not CategoryKind.RELATION:
            raise UnknownObject(f"{type_id} is not a relation type")

    def _require_category(self, rendered_id: str) -> None:
        if rendered_id not in self.store.categories:
            raise UnknownObject(f"unknown category {rendered_id}")

    def _target_quantifier(self, target: NodeRef, cat_id: str) -> Quantifier:
        if target.quantifier:
            return Quantifier(target.quantifier)
        cat = self.store.categories.get(cat_id)
        if cat is not None and cat.kind is CategoryKind.INDIVIDUAL:
            return Quantifier.INDIVIDUAL
        return Quantifier.SOME

    def _check_graph_references(self, graph: ConceptualGraph) -> None:
        for node in graph.nodes:
            self._require_category(node.category)
        for edge in graph.edges:
            self._require_relation_type(edge.type)
            for end in (edge.src, edge.dst):
                if isinstance(end, str) and end not in self.store.statements:
                    raise UnknownObject(f"edge references unknown statement {end}")

    def _check_signature(self, rel: RelationInstance) -> None:
        signature = self.store.relation_traits(rel.type)[2]
        for end, expected in ((rel.src, signature[0]), (rel.dst, signature[1])):
            if expected == "any":
                continue
            actual = self.store.object_kind(end) or "statement"
            if actual != expected:
                raise SignatureViolation(
                    f"{rel.type} expects a {expected} endpoint, {end} is a {actual}")

    def _build_statement(self, user: str, body: ConceptualGraph | str,
                         source: Source | None) -> Statement:
        source = source or Source("user", user)
        if source.kind == "user" and source.label not in self.store.users:
            raise UnknownUser(f"source user {source.label!r} is not registered")
        if isinstance(body, str):
            return Statement(statement_id_for(body, None), user, source, informal=body)
        return Statement(statement_id_for(None, body), user, source, graph=body)


class _Plan:
    """Deferred ops for one FL description: validate everything against the
    live store plus earlier planned items, then commit atomically."""

    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self.planned_objects: set[str] = set()
        self.ops: list[dict] = []
        self.planned_edges: list[tuple[str, str, str]] = []  # (type, src, dst)
        self.counts = {"categories": 0, "statements": 0, "relations": 0}

    def knows(self, object_id: str) -> bool:
        return object_id in self.planned_objects

    def _exists(self, object_id: str) -> bool:
        return self.kb.store.object_exists(object_id) or object_id in self.planned_objects

    def new_category(self, rendered_id: str, creator: str,
                     attachments: list[tuple[str, str]],
                     relation_creator: str | None = None,
                     modality: str | None = None) -> None:
        cid = CategoryId.parse(rendered_id)
        if creator not in self.kb.store.users:
            raise UnknownUser(f"unknown user {creator!r} (prefix of {rendered_id})")
        if cid.prefix != creator:
            raise BadIdentifier(
                f"category prefix {cid.prefix!r} must be its creator {creator!r}")
        if self._exists(rendered_id):
            raise DuplicateId(f"category {rendered_id} already exists")
        rels = []
        for type_id, parent in attachments:
            if not self._exists(parent):
                raise UnknownObject(f"attachment parent {parent} does not exist")
            rel = make_relation(type_id, parent, rendered_id,
                                relation_creator or creator,
                                modality=Modality(modality or "may"))
            self._check_cycle(rel)
            rels.append(rel)
            self.planned_edges.append((type_id, parent, rendered_id))
        cat = Category(cid, creator, CategoryKind.CONCEPT)
        self.ops.append({"kind": "add_category", "category": cat.to_dict(),
                         "attachments": [r.to_dict() for r in rels]})
        self.planned_objects.add(rendered_id)
        self.counts["categories"] += 1
        self.counts["relations"] += len(rels)

    def new_informal(self, text: str, creator: str, anchor: str,
                     gate_covered: bool) -> str:
        stmt_id = statement_id_for(text, None)
        if self._exists(stmt_id):
            return stmt_id
        if creator not in self.kb.store.users:
            raise UnknownUser(f"unknown creator {creator!r}")
        stmt = Statement(stmt_id, creator, Source("user", creator), informal=text)
        connections = []
        if not gate_covered:
            rel = make_relation(EXT_GEN, anchor, stmt_id, creator)
            connections.append(rel.to_dict())
            self.planned_edges.append((EXT_GEN, anchor, stmt_id))
            self.counts["relations"] += 1
        self.ops.append({"kind": "add_statement", "statement": stmt.to_dict(),
                         "connections": connections})
        self.planned_objects.add(stmt_id)
        self.counts["statements"] += 1
        return stmt_id

    def new_relation(self, type_id: str, src: str, dst: str, creator: str,
                     modality: str | None = None) -> None:
        if creator not in self.kb.store.users:
            raise UnknownUser(f"unknown creator {creator!r}")
        for end in (src, dst):
            if not self._exists(end):
                raise UnknownObject(f"relation endpoint {end} does not exist")
        rel = make_relation(type_id, src, dst, creator,
                            modality=Modality(modality or "may"))
        if rel.id in self.kb.store.relations:
            return
        self._check_signature_planned(rel)
        self._check_cycle(rel)
        self.ops.append({"kind": "add_relation", "relation": rel.to_dict()})
        self.planned_edges.append((type_id, src, dst))
        self.counts["relations"] += 1

    def _check_signature_planned(self, rel: RelationInstance) -> None:
        signature = self.kb.store.relation_traits(rel.type)[2]
        for end, expected in ((rel.src, signature[0]), (rel.dst, signature[1])):
            if expected == "any":
                continue
            actual = self.kb.store.object_kind(end)
            if actual is None:  # planned object
                actual = "statement" if end.startswith("s_") else "category"
            if actual != expected:
                raise SignatureViolation(
                    f"{rel.type} expects a {expected} endpoint, {end} is a {actual}")

    def _check_cycle(self, rel: RelationInstance) -> None:
        store = self.kb.store
        if not store.is_acyclic_required(rel.type):
            return
        family = store.family_of(rel.type)
        extra: dict[str, list[str]] = {}
        for type_id, src, dst in self.planned_edges:
            if store.family_of(type_id) is family:
                extra.setdefault(src, []).append(dst)
        # DFS from dst for a path back to src over store + planned edges.
        if rel.src == rel.dst:
            raise SignatureViolation(f"{rel.type} cannot relate {rel.src} to itself")
        seen = {rel.dst}
        stack = [rel.dst]
        while stack:
            current = stack.pop()
            successors = [r.dst for r in store.relations_from(current)
                          if store.family_of(r.type) is family]
            successors += extra.get(current, [])
            for nxt in successors:
                if nxt == rel.src:
                    from .errors import CycleDetected
                    raise CycleDetected(
                        f"{rel.type} from {rel.src} to {rel.dst} closes a cycle")
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)

    def commit(self, report: LoadReport) -> None:
        for op in self.ops:
            self.kb._commit(op)
        report.categories += self.counts["categories"]
        report.statements += self.counts["statements"]
        report.relations += self.counts["relations"]


def _prefix_of(rendered_id: str) -> str:
    return rendered_id.split("#", 1)[0]


def _iter_descendants(desc: FlDescription):
    for child in desc.children:
        yield child
        yield from _iter_descendants(child)
