"""In-memory object store rebuilt deterministically from operation records.

The store never mutates objects in place except for the two sanctioned
kinds of growth: believer sets grow, and votes are replaced by later votes
in the journal's total order. Everything else is add-only; corrections are
new objects linked by corrective relations.

``apply()`` has two modes. Locally originated records are applied in
``strict`` mode (referential problems raise). Replicated records are
trusted but may reference objects carried by records this peer has not
received yet; in lenient mode such records are deterministically skipped
and retried on the next rebuild, once the journal has grown.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import seed as seed_mod
from .errors import InvalidPayload
from .model import (
    ACYCLIC_FAMILIES,
    GATE_FAMILIES,
    Category,
    Dimension,
    OperationRecord,
    RelationFamily,
    RelationInstance,
    Source,
    Statement,
    User,
    Vote,
    make_relation,
)


@dataclass
class VoteSlot:
    value: float
    sort_key: tuple[int, str, int]


@dataclass
class Store:
    users: dict[str, User] = field(default_factory=dict)
    sources: dict[str, Source] = field(default_factory=dict)
    categories: dict[str, Category] = field(default_factory=dict)
    statements: dict[str, Statement] = field(default_factory=dict)
    relations: dict[str, RelationInstance] = field(default_factory=dict)
    # (voter, object, dimension) -> latest vote in journal order
    votes: dict[tuple[str, str, str], VoteSlot] = field(default_factory=dict)
    rel_out: dict[str, list[str]] = field(default_factory=dict)
    rel_in: dict[str, list[str]] = field(default_factory=dict)
    applied_ops: set[tuple[str, int]] = field(default_factory=set)
    # (op_id, reason) for records that could not take effect at their
    # position in the replay order; deterministic given the journal set.
    skipped: list[tuple[tuple[str, int], str]] = field(default_factory=list)
    seed_ids: set[str] = field(default_factory=set)
    _trait_cache: dict[str, tuple[RelationFamily, bool, tuple[str, str]]] = field(
        default_factory=dict)

    def __post_init__(self):
        self._load_seed()

    # -- seeding -----------------------------------------------------------

    def _load_seed(self) -> None:
        self.users[seed_mod.SEED_USER] = User(seed_mod.SEED_USER)
        self.seed_ids.add(seed_mod.SEED_USER)
        for cat, parent in seed_mod.seed_categories():
            self.categories[cat.object_id] = cat
            self.seed_ids.add(cat.object_id)
            if parent is not None:
                rel = _seed_attachment(parent, cat.object_id)
                self._index_relation(rel)
                self.seed_ids.add(rel.id)
        self._seed_traits = seed_mod.seed_traits()

    # -- lookups -----------------------------------------------------------

    def object_exists(self, object_id: str) -> bool:
        return (object_id in self.categories or object_id in self.statements
                or object_id in self.relations or object_id in self.users
                or object_id in self.sources)

    def get_object(self, object_id: str):
        for table in (self.categories, self.statements, self.relations,
                      self.users, self.sources):
            if object_id in table:
                return table[object_id]
        return None

    def object_kind(self, object_id: str) -> str | None:
        if object_id in self.categories:
            return "category"
        if object_id in self.statements:
            return "statement"
        if object_id in self.relations:
            return "relation"
        if object_id in self.users:
            return "user"
        if object_id in self.sources:
            return "source"
        return None

    def relations_from(self, object_id: str) -> list[RelationInstance]:
        return [self.relations[r] for r in self.rel_out.get(object_id, [])]

    def relations_to(self, object_id: str) -> list[RelationInstance]:
        return [self.relations[r] for r in self.rel_in.get(object_id, [])]

    def relation_traits(self, type_id: str) -> tuple[RelationFamily, bool, tuple[str, str]]:
        """Family, transitivity and signature, inherited from the nearest
        seed relation type along specialization edges."""
        if type_id in self._trait_cache:
            return self._trait_cache[type_id]
        traits = self._resolve_traits(type_id, set())
        self._trait_cache[type_id] = traits
        return traits

    def _resolve_traits(self, type_id: str, visiting: set[str]):
        default = (RelationFamily.DESCRIPTIVE, False, ("any", "any"))
        if type_id in self._seed_traits:
            return self._seed_traits[type_id]
        if type_id in visiting:
            return default
        visiting.add(type_id)
        cat = self.categories.get(type_id)
        if cat is not None and cat.family is not None:
            return (cat.family, False, ("any", "any"))
        for rel in self.relations_to(type_id):
            edge_family = self._resolve_traits(rel.type, visiting)[0]
            if edge_family is not RelationFamily.SPECIALIZATION:
                continue
            return self._resolve_traits(rel.src, visiting)
        return default

    def family_of(self, type_id: str) -> RelationFamily:
        return self.relation_traits(type_id)[0]

    def is_acyclic_required(self, type_id: str) -> bool:
        return self.family_of(type_id) in ACYCLIC_FAMILIES

    def vote_value(self, voter: str, object_id: str, dimension: Dimension) -> float | None:
        slot = self.votes.get((voter, object_id, dimension.value))
        return slot.value if slot else None

    def votes_on(self, object_id: str, dimension: Dimension) -> dict[str, float]:
        out = {}
        for (voter, obj, dim), slot in self.votes.items():
            if obj == object_id and dim == dimension.value:
                out[voter] = slot.value
        return out

    # -- application -------------------------------------------------------

    def apply(self, rec: OperationRecord, strict: bool = True) -> bool:
        """Apply one record; returns False on an idempotent duplicate.

        In strict mode a record that cannot take effect raises
        ``InvalidPayload``; otherwise it is noted in ``skipped`` and the
        store is left untouched.
        """
        if rec.op_id in self.applied_ops:
            return False
        try:
            self._dispatch(rec)
        except InvalidPayload as exc:
            if strict:
                raise
            self.skipped.append((rec.op_id, exc.message))
            return False
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            # replicated payloads are structurally checked, not deep-validated
            wrapped = InvalidPayload(f"unusable payload in {rec.op_id}: {exc}")
            if strict:
                raise wrapped from exc
            self.skipped.append((rec.op_id, wrapped.message))
            return False
        self.applied_ops.add(rec.op_id)
        return True

    def _dispatch(self, rec: OperationRecord) -> None:
        p = rec.payload
        kind = p.get("kind")
        if kind == "add_user":
            self._apply_add_user(p)
        elif kind == "add_category":
            self._apply_add_category(p)
        elif kind == "add_statement":
            self._apply_add_statement(p)
        elif kind == "add_relation":
            self._apply_add_relation(p["relation"])
        elif kind == "add_belief":
            self._apply_add_belief(p)
        elif kind == "cast_vote":
            self._apply_cast_vote(p, rec.sort_key())
        else:
            raise InvalidPayload(f"unknown payload kind {kind!r}")

    def _apply_add_user(self, p: dict) -> None:
        user = User.from_dict(p["user"])
        if user.name in self.users:
            # Concurrent registration of the same name on two servers
            # merges to one user; first record in replay order wins.
            return
        self.users[user.name] = user

    def _apply_add_category(self, p: dict) -> None:
        cat = Category.from_dict(p["category"])
        attachments = [RelationInstance.from_dict(r) for r in p.get("attachments", [])]
        if cat.object_id in self.categories:
            raise InvalidPayload(f"category {cat.object_id} already exists")
        for rel in attachments:
            other = rel.src if rel.dst == cat.object_id else rel.dst
            if not self.object_exists(other):
                raise InvalidPayload(f"attachment endpoint {other} missing")
        self.categories[cat.object_id] = cat
        for rel in attachments:
            self._index_relation(rel)
        self._trait_cache.clear()

    def _apply_add_statement(self, p: dict) -> None:
        stmt = Statement.from_dict(p["statement"])
        connections = [RelationInstance.from_dict(r) for r in p.get("connections", [])]
        if stmt.id in self.statements:
            # Content-hash collision means an identical body was admitted
            # concurrently elsewhere; keep the first, merge the believer.
            self.statements[stmt.id].believers.add(stmt.creator)
            for rel in connections:
                if rel.id not in self.relations and self._endpoints_exist(rel):
                    self._index_relation(rel)
            return
        for rel in connections:
            other = rel.src if rel.dst == stmt.id else rel.dst
            if not self.object_exists(other):
                raise InvalidPayload(f"connection endpoint {other} missing")
        sid = stmt.source.object_id()
        if stmt.source.kind != "user" and sid not in self.sources:
            self.sources[sid] = stmt.source
        stmt.believers = {stmt.creator}
        # connections first: a concurrent reader must never observe a
        # statement without its admission links
        for rel in connections:
            self._index_relation(rel)
        self.statements[stmt.id] = stmt

    def _apply_add_relation(self, rel_dict: dict) -> None:
        rel = RelationInstance.from_dict(rel_dict)
        if rel.id in self.relations:
            return
        if not self._endpoints_exist(rel):
            raise InvalidPayload(f"relation {rel.id} has a missing endpoint")
        self._index_relation(rel)
        self._trait_cache.clear()

    def _apply_add_belief(self, p: dict) -> None:
        user, object_id = p["user"], p["object"]
        if user not in self.users:
            raise InvalidPayload(f"unknown believer {user}")
        target = self.statements.get(object_id) or self.relations.get(object_id)
        if target is None:
            raise InvalidPayload(f"unknown belief target {object_id}")
        target.believers.add(user)

    def _apply_cast_vote(self, p: dict, sort_key: tuple[int, str, int]) -> None:
        vote = Vote.from_dict(p["vote"])
        if not self.object_exists(vote.object):
            raise InvalidPayload(f"vote target {vote.object} missing")
        key = (vote.voter, vote.object, vote.dimension.value)
        slot = self.votes.get(key)
        # Later vote in the total order replaces the earlier one no matter
        # in which order the records arrive.
        if slot is None or sort_key > slot.sort_key:
            self.votes[key] = VoteSlot(vote.value, sort_key)

    def _endpoints_exist(self, rel: RelationInstance) -> bool:
        return self.object_exists(rel.src) and self.object_exists(rel.dst)

    def _index_relation(self, rel: RelationInstance) -> None:
        if not rel.believers:
            rel.believers = {rel.creator}
        self.relations[rel.id] = rel
        self.rel_out.setdefault(rel.src, []).append(rel.id)
        self.rel_in.setdefault(rel.dst, []).append(rel.id)

    # -- audits ------------------------------------------------------------

    def audit_gate(self) -> list[str]:
        """Ids of non-seed statements lacking any generalization- or
        corrective-family link; empty on a healthy store."""
        bad = []
        for sid in self.statements:
            if sid in self.seed_ids:
                continue
            linked = any(
                self.family_of(rel.type) in GATE_FAMILIES
                for rel in self.relations_from(sid) + self.relations_to(sid)
            )
            if not linked:
                bad.append(sid)
        return bad

    def non_archived_object_ids(self) -> list[str]:
        out = []
        for cid, cat in self.categories.items():
            if not cat.archived:
                out.append(cid)
        for sid, stmt in self.statements.items():
            if not stmt.archived:
                out.append(sid)
        for rid, rel in self.relations.items():
            if not rel.archived:
                out.append(rid)
        return out


def rebuild(records: list[OperationRecord]) -> Store:
    """Fresh store from a record set, replayed in the total order."""
    store = Store()
    for rec in sorted(records, key=OperationRecord.sort_key):
        store.apply(rec, strict=False)
    return store


def _seed_attachment(parent: str, child: str) -> RelationInstance:
    return make_relation(seed_mod.seed_id("subtype"), parent, child, seed_mod.SEED_USER)
