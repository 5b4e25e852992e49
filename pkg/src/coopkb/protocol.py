"""Admission workflow for new statements.

Nothing enters the shared network unlinked: a proposal must carry at least
one generalization- or corrective-family connection to an existing object.
Graph matching then compares the proposed body with every stored statement;
a complete redundancy or an inconsistency blocks admission unless a
corrective connection covers the conflicting object. Partial redundancy is
normal growth and only annotates the result. Disagreement never deletes:
corrected statements stay, with their believers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .model import GATE_FAMILIES, ConceptualGraph, RelationFamily, statement_id_for
from .ontology import project
from .store import Store


class AdmissionOutcome(str, Enum):
    ACCEPTED = "accepted"
    NEEDS_CONNECTION = "needs_connection"
    CONFLICT_DETECTED = "conflict_detected"


class ConflictKind(str, Enum):
    COMPLETE_REDUNDANCY = "complete-redundancy"
    PARTIAL_REDUNDANCY = "partial-redundancy"
    INCONSISTENCY = "inconsistency"


@dataclass(frozen=True)
class Conflict:
    object_id: str
    kind: ConflictKind

    def to_dict(self) -> dict:
        return {"object": self.object_id, "kind": self.kind.value}


@dataclass
class AdmissionResult:
    outcome: AdmissionOutcome
    conflicts: list[Conflict] = field(default_factory=list)
    required_action: str = ""
    statement_id: str | None = None
    relation_ids: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "conflicts": [c.to_dict() for c in self.conflicts],
            "required_action": self.required_action,
            "statement_id": self.statement_id,
            "relation_ids": list(self.relation_ids),
        }


def detect_conflicts(store: Store, body: ConceptualGraph | str) -> list[Conflict]:
    """Compare a proposed body against every stored statement.

    complete-redundancy: identical content hash, or mutual projection with
    matching negation flags; partial-redundancy: projection in exactly one
    direction; inconsistency: same quantifier-free skeleton but opposite
    negation flags.
    """
    conflicts: list[Conflict] = []
    if isinstance(body, str):
        dup = statement_id_for(body, None)
        if dup in store.statements:
            conflicts.append(Conflict(dup, ConflictKind.COMPLETE_REDUNDANCY))
        return conflicts

    new_id = statement_id_for(None, body)
    skeleton = body.skeleton_key()
    for sid, stmt in store.statements.items():
        if not stmt.is_formal:
            continue
        other = stmt.graph
        if sid == new_id:
            conflicts.append(Conflict(sid, ConflictKind.COMPLETE_REDUNDANCY))
            continue
        if other.skeleton_key() == skeleton and other.negated != body.negated:
            conflicts.append(Conflict(sid, ConflictKind.INCONSISTENCY))
            continue
        if other.negated != body.negated:
            continue
        forward = project(store, body, other) is not None
        backward = project(store, other, body) is not None
        if forward and backward:
            conflicts.append(Conflict(sid, ConflictKind.COMPLETE_REDUNDANCY))
        elif forward or backward:
            conflicts.append(Conflict(sid, ConflictKind.PARTIAL_REDUNDANCY))
    return conflicts


BLOCKING_KINDS = {ConflictKind.COMPLETE_REDUNDANCY, ConflictKind.INCONSISTENCY}


def admission_decision(store: Store, body: ConceptualGraph | str,
                       connections: list[tuple[str, str]]) -> AdmissionResult:
    """Gate check and conflict check for a proposal; pure, no side effects.

    ``connections`` pairs a relation type id with an existing object id; the
    stored edge will run from the existing object to the new statement.
    """
    gate_ok = any(store.family_of(t) in GATE_FAMILIES for t, _ in connections)
    if not gate_ok:
        return AdmissionResult(
            AdmissionOutcome.NEEDS_CONNECTION,
            required_action="connect the statement to an existing object with a "
                            "generalization- or corrective-family relation",
        )

    conflicts = detect_conflicts(store, body)
    new_id = statement_id_for(body if isinstance(body, str) else None,
                              body if isinstance(body, ConceptualGraph) else None)
    corrective_targets = {
        obj for t, obj in connections
        if store.family_of(t) is RelationFamily.CORRECTIVE
    }
    blocking = []
    for c in conflicts:
        if c.kind not in BLOCKING_KINDS:
            continue
        if c.object_id == new_id:
            # Re-asserting a verbatim body is never admissible; believing
            # the existing statement is the loss-less move.
            blocking.append(c)
        elif c.object_id not in corrective_targets:
            blocking.append(c)
    if blocking:
        dup = next((c for c in blocking if c.object_id == new_id), None)
        if dup is not None:
            action = f"identical statement exists: add a belief on {dup.object_id} instead"
        else:
            ids = ", ".join(c.object_id for c in blocking)
            action = (f"refine the statement or add a corrective connection "
                      f"covering: {ids}")
        return AdmissionResult(AdmissionOutcome.CONFLICT_DETECTED, blocking, action)

    warnings = [c for c in conflicts if c.kind is ConflictKind.PARTIAL_REDUNDANCY]
    return AdmissionResult(AdmissionOutcome.ACCEPTED, warnings,
                           statement_id=new_id)
