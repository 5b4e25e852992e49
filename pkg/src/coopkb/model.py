"""Domain objects of the shared semantic network.

Everything a user can create is an "object" with a globally addressable id:

* categories    rendered as ``prefix#name`` (creator-prefixed formal terms)
* statements    ``s_<hash>`` (content-hash of the body, so verbatim
                re-submissions collide on purpose)
* relations     ``r_<hash>``
* users         addressed by their bare name
* sources       ``src_<hash>``

Mutations never travel as method calls between servers; they travel as
``OperationRecord`` values, the unit of journaling and replication.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import BadIdentifier, MalformedRecord

USER_NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")
CATEGORY_NAME_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.\-]*$")


def validate_user_name(name: str) -> str:
    if not name or not USER_NAME_RE.match(name):
        raise BadIdentifier(f"bad user name {name!r}")
    return name


def validate_category_name(name: str) -> str:
    if not name or not CATEGORY_NAME_RE.match(name):
        raise BadIdentifier(f"bad category name {name!r}")
    return name


class Quantifier(str, Enum):
    EVERY = "every"
    MOST = "most"
    SOME = "some"
    INDIVIDUAL = "individual"


# Projection compares quantifiers on this scale; named individuals sit
# below all generic quantifiers.
QUANTIFIER_RANK = {
    Quantifier.EVERY: 3,
    Quantifier.MOST: 2,
    Quantifier.SOME: 1,
    Quantifier.INDIVIDUAL: 0,
}


class Modality(str, Enum):
    MAY = "may"
    MUST = "must"
    CAN = "can"


class CategoryKind(str, Enum):
    CONCEPT = "concept"
    RELATION = "relation"
    INDIVIDUAL = "individual"


class RelationFamily(str, Enum):
    SPECIALIZATION = "specialization"
    CORRECTIVE = "corrective"
    ARGUMENTATION = "argumentation"
    MEREOLOGICAL = "mereological"
    DESCRIPTIVE = "descriptive"


# Families whose relation graphs must stay acyclic.
ACYCLIC_FAMILIES = frozenset({
    RelationFamily.SPECIALIZATION,
    RelationFamily.CORRECTIVE,
    RelationFamily.ARGUMENTATION,
    RelationFamily.MEREOLOGICAL,
})

# Families that satisfy the admission gate for new statements.
GATE_FAMILIES = frozenset({
    RelationFamily.SPECIALIZATION,
    RelationFamily.CORRECTIVE,
})

# Families that give a category its place in the hierarchy. Part/subtask
# hierarchies constrain placement just like specialization ones do, and a
# task is routinely a subtask of several parents.
ATTACHMENT_FAMILIES = frozenset({
    RelationFamily.SPECIALIZATION,
    RelationFamily.MEREOLOGICAL,
})


class Dimension(str, Enum):
    USEFULNESS = "usefulness"
    ORIGINALITY = "originality"


@dataclass(frozen=True)
class CategoryId:
    prefix: str
    name: str

    def rendered(self) -> str:
        return f"{self.prefix}#{self.name}"

    @staticmethod
    def parse(text: str) -> "CategoryId":
        prefix, sep, name = text.partition("#")
        if not sep:
            raise BadIdentifier(f"missing creator prefix in {text!r}")
        validate_user_name(prefix)
        validate_category_name(name)
        return CategoryId(prefix, name)


@dataclass
class User:
    name: str
    metadata: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "metadata": dict(self.metadata)}

    @staticmethod
    def from_dict(d: dict) -> "User":
        return User(d["name"], dict(d.get("metadata", {})))


@dataclass(frozen=True)
class Source:
    kind: str  # "person" | "document" | "language" | "user"
    label: str
    locator: str | None = None

    def object_id(self) -> str:
        if self.kind == "user":
            return self.label
        digest = _hash_text(json.dumps([self.kind, self.label, self.locator]))
        return f"src_{digest}"

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "label": self.label}
        if self.locator is not None:
            d["locator"] = self.locator
        return d

    @staticmethod
    def from_dict(d: dict) -> "Source":
        return Source(d["kind"], d["label"], d.get("locator"))


@dataclass
class Category:
    id: CategoryId
    creator: str
    kind: CategoryKind = CategoryKind.CONCEPT
    informal_labels: list[str] = field(default_factory=list)
    # Only meaningful for kind == RELATION; None means "inherit from the
    # nearest seed ancestor in the specialization hierarchy".
    family: RelationFamily | None = None
    archived: bool = False

    @property
    def object_id(self) -> str:
        return self.id.rendered()

    def to_dict(self) -> dict:
        d: dict = {
            "id": self.id.rendered(),
            "creator": self.creator,
            "kind": self.kind.value,
        }
        if self.informal_labels:
            d["informal_labels"] = list(self.informal_labels)
        if self.family is not None:
            d["family"] = self.family.value
        return d

    @staticmethod
    def from_dict(d: dict) -> "Category":
        return Category(
            id=CategoryId.parse(d["id"]),
            creator=d["creator"],
            kind=CategoryKind(d.get("kind", "concept")),
            informal_labels=list(d.get("informal_labels", [])),
            family=RelationFamily(d["family"]) if "family" in d else None,
        )


@dataclass(frozen=True)
class ConceptNode:
    category: str  # rendered category id
    quantifier: Quantifier = Quantifier.SOME
    modality: Modality | None = None

    def to_dict(self) -> dict:
        d: dict = {"category": self.category, "quantifier": self.quantifier.value}
        if self.modality is not None:
            d["modality"] = self.modality.value
        return d

    @staticmethod
    def from_dict(d: dict) -> "ConceptNode":
        return ConceptNode(
            d["category"],
            Quantifier(d.get("quantifier", "some")),
            Modality(d["modality"]) if "modality" in d else None,
        )


@dataclass(frozen=True)
class GraphEdge:
    """Directed, typed edge: endpoints are node indices (int) or statement
    ids (str) for relations on statements."""

    type: str  # rendered id of the relation type category
    src: int | str
    dst: int | str

    def to_dict(self) -> dict:
        return {"type": self.type, "src": self.src, "dst": self.dst}

    @staticmethod
    def from_dict(d: dict) -> "GraphEdge":
        return GraphEdge(d["type"], d["src"], d["dst"])


@dataclass
class ConceptualGraph:
    nodes: list[ConceptNode]
    edges: list[GraphEdge] = field(default_factory=list)
    negated: bool = False

    def validate(self) -> None:
        if not self.nodes:
            raise MalformedRecord("conceptual graph needs at least one node")
        n = len(self.nodes)
        for e in self.edges:
            for end in (e.src, e.dst):
                if isinstance(end, int) and not (0 <= end < n):
                    raise MalformedRecord(f"edge endpoint {end} out of range")
        if not self._connected():
            raise MalformedRecord("conceptual graph is not connected")

    def _connected(self) -> bool:
        n = len(self.nodes)
        if n <= 1:
            return True
        adj: dict[int, set[int]] = {i: set() for i in range(n)}
        for e in self.edges:
            if isinstance(e.src, int) and isinstance(e.dst, int):
                adj[e.src].add(e.dst)
                adj[e.dst].add(e.src)
        seen = {0}
        stack = [0]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == n

    def skeleton_key(self) -> str:
        """Quantifier-free shape: category multiset plus typed edges.

        Two statements with the same skeleton but different negation flags
        are what the conflict detector reports as an inconsistency.
        """
        cats = sorted(n.category for n in self.nodes)
        # Edge endpoints are mapped to categories so node order is irrelevant.
        def end(e):
            return self.nodes[e].category if isinstance(e, int) else f"s:{e}"
        edges = sorted((e.type, end(e.src), end(e.dst)) for e in self.edges)
        return json.dumps([cats, edges], sort_keys=True)

    def canonical_key(self) -> str:
        return json.dumps(
            {
                "nodes": [n.to_dict() for n in self.nodes],
                "edges": sorted(
                    (e.to_dict() for e in self.edges),
                    key=lambda d: (d["type"], str(d["src"]), str(d["dst"])),
                ),
                "negated": self.negated,
            },
            sort_keys=True,
        )

    def to_dict(self) -> dict:
        return {
            "nodes": [n.to_dict() for n in self.nodes],
            "edges": [e.to_dict() for e in self.edges],
            "negated": self.negated,
        }

    @staticmethod
    def from_dict(d: dict) -> "ConceptualGraph":
        return ConceptualGraph(
            nodes=[ConceptNode.from_dict(n) for n in d["nodes"]],
            edges=[GraphEdge.from_dict(e) for e in d.get("edges", [])],
            negated=bool(d.get("negated", False)),
        )


@dataclass
class Statement:
    id: str
    creator: str
    source: Source
    informal: str | None = None
    graph: ConceptualGraph | None = None
    believers: set[str] = field(default_factory=set)
    archived: bool = False

    @property
    def is_formal(self) -> bool:
        return self.graph is not None

    @property
    def object_id(self) -> str:
        return self.id

    def to_dict(self) -> dict:
        d: dict = {"id": self.id, "creator": self.creator, "source": self.source.to_dict()}
        if self.informal is not None:
            d["informal"] = self.informal
        if self.graph is not None:
            d["graph"] = self.graph.to_dict()
        return d

    @staticmethod
    def from_dict(d: dict) -> "Statement":
        return Statement(
            id=d["id"],
            creator=d["creator"],
            source=Source.from_dict(d["source"]),
            informal=d.get("informal"),
            graph=ConceptualGraph.from_dict(d["graph"]) if "graph" in d else None,
        )


def statement_id_for(informal: str | None, graph: ConceptualGraph | None) -> str:
    """Content-hash id: identical bodies get identical ids by design."""
    if graph is not None:
        return "s_" + _hash_text("g:" + graph.canonical_key())
    return "s_" + _hash_text("i:" + " ".join((informal or "").split()))


@dataclass
class RelationInstance:
    id: str
    type: str  # rendered id of the relation type category
    src: str  # object id
    dst: str  # object id
    creator: str
    believers: set[str] = field(default_factory=set)
    modality: Modality = Modality.MAY
    cardinality: str = "one-or-many"
    archived: bool = False

    @property
    def object_id(self) -> str:
        return self.id

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "type": self.type,
            "src": self.src,
            "dst": self.dst,
            "creator": self.creator,
            "modality": self.modality.value,
            "cardinality": self.cardinality,
        }

    @staticmethod
    def from_dict(d: dict) -> "RelationInstance":
        return RelationInstance(
            id=d["id"],
            type=d["type"],
            src=d["src"],
            dst=d["dst"],
            creator=d["creator"],
            modality=Modality(d.get("modality", "may")),
            cardinality=d.get("cardinality", "one-or-many"),
        )


def relation_id_for(type_id: str, src: str, dst: str, creator: str) -> str:
    return "r_" + _hash_text(json.dumps([type_id, src, dst, creator]))


def make_relation(type_id: str, src: str, dst: str, creator: str,
                  modality: Modality = Modality.MAY,
                  cardinality: str = "one-or-many") -> RelationInstance:
    return RelationInstance(
        id=relation_id_for(type_id, src, dst, creator),
        type=type_id,
        src=src,
        dst=dst,
        creator=creator,
        believers={creator},
        modality=modality,
        cardinality=cardinality,
    )


@dataclass(frozen=True)
class Vote:
    voter: str
    object: str
    dimension: Dimension
    value: float

    def to_dict(self) -> dict:
        return {
            "voter": self.voter,
            "object": self.object,
            "dimension": self.dimension.value,
            "value": self.value,
        }

    @staticmethod
    def from_dict(d: dict) -> "Vote":
        return Vote(d["voter"], d["object"], Dimension(d["dimension"]), float(d["value"]))


# ---------------------------------------------------------------------------
# Operation records: the journal / replication wire format
# ---------------------------------------------------------------------------

PAYLOAD_KINDS = ("add_user", "add_category", "add_statement", "add_relation",
                 "add_belief", "cast_vote")


@dataclass(frozen=True)
class OperationRecord:
    server_id: str
    seq: int
    logical_time: int
    payload: dict  # {"kind": <one of PAYLOAD_KINDS>, ...}

    @property
    def op_id(self) -> tuple[str, int]:
        return (self.server_id, self.seq)

    def sort_key(self) -> tuple[int, str, int]:
        """Deterministic total order all replicas replay in."""
        return (self.logical_time, self.server_id, self.seq)

    def to_dict(self) -> dict:
        return {
            "op": [self.server_id, self.seq],
            "t": self.logical_time,
            "payload": self.payload,
        }

    @staticmethod
    def from_dict(d: dict) -> "OperationRecord":
        try:
            server_id, seq = d["op"]
            rec = OperationRecord(str(server_id), int(seq), int(d["t"]), d["payload"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedRecord(f"bad operation record: {exc}") from exc
        if not isinstance(rec.payload, dict) or rec.payload.get("kind") not in PAYLOAD_KINDS:
            raise MalformedRecord(f"bad payload kind in record {d!r}")
        return rec


def _hash_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
