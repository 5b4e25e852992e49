"""Hierarchy traversal and graph projection.

Relations are stored in the direction FL writes them: the source of a
specialization-family edge is the more general object and the target the
more specific one, so ``wn#bird subtype: wn#sparrow`` yields an edge
bird -> sparrow. Specialization views walk edges forward, generalization
views walk them backward.

``project`` decides whether one conceptual graph generalizes another: it
searches for a structure-preserving node map where every general node's
category subsumes its image's category, quantifiers never gain strength
(every >= most >= some > named individual) and every edge lands on an edge
of the same or a more specialized relation type. Backtracking with
type-compatibility pruning; worst case exponential, fine at the graph
sizes this store holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CycleDetected, UnknownObject
from .model import (
    QUANTIFIER_RANK,
    ConceptualGraph,
    RelationFamily,
    RelationInstance,
)
from .store import Store


@dataclass
class SpecNode:
    object_id: str
    relation_type: str | None  # edge that led here; None at the root
    creators: list[str] = field(default_factory=list)
    annotations: list[RelationInstance] = field(default_factory=list)
    children: list["SpecNode"] = field(default_factory=list)


@dataclass
class SpecTree:
    root: SpecNode

    def node_ids(self) -> set[str]:
        out: set[str] = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            out.add(node.object_id)
            stack.extend(node.children)
        return out

    def preorder_ids(self) -> list[str]:
        out: list[str] = []

        def visit(node: SpecNode) -> None:
            out.append(node.object_id)
            for child in node.children:
                visit(child)

        visit(self.root)
        return out


DEFAULT_FAMILIES = frozenset({RelationFamily.SPECIALIZATION})


def creates_cycle(store: Store, type_id: str, src: str, dst: str) -> bool:
    """True if adding src -> dst would close a cycle in the type's family."""
    family = store.family_of(type_id)
    if src == dst:
        return True
    # A cycle appears iff src is already reachable from dst along the family.
    seen = {dst}
    stack = [dst]
    while stack:
        current = stack.pop()
        for rel in store.relations_from(current):
            if store.family_of(rel.type) is not family:
                continue
            if rel.dst == src:
                return True
            if rel.dst not in seen:
                seen.add(rel.dst)
                stack.append(rel.dst)
    return False


def spec_tree(store: Store, root_id: str, max_depth: int | None = None,
              families: frozenset[RelationFamily] = DEFAULT_FAMILIES,
              annotate: bool = False, reverse: bool = False,
              include_seed: bool | None = None) -> SpecTree:
    """Specialization view under ``root_id`` (generalization view when
    ``reverse``). Children are sorted, so the output is independent of
    insertion order; a node on the current path is never expanded twice,
    which keeps merged stores with residual cycles from hanging.

    Views rooted at a user object stop at the seed boundary: the bootstrap
    plumbing above it is noise there. Rooting at a seed object shows seeds.
    """
    if not store.object_exists(root_id):
        raise UnknownObject(f"unknown object {root_id}")
    if include_seed is None:
        include_seed = root_id in store.seed_ids

    def annotations_for(object_id: str) -> list[RelationInstance]:
        if not annotate:
            return []
        rels = [r for r in store.relations_from(object_id)
                if store.family_of(r.type) not in families]
        return sorted(rels, key=lambda r: (r.type, r.dst, r.creator))

    def creators_for(object_id: str) -> list[str]:
        obj = store.get_object(object_id)
        creator = getattr(obj, "creator", None)
        return [creator] if creator else []

    def expand(object_id: str, depth: int, on_path: frozenset[str]) -> SpecNode:
        node = SpecNode(object_id, None, creators_for(object_id),
                        annotations_for(object_id))
        if max_depth is not None and depth >= max_depth:
            return node
        rels = store.relations_to(object_id) if reverse else store.relations_from(object_id)
        edges = [(r.type, (r.src if reverse else r.dst)) for r in rels
                 if store.family_of(r.type) in families]
        for type_id, child_id in sorted(set(edges)):
            if child_id in on_path:
                continue
            if not include_seed and child_id in store.seed_ids:
                continue
            child = expand(child_id, depth + 1, on_path | {child_id})
            child.relation_type = type_id
            node.children.append(child)
        return node

    return SpecTree(expand(root_id, 0, frozenset({root_id})))


def category_subsumes(store: Store, general: str, specific: str) -> bool:
    """True when ``general`` equals or sits above ``specific`` along
    specialization-family edges."""
    if general == specific:
        return True
    seen = {general}
    stack = [general]
    while stack:
        current = stack.pop()
        for rel in store.relations_from(current):
            if store.family_of(rel.type) is not RelationFamily.SPECIALIZATION:
                continue
            if rel.dst == specific:
                return True
            if rel.dst not in seen:
                seen.add(rel.dst)
                stack.append(rel.dst)
    return False


def relation_type_subsumes(store: Store, general: str, specific: str) -> bool:
    return category_subsumes(store, general, specific)


def quantifier_compatible(general, specific) -> bool:
    return QUANTIFIER_RANK[general] >= QUANTIFIER_RANK[specific]


@dataclass
class Projection:
    node_map: dict[int, int]
    edge_map: dict[int, int]


def project(store: Store, general: ConceptualGraph,
            specific: ConceptualGraph) -> Projection | None:
    """Structure-preserving map from ``general`` into ``specific``, or None.

    Conditions per mapped element:
      * node categories: general's subsumes specific's;
      * quantifiers: never stronger in the image;
      * edges: same or more specialized relation type, endpoints follow the
        node map (statement endpoints must match exactly).

    Modality is deliberately not consulted.
    """
    candidates: list[list[int]] = []
    for g_node in general.nodes:
        options = [
            j for j, s_node in enumerate(specific.nodes)
            if category_subsumes(store, g_node.category, s_node.category)
            and quantifier_compatible(g_node.quantifier, s_node.quantifier)
        ]
        if not options:
            return None
        candidates.append(options)

    # Index the specific graph's edges for the edge-mapping step.
    def edge_match(g_edge, node_map) -> int | None:
        for j, s_edge in enumerate(specific.edges):
            if not relation_type_subsumes(store, g_edge.type, s_edge.type):
                continue
            if _endpoint_image(g_edge.src, node_map) != s_edge.src:
                continue
            if _endpoint_image(g_edge.dst, node_map) != s_edge.dst:
                continue
            return j
        return None

    order = sorted(range(len(general.nodes)), key=lambda i: len(candidates[i]))
    node_map: dict[int, int] = {}

    def assign(pos: int) -> Projection | None:
        if pos == len(order):
            edge_map: dict[int, int] = {}
            for i, g_edge in enumerate(general.edges):
                j = edge_match(g_edge, node_map)
                if j is None:
                    return None
                edge_map[i] = j
            return Projection(dict(node_map), edge_map)
        i = order[pos]
        for j in candidates[i]:
            node_map[i] = j
            found = assign(pos + 1)
            if found is not None:
                return found
            del node_map[i]
        return None

    return assign(0)


def _endpoint_image(end, node_map):
    return node_map[end] if isinstance(end, int) else end


def statement_generalizes(store: Store, a_id: str, b_id: str) -> bool:
    """True iff statement ``a`` generalizes statement ``b``.

    Formal pair: a projection of a's graph into b's exists and the negation
    flags agree. Any informal side: only an explicit specialization-family
    relation linking a to b counts.
    """
    a = store.statements.get(a_id)
    b = store.statements.get(b_id)
    if a is None or b is None:
        raise UnknownObject(f"unknown statement {a_id if a is None else b_id}")
    if a_id == b_id:
        return True
    if a.is_formal and b.is_formal:
        if a.graph.negated != b.graph.negated:
            return False
        return project(store, a.graph, b.graph) is not None
    for rel in store.relations_from(a_id):
        if rel.dst == b_id and store.family_of(rel.type) is RelationFamily.SPECIALIZATION:
            return True
    return False


def transitive_specializations(store: Store, root_id: str,
                               families: frozenset[RelationFamily] = DEFAULT_FAMILIES,
                               reverse: bool = False) -> set[str]:
    """Reachable object set, root included (iterative closure)."""
    seen = {root_id}
    stack = [root_id]
    while stack:
        current = stack.pop()
        rels = store.relations_to(current) if reverse else store.relations_from(current)
        for rel in rels:
            if store.family_of(rel.type) not in families:
                continue
            nxt = rel.src if reverse else rel.dst
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def ensure_acyclic(store: Store, rel: RelationInstance) -> None:
    if store.is_acyclic_required(rel.type) and creates_cycle(store, rel.type, rel.src, rel.dst):
        raise CycleDetected(
            f"{rel.type} from {rel.src} to {rel.dst} closes a cycle")
