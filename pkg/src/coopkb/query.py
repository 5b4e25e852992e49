"""User-facing queries: hierarchy views, search, consistent subsets.

Textual command syntax (shared by the CLI and the HTTP ``q=`` parameter)::

    spec <id> [depth] [+rel]     specializations below an object
    gen <id> [depth]             generalizations above it
    search <text>                substring search over names and texts
    subset [dimension]           greedy consistent subset of the statements

Tree output is FL-shaped indented text: category lines are bare nodes,
statements render as their FL form, relation annotations as continuation
blocks, so the display re-parses under the FL grammar.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import AmbiguousName, UnknownObject
from .model import (
    Category,
    ConceptualGraph,
    Dimension,
    Quantifier,
    RelationInstance,
    Statement,
    User,
)
from .ontology import SpecNode, SpecTree, spec_tree, statement_generalizes
from .store import Store
from .valuation import Scorer, statement_score


@dataclass
class QueryResult:
    kind: str  # tree | objects | detail | candidates
    text: str
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "text": self.text, **self.data}


def resolve_name(store: Store, name: str) -> str:
    """Object id for a user-supplied name; unprefixed category names must
    be unambiguous across creators."""
    name = name.strip()
    if store.object_exists(name):
        return name
    if "#" in name:
        raise UnknownObject(f"unknown object {name}")
    candidates = sorted(
        cid for cid, cat in store.categories.items() if cat.id.name == name)
    if not candidates:
        raise UnknownObject(f"unknown object {name}")
    if len(candidates) > 1:
        raise AmbiguousName(name, candidates)
    return candidates[0]


def spec(store: Store, name: str, depth: int | None = None,
         show_relations: bool = False) -> QueryResult:
    root = resolve_name(store, name)
    tree = spec_tree(store, root, depth, annotate=show_relations)
    return QueryResult("tree", render_tree(store, tree, show_relations),
                       {"tree": _tree_dict(tree), "root": root})


def gen(store: Store, name: str, depth: int | None = None) -> QueryResult:
    root = resolve_name(store, name)
    tree = spec_tree(store, root, depth, reverse=True)
    return QueryResult("tree", render_tree(store, tree, False),
                       {"tree": _tree_dict(tree), "root": root})


def search(store: Store, text: str) -> QueryResult:
    """Case-insensitive substring match; empty text is rejected as too broad."""
    needle = text.strip().lower()
    hits: list[str] = []
    if needle:
        for cid, cat in store.categories.items():
            if cat.archived or cid in store.seed_ids:
                continue
            if needle in cid.lower() or any(
                    needle in label.lower() for label in cat.informal_labels):
                hits.append(cid)
        for sid, stmt in store.statements.items():
            if stmt.archived or sid in store.seed_ids:
                continue
            if stmt.informal is not None and needle in stmt.informal.lower():
                hits.append(sid)
            elif stmt.graph is not None and any(
                    needle in node.category.lower() for node in stmt.graph.nodes):
                hits.append(sid)
    hits.sort()
    lines = [_object_line(store, oid) for oid in hits]
    return QueryResult("objects", "\n".join(lines), {"objects": hits})


def consistent_subset(store: Store, dimension: Dimension = Dimension.USEFULNESS
                      ) -> QueryResult:
    """Greedy conflict-free selection of formal statements, preferring
    high scores, then specialization depth, then id."""
    scorer = Scorer(store, dimension)
    candidates = [sid for sid, stmt in store.statements.items()
                  if stmt.is_formal and not stmt.archived]

    def spec_depth(sid: str) -> int:
        return sum(
            1 for other in candidates
            if other != sid
            and statement_generalizes(store, other, sid)
            and not statement_generalizes(store, sid, other))

    ordered = sorted(
        candidates,
        key=lambda sid: (-scorer.score(sid).value, -spec_depth(sid), sid))
    selected: list[str] = []
    for sid in ordered:
        if all(not pairwise_inconsistent(store, sid, kept) for kept in selected):
            selected.append(sid)
    lines = [_object_line(store, oid) for oid in selected]
    return QueryResult("objects", "\n".join(lines), {"objects": selected})


def pairwise_inconsistent(store: Store, a_id: str, b_id: str) -> bool:
    a, b = store.statements[a_id], store.statements[b_id]
    if not (a.is_formal and b.is_formal):
        return False
    return a.graph.skeleton_key() == b.graph.skeleton_key() \
        and a.graph.negated != b.graph.negated


def run_query(store: Store, q: str) -> QueryResult:
    """Dispatch one textual query command."""
    parts = q.strip().split()
    if not parts:
        raise UnknownObject("empty query")
    cmd, args = parts[0], parts[1:]
    if cmd == "spec":
        if not args:
            raise UnknownObject("spec needs an object name")
        show = "+rel" in args
        args = [a for a in args if a != "+rel"]
        depth = int(args[1]) if len(args) > 1 else None
        return spec(store, args[0], depth, show)
    if cmd == "gen":
        if not args:
            raise UnknownObject("gen needs an object name")
        depth = int(args[1]) if len(args) > 1 else None
        return gen(store, args[0], depth)
    if cmd == "search":
        return search(store, " ".join(args))
    if cmd == "subset":
        dim = Dimension(args[0]) if args else Dimension.USEFULNESS
        return consistent_subset(store, dim)
    raise UnknownObject(f"unknown query command {cmd!r}")


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

INDENT = 4


def render_tree(store: Store, tree: SpecTree, show_relations: bool) -> str:
    lines: list[str] = []

    def visit(node: SpecNode, depth: int) -> None:
        pad = " " * (INDENT * depth)
        lines.append(pad + _object_line(store, node.object_id))
        if show_relations:
            for rel in node.annotations:
                lines.append(f"{pad}    {_relation_block(store, rel)}")
        for child in node.children:
            visit(child, depth + 1)

    visit(tree.root, 0)
    return "\n".join(lines)


def _object_line(store: Store, object_id: str) -> str:
    obj = store.get_object(object_id)
    if isinstance(obj, Statement):
        if obj.informal is not None:
            return f"'{_quote_safe(obj.informal)}' ({obj.creator})"
        return f"{render_graph(obj.graph)} ({obj.creator})"
    if isinstance(obj, Category):
        return object_id
    if isinstance(obj, RelationInstance):
        return f"{obj.src} {_relation_block(store, obj)}"
    return object_id


def _relation_block(store: Store, rel: RelationInstance) -> str:
    name = rel.type.rsplit("#", 1)[-1]
    target = _target_text(store, rel.dst)
    return f"{name}: {target} ({rel.creator})"


def _target_text(store: Store, object_id: str) -> str:
    obj = store.get_object(object_id)
    if isinstance(obj, Statement) and obj.informal is not None:
        return f"'{_quote_safe(obj.informal)}'"
    return object_id


def render_graph(graph: ConceptualGraph) -> str:
    """FL text for a star-shaped graph; non-star edges come out as extra
    blocks named from their own source node."""
    def node_text(i: int) -> tuple[str, str, str]:
        node = graph.nodes[i]
        q = "" if node.quantifier is Quantifier.INDIVIDUAL else node.quantifier.value + " "
        m = f"{node.modality.value} " if node.modality else ""
        return q, m, node.category

    q0, m0, head = node_text(0)
    blocks = []
    for edge in graph.edges:
        name = edge.type.rsplit("#", 1)[-1]
        if isinstance(edge.dst, int):
            tq, _, tcat = node_text(edge.dst)
            target = f"{tq}{tcat}"
        else:
            target = edge.dst
        blocks.append(f"{m0}{name}: {target}" if edge.src == 0
                      else f"{name}: {target}")
    text = f"{q0}{head}"
    if blocks:
        text += " " + ", ".join(blocks)
    if graph.negated:
        return f"'NOT: {_quote_safe(text)}'"
    return text


def _quote_safe(text: str) -> str:
    return text.replace("'", " ")


# ---------------------------------------------------------------------------
# Object detail
# ---------------------------------------------------------------------------

def object_detail(store: Store, name: str) -> QueryResult:
    object_id = resolve_name(store, name)
    obj = store.get_object(object_id)
    detail: dict = {"id": object_id, "object_kind": store.object_kind(object_id)}
    if isinstance(obj, (Statement, RelationInstance)):
        detail["creator"] = obj.creator
        detail["believers"] = sorted(obj.believers)
    if isinstance(obj, Statement):
        detail["source"] = obj.source.to_dict()
        detail["body"] = obj.informal if obj.informal is not None \
            else obj.graph.to_dict()
        detail["fl"] = render_graph(obj.graph) if obj.is_formal else None
    if isinstance(obj, Category):
        detail["creator"] = obj.creator
        detail["kind"] = obj.kind.value
        detail["informal_labels"] = list(obj.informal_labels)
    if isinstance(obj, RelationInstance):
        detail["type"] = obj.type
        detail["src"] = obj.src
        detail["dst"] = obj.dst
    if isinstance(obj, User):
        detail["metadata"] = dict(obj.metadata)
    if not isinstance(obj, User):
        detail["scores"] = {
            dim.value: statement_score(store, object_id, dim).to_dict()
            for dim in Dimension
        }
    detail["relations"] = [
        rel.to_dict() for rel in
        sorted(store.relations_from(object_id) + store.relations_to(object_id),
               key=lambda r: r.id)
    ]
    return QueryResult("detail", _object_line(store, object_id), detail)


def _tree_dict(tree: SpecTree) -> dict:
    def node_dict(node: SpecNode) -> dict:
        return {
            "object": node.object_id,
            "relation_type": node.relation_type,
            "creators": node.creators,
            "annotations": [r.to_dict() for r in node.annotations],
            "children": [node_dict(c) for c in node.children],
        }

    return node_dict(tree.root)
