"""Built-in seed ontology.

A small bootstrap hierarchy owned by the system user ``kb``: a root
``kb#thing`` with concept subtrees for processes/tasks, entities and
properties, plus the full set of seed relation types with their families,
acyclicity flags and endpoint signatures.

Relation types are ordinary categories (kind ``relation``), so users can
refine them: a new relation type attached under ``kb#agent`` inherits the
descriptive family, acyclicity flag and signature of its ancestor.
"""

from __future__ import annotations

from .model import Category, CategoryId, CategoryKind, RelationFamily

SEED_USER = "kb"

# (name, family, transitive, signature) where a signature constrains the
# endpoint kinds: "any" | "category" | "statement".
SEED_RELATION_TYPES: list[tuple[str, RelationFamily, bool, tuple[str, str]]] = [
    # hierarchy relations
    ("subtype", RelationFamily.SPECIALIZATION, True, ("category", "category")),
    ("instance", RelationFamily.SPECIALIZATION, False, ("category", "category")),
    ("specialization", RelationFamily.SPECIALIZATION, True, ("any", "any")),
    ("generalization", RelationFamily.SPECIALIZATION, True, ("any", "any")),
    ("extended_generalization", RelationFamily.SPECIALIZATION, True, ("any", "any")),
    # part relations
    ("part", RelationFamily.MEREOLOGICAL, True, ("category", "category")),
    ("physical_part", RelationFamily.MEREOLOGICAL, True, ("category", "category")),
    ("subtask", RelationFamily.MEREOLOGICAL, True, ("category", "category")),
    # corrective relations
    ("correction", RelationFamily.CORRECTIVE, False, ("any", "any")),
    ("corrective_restriction", RelationFamily.CORRECTIVE, False, ("any", "any")),
    ("corrective_generalization", RelationFamily.CORRECTIVE, False, ("any", "any")),
    # argumentation relations
    ("argument", RelationFamily.ARGUMENTATION, False, ("statement", "statement")),
    ("objection", RelationFamily.ARGUMENTATION, False, ("statement", "statement")),
    # descriptive relations
    ("technique", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("tool", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("definition", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("annotation", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("use", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("purpose", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("rationale", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("role", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("origin", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("example", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("advantage", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("disadvantage", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("requirement", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("agent", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("object", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("input", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("output", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("parameter", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("attribute", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("characteristic", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("support", RelationFamily.DESCRIPTIVE, False, ("any", "any")),
    ("url", RelationFamily.DESCRIPTIVE, False, ("any", "statement")),
]

# Concept hierarchy: (name, parent name or None for the root).
# "property" holds the characteristic-like concepts; the bare name
# "characteristic" is taken by the relation type above.
SEED_CONCEPTS: list[tuple[str, str | None]] = [
    ("thing", None),
    ("entity", "thing"),
    ("process", "thing"),
    ("task", "process"),
    ("property", "thing"),
    ("relation_type", "thing"),
]

ROOT_ID = f"{SEED_USER}#thing"
RELATION_ROOT_ID = f"{SEED_USER}#relation_type"


def seed_id(name: str) -> str:
    return f"{SEED_USER}#{name}"


def seed_categories() -> list[tuple[Category, str | None]]:
    """All seed categories paired with their parent's rendered id."""
    out: list[tuple[Category, str | None]] = []
    for name, parent in SEED_CONCEPTS:
        cat = Category(CategoryId(SEED_USER, name), SEED_USER, CategoryKind.CONCEPT)
        out.append((cat, seed_id(parent) if parent else None))
    for name, family, _, _ in SEED_RELATION_TYPES:
        cat = Category(CategoryId(SEED_USER, name), SEED_USER,
                       CategoryKind.RELATION, family=family)
        out.append((cat, RELATION_ROOT_ID))
    return out


def seed_traits() -> dict[str, tuple[RelationFamily, bool, tuple[str, str]]]:
    """Rendered id -> (family, transitive, signature) for the seed types."""
    return {
        seed_id(name): (family, transitive, sig)
        for name, family, transitive, sig in SEED_RELATION_TYPES
    }
