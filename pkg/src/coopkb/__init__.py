"""coopkb: a collaborative knowledge-base server.

Many users grow one creator-attributed semantic network: new knowledge
must attach through generalization or corrective relations, conflicts are
surfaced by graph matching instead of being resolved by deletion, and
everything is filterable by votes, argumentation and provenance. Replicas
exchange grow-only operation logs, so it does not matter which server a
user updates or queries first.
"""

from .kb import KnowledgeBase, LoadReport
from .model import (
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
    RelationFamily,
    RelationInstance,
    Source,
    Statement,
    Vote,
)
from .protocol import AdmissionOutcome, AdmissionResult, Conflict, ConflictKind
from .store import Store

__version__ = "0.1.0"

__all__ = [
    "KnowledgeBase", "LoadReport", "Store",
    "AdmissionOutcome", "AdmissionResult", "Conflict", "ConflictKind",
    "Category", "CategoryId", "CategoryKind", "ConceptNode", "ConceptualGraph",
    "Dimension", "GraphEdge", "Modality", "OperationRecord", "Quantifier",
    "RelationFamily", "RelationInstance", "Source", "Statement", "Vote",
    "__version__",
]
