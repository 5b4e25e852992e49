"""Syntax tree for FL text.

A document alternates informal HTML and formal parts; a formal part is a
list of descriptions. One description is a head node plus comma-separated
relation blocks, plus any deeper-indented children: a child starting with
a bare node is an implicit specialization of the head, a child starting
with ``relname:`` just continues the head's blocks.

``structure()`` methods return location-free tuples so tests can compare
trees across a serialize/parse round trip.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class NodeRef:
    """Head or target: an identifier or a quoted informal text."""

    text: str
    quoted: bool = False
    quantifier: str | None = None  # "every" | "most" | "some"
    creator: str | None = None
    line: int = 0
    col: int = 0

    def structure(self):
        return (self.text, self.quoted, self.quantifier, self.creator)


@dataclass
class FlBlock:
    relation: str
    targets: list[NodeRef]
    creator: str | None = None
    modality: str | None = None  # "may" | "must" | "can"
    line: int = 0
    col: int = 0

    def structure(self):
        return (self.relation, self.creator, self.modality,
                tuple(t.structure() for t in self.targets))


@dataclass
class FlDescription:
    head: NodeRef
    blocks: list[FlBlock] = field(default_factory=list)
    children: list["FlDescription"] = field(default_factory=list)
    indent: int = 0
    line: int = 0

    def structure(self):
        return (self.head.structure(),
                tuple(b.structure() for b in self.blocks),
                tuple(c.structure() for c in self.children))


@dataclass
class InformalPart:
    text: str
    offset: int = 0


@dataclass
class FlPart:
    """One formal segment: tag-stripped text plus its parsed descriptions."""

    text: str
    offset: int = 0
    creator: str | None = None  # from a @creator directive
    descriptions: list[FlDescription] = field(default_factory=list)


@dataclass
class FlDocument:
    segments: list[InformalPart | FlPart] = field(default_factory=list)

    def formal_parts(self) -> list[FlPart]:
        return [s for s in self.segments if isinstance(s, FlPart)]
