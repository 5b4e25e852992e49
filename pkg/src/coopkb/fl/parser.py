"""FL lexer, parser and serializer.

Shape of the notation::

    @creator pm
    wfm#workflow  part: wfm#task wfm#case,  definition: 'ordered set of tasks'
        wfm#production_workflow
        subtask: wfm#scheduling (s162557)

One description per head line: comma-separated blocks, each ``relation:
target ...``. Deeper-indented lines either continue the description
(``relation: ...``) or open an implicit specialization child (bare node).
A description ends at ``;`` or at the next line indented at or above its
head. ``(user)`` after a relation name, a target, a quoted statement or
the head records a creator. ``every | most | some`` quantify the node that
follows; ``may | must | can`` before a relation name set its modality.
Those six words are reserved. Tabs count as 8 columns.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import FlSyntaxError, UnknownQuantifier
from .ast import FlBlock, FlDescription, NodeRef

QUANTIFIERS = ("every", "most", "some")
MODALITIES = ("may", "must", "can")
RESERVED = set(QUANTIFIERS) | set(MODALITIES)
TAB_WIDTH = 8

IDENT_CHARS = re.compile(r"[A-Za-z0-9_#.\-]+")
IDENT_SHAPE = re.compile(
    r"^(?:[A-Za-z0-9_]+#)?[A-Za-z0-9_][A-Za-z0-9_.\-]*$")


@dataclass
class Token:
    kind: str  # ident | quoted | creator | colon | comma | semi | directive
    value: str
    line: int
    col: int


@dataclass
class Line:
    number: int
    indent: int
    tokens: list[Token]
    mixed_indent: bool
    raw: str


def lex_line(raw: str, number: int) -> Line:
    indent_chars = raw[: len(raw) - len(raw.lstrip(" \t"))]
    mixed = " " in indent_chars and "\t" in indent_chars
    indent = 0
    for ch in indent_chars:
        indent = indent + (TAB_WIDTH - indent % TAB_WIDTH) if ch == "\t" else indent + 1

    tokens: list[Token] = []
    i = len(indent_chars)
    while i < len(raw):
        ch = raw[i]
        col = i + 1
        if ch in " \t":
            i += 1
        elif ch == "'":
            end = raw.find("'", i + 1)
            if end < 0:
                raise FlSyntaxError("unterminated quoted text", number, col)
            tokens.append(Token("quoted", raw[i + 1:end], number, col))
            i = end + 1
        elif ch == "(":
            end = raw.find(")", i + 1)
            name = raw[i + 1:end].strip() if end > 0 else ""
            if end < 0 or not IDENT_SHAPE.match(name) or "#" in name:
                raise FlSyntaxError("malformed creator suffix", number, col)
            tokens.append(Token("creator", name, number, col))
            i = end + 1
        elif ch == ":":
            tokens.append(Token("colon", ":", number, col))
            i += 1
        elif ch == ",":
            tokens.append(Token("comma", ",", number, col))
            i += 1
        elif ch == ";":
            tokens.append(Token("semi", ";", number, col))
            i += 1
        elif ch == "@":
            m = IDENT_CHARS.match(raw, i + 1)
            if not m:
                raise FlSyntaxError("malformed directive", number, col)
            tokens.append(Token("directive", m.group(0), number, col))
            i = m.end()
        else:
            m = IDENT_CHARS.match(raw, i)
            if not m:
                raise FlSyntaxError(
                    f"unexpected character {ch!r}", number, col, reason="bad-char")
            tokens.append(Token("ident", m.group(0), number, col))
            i = m.end()
    return Line(number, indent, tokens, mixed, raw)


def _check_ident(tok: Token) -> str:
    if not IDENT_SHAPE.match(tok.value):
        raise FlSyntaxError(f"badly formed identifier {tok.value!r}",
                            tok.line, tok.col, reason="bad-identifier")
    return tok.value


class _Cursor:
    def __init__(self, tokens: list[Token], line: int):
        self.tokens = tokens
        self.pos = 0
        self.line = line

    def peek(self, ahead: int = 0) -> Token | None:
        idx = self.pos + ahead
        return self.tokens[idx] if idx < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def error(self, message: str, reason: str = "syntax") -> FlSyntaxError:
        tok = self.peek()
        col = tok.col if tok else (self.tokens[-1].col if self.tokens else 1)
        return FlSyntaxError(message, self.line, col, reason=reason)


def _is_noderef(tok: Token | None) -> bool:
    return tok is not None and tok.kind in ("ident", "quoted") \
        and tok.value not in RESERVED


def _block_start_ahead(cur: _Cursor) -> bool:
    """True when the cursor sits on ``[modality] relname [creator] :``."""
    i = 0
    tok = cur.peek(i)
    if tok is not None and tok.kind == "ident" and tok.value in MODALITIES:
        i += 1
        tok = cur.peek(i)
    if tok is None or tok.kind != "ident" or tok.value in RESERVED:
        return False
    i += 1
    tok = cur.peek(i)
    if tok is not None and tok.kind == "creator":
        i += 1
        tok = cur.peek(i)
    return tok is not None and tok.kind == "colon"


def _parse_noderef(cur: _Cursor, role: str) -> NodeRef:
    quantifier = None
    tok = cur.peek()
    if tok is not None and tok.kind == "ident" and tok.value in QUANTIFIERS:
        if not _is_noderef(cur.peek(1)):
            raise cur.error(f"quantifier {tok.value!r} without a concept")
        quantifier = cur.take().value
        tok = cur.peek()
    if not _is_noderef(tok):
        raise cur.error(f"expected a {role}")
    tok = cur.take()
    if tok.kind == "ident":
        _check_ident(tok)
    node = NodeRef(tok.value, quoted=(tok.kind == "quoted"),
                   quantifier=quantifier, line=tok.line, col=tok.col)
    nxt = cur.peek()
    if nxt is not None and nxt.kind == "creator":
        node.creator = cur.take().value
    return node


def _parse_blocks(cur: _Cursor) -> tuple[list[FlBlock], bool]:
    """Blocks up to end of line; returns (blocks, explicitly_terminated)."""
    blocks: list[FlBlock] = []
    while True:
        modality = None
        tok = cur.peek()
        if tok is not None and tok.kind == "ident" and tok.value in MODALITIES:
            after = cur.peek(1)
            if after is not None and after.kind == "ident":
                modality = cur.take().value
                tok = cur.peek()
        if tok is None or tok.kind != "ident":
            raise cur.error("expected a relation name")
        rel_tok = cur.take()
        relation = _check_ident(rel_tok)
        creator = None
        if cur.peek() is not None and cur.peek().kind == "creator":
            creator = cur.take().value
        if cur.peek() is None or cur.peek().kind != "colon":
            raise cur.error(f"expected ':' after relation {relation!r}")
        cur.take()
        block = FlBlock(relation, [], creator, modality,
                        line=rel_tok.line, col=rel_tok.col)
        while _is_noderef(cur.peek()) or (
                cur.peek() is not None and cur.peek().kind == "ident"
                and cur.peek().value in QUANTIFIERS):
            block.targets.append(_parse_noderef(cur, "relation target"))
        if not block.targets:
            raise cur.error(f"relation {relation!r} has no target")
        blocks.append(block)
        tok = cur.peek()
        if tok is None:
            return blocks, False
        if tok.kind == "semi":
            cur.take()
            if not cur.at_end():
                raise cur.error("content after ';'")
            return blocks, True
        if tok.kind == "comma":
            cur.take()
            continue
        raise cur.error(f"unexpected {tok.value!r} after relation targets")


def _parse_description_line(line: Line) -> tuple[FlDescription, bool]:
    cur = _Cursor(line.tokens, line.number)
    head = _parse_noderef(cur, "description head")
    if cur.at_end():
        return FlDescription(head, indent=line.indent, line=line.number), False
    tok = cur.peek()
    if tok.kind == "semi":
        cur.take()
        if not cur.at_end():
            raise cur.error("content after ';'")
        return FlDescription(head, indent=line.indent, line=line.number), True
    if not _block_start_ahead(cur):
        if tok.kind in ("ident", "quoted"):
            if not head.quoted and head.quantifier is None and "#" not in head.text \
                    and (tok.kind == "quoted" or "#" in tok.value):
                raise UnknownQuantifier(head.text, head.line, head.col)
            raise FlSyntaxError(
                "badly formed identifier (whitespace inside a name?)",
                tok.line, tok.col, reason="spaced-identifier")
        raise cur.error(f"unexpected {tok.value!r} after description head")
    blocks, terminated = _parse_blocks(cur)
    desc = FlDescription(head, blocks, indent=line.indent, line=line.number)
    return desc, terminated


def parse_segment(text: str, errors: list[FlSyntaxError] | None = None
                  ) -> tuple[list[FlDescription], str | None]:
    """Parse one formal segment into top-level descriptions.

    With an ``errors`` list, offending lines are collected and skipped;
    without one the first error raises.
    """
    collect = errors is not None
    top: list[FlDescription] = []
    stack: list[FlDescription] = []
    creator: str | None = None

    def fail(exc: FlSyntaxError) -> None:
        if collect:
            errors.append(exc)
        else:
            raise exc

    for number, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            line = lex_line(raw, number)
        except FlSyntaxError as exc:
            fail(exc)
            continue
        if not line.tokens:
            continue
        try:
            first = line.tokens[0]
            if first.kind == "directive":
                if first.value != "creator":
                    raise FlSyntaxError(f"unknown directive @{first.value}",
                                        number, first.col)
                if top or stack:
                    raise FlSyntaxError("@creator must appear at segment top",
                                        number, first.col)
                if len(line.tokens) != 2 or line.tokens[1].kind != "ident":
                    raise FlSyntaxError("@creator expects one user name",
                                        number, first.col)
                creator = _check_ident(line.tokens[1])
                continue

            while stack and stack[-1].indent >= line.indent:
                stack.pop()

            if _block_start_ahead(_Cursor(line.tokens, number)):
                if not stack:
                    raise FlSyntaxError("relation line without a description",
                                        number, first.col)
                cur = _Cursor(line.tokens, number)
                blocks, terminated = _parse_blocks(cur)
                stack[-1].blocks.extend(blocks)
                if terminated:
                    stack.pop()
                continue

            desc, terminated = _parse_description_line(line)
            if stack:
                stack[-1].children.append(desc)
            else:
                top.append(desc)
            if not terminated:
                stack.append(desc)
        except FlSyntaxError as exc:
            fail(exc)
    return top, creator


def parse(text: str) -> list[FlDescription]:
    """Strict parse of one segment; raises on the first problem."""
    descriptions, _ = parse_segment(text)
    return descriptions


def parse_tolerant(text: str) -> tuple[list[FlDescription], list[FlSyntaxError], str | None]:
    errors: list[FlSyntaxError] = []
    descriptions, creator = parse_segment(text, errors)
    return descriptions, errors, creator


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

INDENT_STEP = 4


def _render_noderef(node: NodeRef) -> str:
    text = f"'{node.text}'" if node.quoted else node.text
    if node.quantifier:
        text = f"{node.quantifier} {text}"
    if node.creator:
        text = f"{text} ({node.creator})"
    return text


def _render_block(block: FlBlock) -> str:
    rel = block.relation
    if block.modality:
        rel = f"{block.modality} {rel}"
    if block.creator:
        rel = f"{rel} ({block.creator})"
    targets = " ".join(_render_noderef(t) for t in block.targets)
    return f"{rel}: {targets}"


def serialize_description(desc: FlDescription, indent: int = 0) -> list[str]:
    line = " " * indent + _render_noderef(desc.head)
    if desc.blocks:
        line += " " + ", ".join(_render_block(b) for b in desc.blocks)
    lines = [line]
    for child in desc.children:
        lines.extend(serialize_description(child, indent + INDENT_STEP))
    return lines


def serialize(descriptions: list[FlDescription], creator: str | None = None) -> str:
    lines: list[str] = []
    if creator:
        lines.append(f"@creator {creator}")
    for desc in descriptions:
        lines.extend(serialize_description(desc))
    return "\n".join(lines) + ("\n" if lines else "")
