"""Diagnostics over FL documents, in four classes.

lexical      malformed identifiers, stray characters, unknown creator prefixes
syntactic    lines the parser cannot shape into descriptions
ontological  unknown or ambiguous relation names, signature violations,
             duplicate blocks, self-specialization
indentation  mixed tabs/spaces, inconsistent child widths, nesting under a
             line that cannot take children

Output is machine-parseable, one diagnostic per line:
``file:line:col: class: message``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import FlSyntaxError
from ..model import CategoryKind, RelationFamily
from ..store import Store
from .ast import FlDescription, FlDocument, NodeRef
from .html import document_from_text, parse_document
from .parser import _block_start_ahead, _Cursor, lex_line

LEXICAL_REASONS = {"bad-char", "bad-identifier", "spaced-identifier"}


@dataclass
class Diagnostic:
    cls: str  # lexical | syntactic | ontological | indentation
    line: int
    col: int
    message: str
    severity: str = "error"
    file: str = "<input>"

    def format(self) -> str:
        return f"{self.file}:{self.line}:{self.col}: {self.cls}: {self.message}"


def lint(document: FlDocument, store: Store, file: str = "<input>") -> list[Diagnostic]:
    diagnostics: list[Diagnostic] = []
    needs_parse = any(not p.descriptions for p in document.formal_parts())
    parse_errors = parse_document(document, tolerant=True) if needs_parse else []
    for exc in parse_errors:
        cls = "lexical" if exc.reason in LEXICAL_REASONS else "syntactic"
        diagnostics.append(Diagnostic(cls, exc.line, exc.col, exc.detail))

    resolver = _RelationResolver(store)
    for part in document.formal_parts():
        for desc in part.descriptions:
            _check_description(desc, store, resolver, diagnostics, top_level=True)
        diagnostics.extend(_indentation_pass(part.text))

    for d in diagnostics:
        d.file = file
    diagnostics.sort(key=lambda d: (d.line, d.col, d.cls))
    return diagnostics


def lint_text(text: str, store: Store, html: bool = False,
              file: str = "<input>") -> list[Diagnostic]:
    return lint(document_from_text(text, html), store, file)


class _RelationResolver:
    def __init__(self, store: Store):
        self.store = store
        self.by_name: dict[str, list[str]] = {}
        for cid, cat in store.categories.items():
            if cat.kind is CategoryKind.RELATION:
                self.by_name.setdefault(cat.id.name, []).append(cid)

    def resolve(self, name: str) -> tuple[str | None, list[str]]:
        if "#" in name:
            cat = self.store.categories.get(name)
            if cat is not None and cat.kind is CategoryKind.RELATION:
                return name, [name]
            return None, []
        candidates = sorted(self.by_name.get(name, []))
        if len(candidates) == 1:
            return candidates[0], candidates
        return None, candidates


def _node_kind(node: NodeRef) -> str:
    # Quoted texts are informal statements; a quantified head denotes a
    # formal statement; bare identifiers name categories.
    if node.quoted or node.quantifier is not None:
        return "statement"
    return "category"


def _check_description(desc: FlDescription, store: Store,
                       resolver: _RelationResolver,
                       out: list[Diagnostic], top_level: bool) -> None:
    _check_prefix(desc.head, store, out)
    if top_level and not desc.blocks and not desc.children:
        out.append(Diagnostic("syntactic", desc.line, desc.head.col,
                              f"description {desc.head.text!r} carries no relations",
                              severity="warning"))
    seen_pairs: set[tuple[str, str]] = set()
    for block in desc.blocks:
        type_id, candidates = resolver.resolve(block.relation)
        if type_id is None:
            if candidates:
                out.append(Diagnostic(
                    "ontological", block.line, block.col,
                    f"ambiguous relation name {block.relation!r}: "
                    + ", ".join(candidates)))
            else:
                out.append(Diagnostic(
                    "ontological", block.line, block.col,
                    f"unknown relation type {block.relation!r}"))
        family = store.family_of(type_id) if type_id else None
        signature = store.relation_traits(type_id)[2] if type_id else ("any", "any")
        head_kind = _node_kind(desc.head)
        if type_id and signature[0] != "any" and head_kind != signature[0]:
            out.append(Diagnostic(
                "ontological", block.line, block.col,
                f"{block.relation} expects a {signature[0]} source, "
                f"got {head_kind} {desc.head.text!r}"))
        for target in block.targets:
            _check_prefix(target, store, out)
            target_kind = _node_kind(target)
            if type_id and signature[1] != "any" and target_kind != signature[1]:
                out.append(Diagnostic(
                    "ontological", target.line, target.col,
                    f"{block.relation} expects a {signature[1]} target, "
                    f"got {target_kind} {target.text!r}"))
            if family is RelationFamily.SPECIALIZATION and not target.quoted \
                    and not desc.head.quoted and target.text == desc.head.text:
                out.append(Diagnostic(
                    "ontological", target.line, target.col,
                    f"{desc.head.text!r} cannot specialize itself"))
            pair = (block.relation, target.text)
            if pair in seen_pairs:
                out.append(Diagnostic(
                    "ontological", target.line, target.col,
                    f"duplicate block {block.relation}: {target.text!r}",
                    severity="warning"))
            seen_pairs.add(pair)
    for child in desc.children:
        _check_description(child, store, resolver, out, top_level=False)


def _check_prefix(node: NodeRef, store: Store, out: list[Diagnostic]) -> None:
    if node.quoted or "#" not in node.text:
        return
    prefix = node.text.split("#", 1)[0]
    if prefix not in store.users:
        out.append(Diagnostic("lexical", node.line, node.col,
                              f"unknown creator prefix {prefix!r} in {node.text!r}"))


def _indentation_pass(text: str) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    # per open description: [head indent, indent of its first child or None]
    stack: list[list] = []
    prev_relation_indent: int | None = None
    prev_terminated: tuple[int, int] | None = None  # (indent, line)

    for number, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        indent_chars = raw[: len(raw) - len(raw.lstrip(" \t"))]
        if " " in indent_chars and "\t" in indent_chars:
            out.append(Diagnostic("indentation", number, 1,
                                  "mixed tabs and spaces in indentation",
                                  severity="warning"))
        try:
            line = lex_line(raw, number)
        except FlSyntaxError:
            continue
        if not line.tokens or line.tokens[0].kind == "directive":
            continue
        is_relation_line = _block_start_ahead(_Cursor(line.tokens, number))
        terminated = line.tokens[-1].kind == "semi"

        if not is_relation_line:
            if prev_relation_indent is not None and line.indent > prev_relation_indent:
                out.append(Diagnostic(
                    "indentation", number, 1,
                    "node indented under a relation line, which cannot take children"))
            if prev_terminated is not None and line.indent > prev_terminated[0]:
                out.append(Diagnostic(
                    "indentation", number, 1,
                    f"node indented under the description closed at line "
                    f"{prev_terminated[1]}"))
            while stack and stack[-1][0] >= line.indent:
                stack.pop()
            if stack:
                if stack[-1][1] is None:
                    stack[-1][1] = line.indent
                elif stack[-1][1] != line.indent:
                    out.append(Diagnostic(
                        "indentation", number, 1,
                        f"inconsistent indent width: expected column "
                        f"{stack[-1][1] + 1}", severity="warning"))
            if terminated:
                prev_terminated = (line.indent, number)
            else:
                stack.append([line.indent, None])
                prev_terminated = None
            prev_relation_indent = None
        else:
            prev_relation_indent = line.indent
            if terminated:
                prev_terminated = (stack[-1][0], number) if stack else None
                if stack:
                    stack.pop()
    return out
