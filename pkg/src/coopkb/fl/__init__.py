"""FL notation: lexer, parser, serializer, linter and HTML embedding."""

from .ast import FlBlock, FlDescription, FlDocument, FlPart, InformalPart, NodeRef
from .html import document_from_text, extract_segments, parse_document, serialize_document
from .linter import Diagnostic, lint, lint_text
from .parser import parse, parse_tolerant, serialize

__all__ = [
    "FlBlock", "FlDescription", "FlDocument", "FlPart", "InformalPart",
    "NodeRef", "document_from_text", "extract_segments", "parse_document",
    "serialize_document", "Diagnostic", "lint", "lint_text",
    "parse", "parse_tolerant", "serialize",
]
