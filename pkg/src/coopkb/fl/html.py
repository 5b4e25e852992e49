"""Embedding of FL segments inside HTML documents.

Formal text lives in ``<script language="FL"> ... </script>`` elements;
everything else is informal and ignored. HTML tags inside a segment (bold,
hyperlinks, ...) are blanked to spaces rather than removed, and so is the
document text around the segment, so every token keeps its original line
and column for diagnostics.
"""

from __future__ import annotations

import re

from ..errors import FlSyntaxError, UnterminatedSegment
from .ast import FlDocument, FlPart, InformalPart
from .parser import parse_segment

OPEN_TAG = re.compile(r"<script[^>]*\blanguage\s*=\s*[\"']FL[\"'][^>]*>", re.IGNORECASE)
CLOSE_TAG = re.compile(r"</script\s*>", re.IGNORECASE)
ANY_TAG = re.compile(r"<[^>]*>")


def _blank(text: str) -> str:
    return "".join("\n" if c == "\n" else " " for c in text)


def _strip_inner_tags(chunk: str) -> str:
    return ANY_TAG.sub(lambda m: _blank(m.group(0)), chunk)


def extract_segments(html: str) -> FlDocument:
    """Document skeleton: informal parts interleaved with formal segments.

    Each formal part's text is padded to the full document so parser
    locations match the source file exactly.
    """
    doc = FlDocument()
    pos = 0
    while True:
        m = OPEN_TAG.search(html, pos)
        if m is None:
            if html[pos:]:
                doc.segments.append(InformalPart(html[pos:], pos))
            return doc
        if html[pos:m.start()]:
            doc.segments.append(InformalPart(html[pos:m.start()], pos))
        close = CLOSE_TAG.search(html, m.end())
        if close is None:
            line = html.count("\n", 0, m.start()) + 1
            raise UnterminatedSegment(f"FL segment opened at line {line} is never closed")
        body = _strip_inner_tags(html[m.end():close.start()])
        masked = _blank(html[:m.end()]) + body + _blank(html[close.start():])
        doc.segments.append(FlPart(masked, m.end()))
        pos = close.end()


def document_from_text(text: str, html: bool) -> FlDocument:
    if html:
        return extract_segments(text)
    return FlDocument([FlPart(text, 0)])


def parse_document(doc: FlDocument, tolerant: bool = True
                   ) -> list[FlSyntaxError]:
    """Parse every formal part in place; returns collected errors."""
    errors: list[FlSyntaxError] = []
    for part in doc.formal_parts():
        if tolerant:
            part_errors: list[FlSyntaxError] = []
            part.descriptions, part.creator = parse_segment(part.text, part_errors)
            errors.extend(part_errors)
        else:
            part.descriptions, part.creator = parse_segment(part.text)
    return errors


def serialize_document(doc: FlDocument) -> str:
    """HTML text that extracts and parses back to the same structure.

    Informal parts re-emit verbatim; formal parts re-emit from their parsed
    descriptions inside fresh FL script tags (original whitespace and inner
    presentation tags are not preserved, their structure is).
    """
    from .parser import serialize

    out: list[str] = []
    for segment in doc.segments:
        if isinstance(segment, InformalPart):
            out.append(segment.text)
        else:
            body = serialize(segment.descriptions, segment.creator)
            out.append(f'<script language="FL">\n{body}</script>')
    return "".join(out)
