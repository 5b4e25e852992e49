"""Exception taxonomy shared across the package.

Every error carries a stable ``code`` string so the HTTP layer and the CLI
can map failures without string matching on messages.
"""

from __future__ import annotations


class KbError(Exception):
    """Base class for all knowledge-base errors."""

    code = "kb_error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__


class BadIdentifier(KbError):
    code = "bad_identifier"


class DuplicateUser(KbError):
    code = "duplicate_user"


class DuplicateId(KbError):
    code = "duplicate_id"


class UnknownUser(KbError):
    code = "unknown_user"


class UnknownObject(KbError):
    code = "unknown_object"


class AmbiguousName(KbError):
    """Unprefixed name matching several categories; carries the candidates."""

    code = "ambiguous_name"

    def __init__(self, name: str, candidates: list[str]):
        super().__init__(f"ambiguous name {name!r}: {', '.join(candidates)}")
        self.name = name
        self.candidates = candidates


class NoAttachment(KbError):
    code = "no_attachment"


class CycleDetected(KbError):
    code = "cycle_detected"


class DanglingConnection(KbError):
    code = "dangling_connection"


class SignatureViolation(KbError):
    code = "signature_violation"


class OutOfRange(KbError):
    code = "out_of_range"


class InvalidPayload(KbError):
    code = "invalid_payload"


class MalformedRecord(KbError):
    code = "malformed_record"


class CorruptJournal(KbError):
    code = "corrupt_journal"


class CorruptSnapshot(KbError):
    code = "corrupt_snapshot"


class UnterminatedSegment(KbError):
    code = "unterminated_segment"


class FlSyntaxError(KbError):
    """Parse failure in FL text; location is 1-based."""

    code = "fl_syntax"

    def __init__(self, message: str, line: int, col: int, reason: str = "syntax"):
        super().__init__(f"{line}:{col}: {message}")
        self.detail = message
        self.line = line
        self.col = col
        # reason disambiguates lint classes: "syntax", "spaced-identifier", ...
        self.reason = reason


class UnknownQuantifier(FlSyntaxError):
    code = "unknown_quantifier"

    def __init__(self, token: str, line: int, col: int):
        super().__init__(f"unknown quantifier {token!r}", line, col, reason="quantifier")
        self.token = token
