from __future__ import annotations

import pytest

from coopkb import KnowledgeBase
from coopkb.seed import seed_id

SUBTYPE = seed_id("subtype")
EXT_GEN = seed_id("extended_generalization")
AGENT = seed_id("agent")
ARGUMENT = seed_id("argument")
OBJECTION = seed_id("objection")
CORRECTIVE_RESTRICTION = seed_id("corrective_restriction")


@pytest.fixture
def kb() -> KnowledgeBase:
    return KnowledgeBase("t1")


@pytest.fixture
def bird_kb() -> KnowledgeBase:
    """Users wn/john/joe plus a small bird ontology."""
    kb = KnowledgeBase("t1")
    for name in ("wn", "john", "joe"):
        kb.register_user(name)
    kb.add_category("wn#bird", "wn", [(SUBTYPE, "kb#entity")])
    kb.add_category("wn#sparrow", "wn", [(SUBTYPE, "wn#bird")])
    kb.add_category("wn#healthy_french_bird", "wn", [(SUBTYPE, "wn#bird")])
    kb.add_category("wn#flight", "wn", [(SUBTYPE, "kb#process")])
    return kb


@pytest.fixture
def paris_kb() -> KnowledgeBase:
    kb = KnowledgeBase("t1")
    kb.register_user("pm")
    kb.add_category("pm#Paris", "pm", [(SUBTYPE, "kb#entity")])
    kb.add_category("pm#Paris_between_1950_and_1960", "pm",
                    [(seed_id("specialization"), "pm#Paris")])
    kb.add_category("pm#Paris_in_1951", "pm",
                    [(seed_id("specialization"), "pm#Paris_between_1950_and_1960")])
    return kb
