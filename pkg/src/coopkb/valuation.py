"""Votes, argumentation-shaped scores and score-based filtering.

Scoring default: an object's value is the mean of its votes plus a quarter
of its argument balance, clamped to [-1, 1]. The balance adds the positive
part of each argument child's own value and subtracts the positive part of
each objection child's, recursing over the (acyclic) argumentation graph.
Swap in a different ``Scorer`` to change the policy; the store only records
votes and relations, never derived numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import OutOfRange, UnknownObject, UnknownUser
from .model import Dimension, Quantifier, RelationFamily, Vote
from .ontology import relation_type_subsumes, statement_generalizes
from .seed import seed_id
from .store import Store

ARGUMENT_WEIGHT = 0.25
ARGUMENT_TYPE = seed_id("argument")
OBJECTION_TYPE = seed_id("objection")


@dataclass(frozen=True)
class Score:
    value: float
    voter_count: int
    argument_balance: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "voter_count": self.voter_count,
            "argument_balance": self.argument_balance,
        }


def validate_vote(store: Store, voter: str, object_id: str, dimension: Dimension,
                  value: float) -> Vote:
    if voter not in store.users:
        raise UnknownUser(f"unknown voter {voter}")
    if not store.object_exists(object_id):
        raise UnknownObject(f"unknown vote target {object_id}")
    if not -1.0 <= value <= 1.0:
        raise OutOfRange(f"vote value {value} outside [-1, 1]")
    return Vote(voter, object_id, dimension, float(value))


class Scorer:
    """Default argumentation-aware scorer; stateless per store snapshot."""

    def __init__(self, store: Store, dimension: Dimension):
        self.store = store
        self.dimension = dimension
        self._memo: dict[str, Score] = {}

    def score(self, object_id: str) -> Score:
        if not self.store.object_exists(object_id):
            raise UnknownObject(f"unknown object {object_id}")
        return self._score(object_id, frozenset({object_id}))

    def _score(self, object_id: str, on_path: frozenset[str]) -> Score:
        cached = self._memo.get(object_id)
        if cached is not None:
            return cached
        votes = self.store.votes_on(object_id, self.dimension)
        direct = sum(votes.values()) / len(votes) if votes else 0.0
        balance = 0.0
        for rel in self.store.relations_from(object_id):
            if self.store.family_of(rel.type) is not RelationFamily.ARGUMENTATION:
                continue
            if rel.dst in on_path:  # merged stores may hold residual cycles
                continue
            child = self._score(rel.dst, on_path | {rel.dst}).value
            if relation_type_subsumes(self.store, OBJECTION_TYPE, rel.type):
                balance -= max(0.0, child)
            else:
                balance += max(0.0, child)
        value = _clamp(direct + ARGUMENT_WEIGHT * balance)
        result = Score(value, len(votes), balance)
        self._memo[object_id] = result
        return result


ScorerFactory = Callable[[Store, Dimension], Scorer]


def statement_score(store: Store, object_id: str, dimension: Dimension,
                    scorer_factory: ScorerFactory = Scorer) -> Score:
    return scorer_factory(store, dimension).score(object_id)


def contributor_score(store: Store, user: str, dimension: Dimension,
                      scorer_factory: ScorerFactory = Scorer) -> Score:
    """Voter-weighted mean of the scores of everything the user created."""
    if user not in store.users:
        raise UnknownUser(f"unknown user {user}")
    scorer = scorer_factory(store, dimension)
    weighted = 0.0
    weights = 0.0
    voters_total = 0
    for object_id in _created_by(store, user):
        s = scorer.score(object_id)
        weight = 1.0 + s.voter_count
        weighted += weight * s.value
        weights += weight
        voters_total += s.voter_count
    if weights == 0.0:
        return Score(0.0, 0, 0.0)
    return Score(weighted / weights, voters_total, 0.0)


def _created_by(store: Store, user: str) -> list[str]:
    out = []
    for table in (store.categories, store.statements, store.relations):
        for object_id, obj in table.items():
            if object_id in store.seed_ids:
                continue
            if obj.creator == user:
                out.append(object_id)
    return sorted(out)


# Expressiveness features a statement's body can use; filters can cap them.
FEATURE_NEGATION = "negation"
FEATURE_MODALITY = "modality"
FEATURE_NON_UNIVERSAL = "non-universal-quantifier"
FEATURE_RELATION_ON_STATEMENT = "relation-on-statement"
ALL_FEATURES = frozenset({FEATURE_NEGATION, FEATURE_MODALITY,
                          FEATURE_NON_UNIVERSAL, FEATURE_RELATION_ON_STATEMENT})


def expressiveness_features(store: Store, object_id: str) -> frozenset[str]:
    stmt = store.statements.get(object_id)
    if stmt is None or not stmt.is_formal:
        return frozenset()
    used = set()
    g = stmt.graph
    if g.negated:
        used.add(FEATURE_NEGATION)
    for node in g.nodes:
        if node.modality is not None:
            used.add(FEATURE_MODALITY)
        if node.quantifier not in (Quantifier.EVERY, Quantifier.INDIVIDUAL):
            used.add(FEATURE_NON_UNIVERSAL)
    if any(isinstance(e.src, str) or isinstance(e.dst, str) for e in g.edges):
        used.add(FEATURE_RELATION_ON_STATEMENT)
    return frozenset(used)


@dataclass
class FilterCriteria:
    min_scores: dict[Dimension, float] = field(default_factory=dict)
    arguments_without_objections: bool = False
    creator_metadata: dict[str, str] = field(default_factory=dict)
    allowed_features: frozenset[str] | None = None
    most_specialized_only: bool = False


def filter_objects(store: Store, criteria: FilterCriteria,
                   scorer_factory: ScorerFactory = Scorer) -> list[str]:
    """Objects satisfying every criterion, sorted by id; archived objects
    and the seed never appear."""
    scorers = {dim: scorer_factory(store, dim) for dim in criteria.min_scores}
    selected = []
    for object_id in store.non_archived_object_ids():
        if object_id in store.seed_ids:
            continue
        if not _passes(store, object_id, criteria, scorers):
            continue
        selected.append(object_id)

    if criteria.most_specialized_only:
        selected = _drop_generalized(store, selected)
    return sorted(selected)


def _passes(store: Store, object_id: str, criteria: FilterCriteria,
            scorers: dict[Dimension, Scorer]) -> bool:
    for dim, minimum in criteria.min_scores.items():
        if scorers[dim].score(object_id).value < minimum:
            return False
    if criteria.arguments_without_objections:
        if not _has_unobjected_arguments(store, object_id):
            return False
    if criteria.creator_metadata:
        obj = store.get_object(object_id)
        creator = store.users.get(getattr(obj, "creator", ""))
        if creator is None:
            return False
        for key, expected in criteria.creator_metadata.items():
            if creator.metadata.get(key) != expected:
                return False
    if criteria.allowed_features is not None:
        if not expressiveness_features(store, object_id) <= criteria.allowed_features:
            return False
    return True


def _argumentation_children(store: Store, object_id: str, base_type: str) -> list[str]:
    out = []
    for rel in store.relations_from(object_id):
        if relation_type_subsumes(store, base_type, rel.type):
            out.append(rel.dst)
    return out


def _has_unobjected_arguments(store: Store, object_id: str) -> bool:
    arguments = _argumentation_children(store, object_id, ARGUMENT_TYPE)
    if not arguments:
        return False
    return all(not _argumentation_children(store, a, OBJECTION_TYPE) for a in arguments)


def _drop_generalized(store: Store, selected: list[str]) -> list[str]:
    """Drop any statement strictly generalized by another selected one."""
    statements = [o for o in selected if o in store.statements]
    dropped = set()
    for a in statements:
        for b in statements:
            if a == b or a in dropped:
                continue
            if statement_generalizes(store, a, b) and not statement_generalizes(store, b, a):
                dropped.add(a)
    return [o for o in selected if o not in dropped]


def _clamp(x: float) -> float:
    return max(-1.0, min(1.0, x))
