"""Brute-force reference semantics.

Enumerates every world (Cartesian product of choose sets, plus all active
structure assumptions), runs a least-fixpoint Horn closure over the
justifications, and computes conditional probabilities by summing world
weights. Deliberately naive and fully independent of the label propagation
in :mod:`hum.atms`: it never reads a label.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import ContradictoryEvidenceError, HumError
from .terms import Term

WORLD_LIMIT = 10 ** 6


@dataclass
class ModelSnapshot:
    """Frozen structural view of a network + probability space."""

    node_terms: list[Term]
    node_index: dict[Term, int]
    rules: list[tuple[tuple[int, ...], int]]  # (antecedent node idxs, consequent idx)
    premises: list[int]
    contradictions: frozenset[int]
    assumption_node: dict[int, int]  # assumption id -> node idx
    choose_sets: list[list[tuple[int, float]]]  # (assumption id, normalized weight)
    active_structure: frozenset[int]
    nogoods: list[frozenset[int]]

    @property
    def world_count(self) -> int:
        return math.prod(len(cs) for cs in self.choose_sets) if self.choose_sets else 1


def take_snapshot(network, space) -> ModelSnapshot:
    node_terms = list(network.nodes)
    node_index = {t: i for i, t in enumerate(node_terms)}
    rules = []
    for just in network.justifications:
        antecedents = tuple(node_index[a.term] for a in just.antecedents)
        rules.append((antecedents, node_index[just.consequent.term]))
    premises = [node_index[n.term] for n in network.nodes.values() if n.is_premise]
    contradictions = frozenset(node_index[n.term] for n in network.nodes.values()
                               if n.is_contradiction)
    assumption_node = {a.id: node_index[a.node.term] for a in network.assumptions.values()}
    choose_sets = []
    for cs in space.choose_sets:
        total = cs.total
        choose_sets.append([(a.id, w / total) for a, w in cs.members])
    active = frozenset(a.id for a in space.structure_assumptions
                       if a.id not in space.retracted)
    return ModelSnapshot(
        node_terms=node_terms,
        node_index=node_index,
        rules=rules,
        premises=premises,
        contradictions=contradictions,
        assumption_node=assumption_node,
        choose_sets=choose_sets,
        active_structure=active,
        nogoods=[frozenset(g) for g in network.nogoods],
    )


def horn_closure(snapshot: ModelSnapshot, true_assumption_ids: frozenset[int]) -> set[int]:
    """Least fixpoint of the justifications given which assumptions hold."""
    true_nodes = set(snapshot.premises)
    for aid in true_assumption_ids:
        idx = snapshot.assumption_node.get(aid)
        if idx is not None:
            true_nodes.add(idx)
    changed = True
    while changed:
        changed = False
        for antecedents, consequent in snapshot.rules:
            if consequent not in true_nodes and all(a in true_nodes for a in antecedents):
                true_nodes.add(consequent)
                changed = True
    return true_nodes


def enumerate_worlds(snapshot: ModelSnapshot):
    """Yield (selected assumption ids, weight, consistent) for every world."""
    if snapshot.world_count > WORLD_LIMIT:
        raise HumError(
            f"oracle world bound exceeded: {snapshot.world_count} > {WORLD_LIMIT}")
    for combo in itertools.product(*snapshot.choose_sets):
        selected = frozenset(aid for aid, _ in combo)
        weight = math.prod(w for _, w in combo)
        extended = selected | snapshot.active_structure
        consistent = not any(g <= extended for g in snapshot.nogoods)
        yield extended, weight, consistent


def all_probabilities(snapshot: ModelSnapshot) -> dict[Term, float]:
    """Posterior for every node, computed in one pass over the worlds."""
    numerators = [0.0] * len(snapshot.node_terms)
    denominator = 0.0
    for extended, weight, consistent in enumerate_worlds(snapshot):
        if not consistent or weight == 0.0:
            continue
        true_nodes = horn_closure(snapshot, extended)
        if true_nodes & snapshot.contradictions:
            continue
        denominator += weight
        for idx in true_nodes:
            numerators[idx] += weight
    if denominator <= 0.0:
        raise ContradictoryEvidenceError(())
    return {term: numerators[i] / denominator for i, term in enumerate(snapshot.node_terms)}


def oracle_probability(snapshot: ModelSnapshot, term: Term) -> float:
    if term not in snapshot.node_index:
        raise HumError(f"oracle: unknown node term {term!r}")
    return all_probabilities(snapshot)[term]
