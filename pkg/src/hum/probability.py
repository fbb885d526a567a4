"""Numeric interpretation of labels.

Selected assumptions are grouped into choose sets, each representing one
(conditional) probability distribution: exactly one member of every set holds
in any world, with normalized weight. Structure assumptions hold in every
world until retracted. A node's probability is the weight of consistent
worlds satisfying its label, normalized by the weight of all consistent
worlds.

The evaluator works symbolically on the label: it conditions the label DNF
and the nogood constraints on one choose set at a time (Shannon expansion),
memoizing on the residual formula. Worst-case cost is exponential in the
number of interacting choose sets; exactness is guarded by the brute-force
oracle in :mod:`hum.oracle`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .atms import DISTRIBUTION, STRUCTURE, Assumption, Env, Network, Node
from .errors import AtmsError, ContradictoryEvidenceError
from .terms import Term


@dataclass(eq=False)
class ChooseSet:
    id: int
    members: list[tuple[Assumption, float]]
    tag: Term

    @property
    def total(self) -> float:
        return sum(w for _, w in self.members)

    def normalized(self) -> list[tuple[int, float]]:
        total = self.total
        return [(a.id, w / total) for a, w in self.members]


class ProbabilitySpace:
    """World semantics over a network: choose sets plus structure assumptions."""

    def __init__(self, network: Network):
        self.network = network
        self.choose_sets: list[ChooseSet] = []
        self.structure_assumptions: list[Assumption] = []
        self.retracted: set[int] = set()
        self._next_set_id = 1

    # -- registration ---------------------------------------------------

    def register_choose(self, members: Sequence[tuple[Assumption, float]], tag: Term) -> ChooseSet:
        if not members:
            raise AtmsError("a choose set needs at least one member")
        for a, w in members:
            if a.kind != DISTRIBUTION:
                raise AtmsError(f"{a.display_name} is not a distribution-element assumption")
            if a.owner is not None:
                raise AtmsError(f"{a.display_name} already belongs to a choose set")
            if w < 0:
                raise AtmsError(f"negative weight for {a.display_name}")
        if sum(w for _, w in members) <= 0:
            raise AtmsError("choose set weights must sum to a positive value")
        cs = ChooseSet(id=self._next_set_id, members=[(a, float(w)) for a, w in members], tag=tag)
        self._next_set_id += 1
        for a, w in cs.members:
            a.owner = cs
            a.weight = w
        self.choose_sets.append(cs)
        for i, (a, _) in enumerate(cs.members):
            for b, _ in cs.members[i + 1:]:
                self.network.add_nogood({a.id, b.id})
        return cs

    def register_structure(self, display_name: str) -> Assumption:
        a = self.network.create_assumption(STRUCTURE, display_name=display_name)
        self.structure_assumptions.append(a)
        return a

    def retract_assumption(self, assumption: Assumption) -> None:
        if assumption.kind != STRUCTURE:
            raise AtmsError(
                f"{assumption.display_name} is a distribution element; "
                "condition on evidence instead of retracting")
        if assumption.id in self.retracted:
            return
        self.retracted.add(assumption.id)
        self.network.add_nogood({assumption.id})

    # -- evaluation -------------------------------------------------------

    def evaluate_label_weight(self, label: Iterable[Env]) -> float:
        return _Evaluator(self).mass(label)

    def probability_of(self, node: Node) -> float:
        evaluator = _Evaluator(self)
        denominator = evaluator.mass([frozenset()])
        if denominator <= 0.0:
            raise ContradictoryEvidenceError(self._minimal_nogood_names())
        return evaluator.mass(node.label) / denominator

    def _minimal_nogood_names(self) -> tuple[str, ...]:
        if not self.network.nogoods:
            return ()
        smallest = min(self.network.nogoods, key=lambda g: (len(g), tuple(sorted(g))))
        return tuple(sorted(self.network.assumptions[a].display_name for a in smallest))


def batch_probabilities(space: ProbabilitySpace,
                        nodes: Iterable[Node]) -> dict[Node, float | None]:
    """Posterior per node sharing one evaluation pass; None where undefined."""
    evaluator = _Evaluator(space)
    denominator = evaluator.mass([frozenset()])
    out: dict[Node, float | None] = {}
    for node in nodes:
        if denominator <= 0.0 or node.is_contradiction:
            out[node] = None
        else:
            out[node] = evaluator.mass(node.label) / denominator
    return out


_SAT = None  # marker: the query DNF is already satisfied


class _Evaluator:
    """One evaluation pass; memo is only valid for a fixed network state."""

    def __init__(self, space: ProbabilitySpace):
        self.sets = [(frozenset(a for a, _ in cs.normalized()), cs.normalized())
                     for cs in space.choose_sets]
        self.set_of: dict[int, int] = {}
        for idx, (ids, _) in enumerate(self.sets):
            for aid in ids:
                self.set_of[aid] = idx
        self.active = frozenset(a.id for a in space.structure_assumptions
                                if a.id not in space.retracted)
        self.dead = frozenset(space.retracted)
        self.owned = frozenset(self.set_of) | self.active | self.dead
        self.nogoods = self._condition_base(space.network.nogoods)
        self._memo: dict = {}

    def _condition_base(self, nogoods: Iterable[Env]) -> frozenset[Env] | None:
        """Apply structure-assumption truth values; None means no world is consistent."""
        out = set()
        for g in nogoods:
            if g & self.dead or not g <= self.owned:
                continue  # contains a false conjunct: never violated
            g2 = g - self.active
            if not g2:
                return None
            out.add(g2)
        return frozenset(out)

    def mass(self, envs: Iterable[Env]) -> float:
        if self.nogoods is None:
            return 0.0
        dnf = set()
        for e in envs:
            if e & self.dead or not e <= self.owned:
                continue  # requires an assumption that holds in no world
            dnf.add(e - self.active)
        if not dnf:
            return 0.0
        if frozenset() in dnf:
            return self._rec(_SAT, self.nogoods)
        return self._rec(frozenset(dnf), self.nogoods)

    def _rec(self, dnf, nogoods: frozenset[Env]) -> float:
        if dnf is not _SAT and not dnf:
            return 0.0
        mentioned = set()
        if dnf is not _SAT:
            for e in dnf:
                mentioned |= e
        for g in nogoods:
            mentioned |= g
        if not mentioned:
            return 1.0 if dnf is _SAT else 0.0
        key = (dnf, nogoods)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        idx = min(self.set_of[aid] for aid in mentioned)
        ids, weighted = self.sets[idx]
        total = 0.0
        for aid, w in weighted:
            if w == 0.0:
                continue
            others = ids - {aid}
            branch_nogoods = set()
            violated = False
            for g in nogoods:
                if g & others:
                    continue
                g2 = g - {aid}
                if not g2:
                    violated = True
                    break
                branch_nogoods.add(g2)
            if violated:
                continue
            if dnf is _SAT:
                branch_dnf = _SAT
            else:
                reduced = set()
                satisfied = False
                for e in dnf:
                    if e & others:
                        continue
                    e2 = e - {aid}
                    if not e2:
                        satisfied = True
                        break
                    reduced.add(e2)
                branch_dnf = _SAT if satisfied else frozenset(reduced)
            total += w * self._rec(branch_dnf, frozenset(branch_nogoods))
        self._memo[key] = total
        return total
