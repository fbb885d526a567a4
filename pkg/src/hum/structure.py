"""Defeasible model-structure decisions.

When a second report's evidence would feed a consequent that another report
already supports, the relationship between the two evidence sources is
decided from their source distributions: if the chance that both trace back
to the same named agency is small, the new evidence is attached as an
independent source, conditioned on a retractable structure assumption, and a
monitor is installed for the possibility that the sources turn out to be the
same. Asserting that fact fires the monitor: the assumption is retracted and
the first report's evidence source is shared with the second report.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .atms import DISTRIBUTION, Assumption
from .errors import AtmsError, ModelError
from .probability import ChooseSet
from .terms import Term, term_slug, term_to_text

if TYPE_CHECKING:
    from .model import Engine, InstanceRecord

SHARED_THRESHOLD = 0.5
DISTINCT_BY_DEFINITION = "ind"  # two "independent" sources never corefer


@dataclass(eq=False)
class EvidenceAttachment:
    record: "InstanceRecord"
    choose_set: ChooseSet | None
    value_members: dict[str, Assumption]
    condition: Assumption | None = None
    shared_source: "EvidenceAttachment | None" = None

    def source_members(self) -> dict[str, Assumption]:
        att = self
        while att.choose_set is None:
            att = att.shared_source
        return att.value_members


@dataclass(eq=False)
class StructureAssumption:
    assumption: Assumption
    statement: Term
    status: str = "assumed"


@dataclass(eq=False)
class Monitor:
    trigger: Term
    structure_assumption: StructureAssumption
    existing: EvidenceAttachment
    incoming: EvidenceAttachment
    fired: bool = False


class StructureManager:
    def __init__(self, engine: "Engine"):
        self.engine = engine
        self.attachments: dict[Term, EvidenceAttachment] = {}
        self.monitors: list[Monitor] = []
        self.assumptions: list[StructureAssumption] = []
        self._counter = 0

    # -- evidence attachment ------------------------------------------------

    def has_attachment(self, record: "InstanceRecord") -> bool:
        return record.term in self.attachments

    def attach_evidence(self, record: "InstanceRecord", weights: dict[str, float]) -> None:
        existing = self._find_conflict(record)
        if existing is None:
            self._attach_plain(record, weights)
        else:
            self._resolve(existing, record, weights)

    def _find_conflict(self, record: "InstanceRecord") -> EvidenceAttachment | None:
        for child in record.children:
            for parent in child.parents:
                if parent is not record and parent.term in self.attachments:
                    return self.attachments[parent.term]
        return None

    def _attach_plain(self, record: "InstanceRecord", weights: dict[str, float],
                      condition: Assumption | None = None) -> EvidenceAttachment:
        network = self.engine.network
        members: list[tuple[Assumption, float]] = []
        value_members: dict[str, Assumption] = {}
        for value in record.var_class.values:
            name = (f"a_{value}" if isinstance(record.term, str)
                    else f"a_{value}_{term_slug(record.term)}")
            assumption = network.create_assumption(DISTRIBUTION, weights[value], name)
            members.append((assumption, weights[value]))
            value_members[value] = assumption
        choose_set = self.engine.space.register_choose(members, tag=("marginal", record.term))
        for value, assumption in value_members.items():
            antecedents = [assumption] if condition is None else [assumption, condition]
            network.justify(antecedents, record.node(value))
        attachment = EvidenceAttachment(record=record, choose_set=choose_set,
                                        value_members=value_members, condition=condition)
        self.attachments[record.term] = attachment
        record.marginal_set = choose_set
        record.marginal_weights = dict(weights)
        return attachment

    # -- conflict resolution -------------------------------------------------

    def _resolve(self, existing: EvidenceAttachment, record: "InstanceRecord",
                 weights: dict[str, float]) -> None:
        t1, t2 = existing.record.term, record.term
        if self._same_fact_asserted(t1, t2):
            self._attach_shared(existing, record, weights)
            return
        p_shared = self._coreference_probability(existing.record, record)
        if p_shared >= SHARED_THRESHOLD:
            self._attach_shared(existing, record, weights)
            return
        self._counter += 1
        statement = ("independent", "evidence-for", t1, t2)
        structure_assumption = StructureAssumption(
            assumption=self.engine.space.register_structure(f"a_{self._counter}"),
            statement=statement)
        self.assumptions.append(structure_assumption)
        incoming = self._attach_plain(record, weights,
                                      condition=structure_assumption.assumption)
        self.engine.emit("assuming", term=term_to_text(statement))
        if p_shared > 0:
            self.install_monitor(("same", "evidence-for", t1, t2),
                                 structure_assumption, existing, incoming)

    def _coreference_probability(self, first: "InstanceRecord",
                                 second: "InstanceRecord") -> float:
        d1 = self._source_distribution(first, second)
        d2 = self._source_distribution(second, first)
        shared_values = (set(d1) & set(d2)) - {DISTINCT_BY_DEFINITION}
        return sum(d1[v] * d2[v] for v in shared_values)

    def _source_distribution(self, record: "InstanceRecord",
                             other: "InstanceRecord") -> dict[str, float]:
        source_term = ("source", record.term)
        source = self.engine.instances.get(source_term)
        if source is None or source.marginal_weights is None:
            raise ModelError(
                f"cannot relate evidence for {term_to_text(record.term)} and "
                f"{term_to_text(other.term)}: declare a marginal on "
                f"{term_to_text(source_term)} first")
        total = sum(source.marginal_weights.values())
        return {v: w / total for v, w in source.marginal_weights.items()}

    def _attach_shared(self, existing: EvidenceAttachment, record: "InstanceRecord",
                       weights: dict[str, float]) -> None:
        attachment = EvidenceAttachment(record=record, choose_set=None,
                                        value_members={}, shared_source=existing)
        self._share_justifications(existing, record)
        self.attachments[record.term] = attachment
        record.marginal_weights = dict(weights)

    def _share_justifications(self, source: EvidenceAttachment,
                              record: "InstanceRecord") -> None:
        members = source.source_members()
        for value in record.var_class.values:
            assumption = members.get(value)
            if assumption is None:
                raise ModelError(
                    f"cannot share evidence between {term_to_text(source.record.term)} "
                    f"and {term_to_text(record.term)}: value sets differ")
            self.engine.network.justify([assumption], record.node(value))

    # -- monitors and retraction ----------------------------------------------

    def install_monitor(self, trigger: Term, structure_assumption: StructureAssumption,
                        existing: EvidenceAttachment,
                        incoming: EvidenceAttachment) -> Monitor:
        if any(self._symmetric_match(m.trigger, trigger) for m in self.monitors):
            raise AtmsError(f"monitor already installed on {term_to_text(trigger)}")
        monitor = Monitor(trigger=trigger, structure_assumption=structure_assumption,
                          existing=existing, incoming=incoming)
        self.monitors.append(monitor)
        self.engine.emit("monitoring", term=term_to_text(trigger))
        return monitor

    def is_structural_fact(self, term: Term) -> bool:
        return (isinstance(term, tuple) and len(term) == 4
                and term[0] == "same" and term[1] == "evidence-for")

    def on_fact(self, term: Term) -> None:
        for monitor in self.monitors:
            if not monitor.fired and self._symmetric_match(monitor.trigger, term):
                self.restructure_shared_evidence(monitor)

    def restructure_shared_evidence(self, monitor: Monitor) -> None:
        if monitor.fired:
            raise AtmsError(
                f"monitor on {term_to_text(monitor.trigger)} already fired")
        monitor.fired = True
        self._retract(monitor.structure_assumption)
        self._share_justifications(monitor.existing, monitor.incoming.record)
        monitor.incoming.shared_source = monitor.existing

    def retract(self, key: Term | str) -> StructureAssumption:
        """Retract by statement term or by assumption display name."""
        for sa in self.assumptions:
            if sa.statement == key or sa.assumption.display_name == key:
                self._retract(sa)
                return sa
        raise ModelError(f"no structure assumption matches {key!r}")

    def _retract(self, structure_assumption: StructureAssumption) -> None:
        if structure_assumption.status == "retracted":
            return
        self.engine.emit("retracting",
                         term=term_to_text(structure_assumption.statement))
        self.engine.space.retract_assumption(structure_assumption.assumption)
        structure_assumption.status = "retracted"

    def _same_fact_asserted(self, t1: Term, t2: Term) -> bool:
        for fact in (("same", "evidence-for", t1, t2), ("same", "evidence-for", t2, t1)):
            node = self.engine.network.nodes.get(fact)
            if node is not None and node.is_premise:
                return True
        return False

    @staticmethod
    def _symmetric_match(a: Term, b: Term) -> bool:
        return a == b or (a[0], a[1], a[3], a[2]) == b
