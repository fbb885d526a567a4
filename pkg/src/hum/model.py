"""The modeling layer: variable classes, relations, marginals, instances.

Declarations compile incrementally into the truth-maintenance network and the
probability space. A variable class with logical variables, e.g.
``(draw ?n)``, is a schema; instantiating a ground term such as ``(draw 1)``
creates one node per value, installs pairwise value exclusion against the
contradiction node, and applies every matching relation schema — creating a
fresh per-instance choose set for each stochastic rule and a plain
justification for each deterministic one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .atms import DISTRIBUTION, Assumption, Network, Node, _env_sort_key
from .errors import ModelError
from .probability import ChooseSet, ProbabilitySpace
from .structure import StructureManager
from .terms import (Term, alpha_canon, is_ground, term_slug, term_to_text,
                    term_variables, unify)

MASS_TOLERANCE = 1e-9


@dataclass(eq=False)
class Event:
    kind: str
    data: dict

    def as_dict(self) -> dict:
        return {"kind": self.kind, **self.data}


@dataclass(eq=False)
class VariableClass:
    pattern: Term
    values: list[str]

    @property
    def is_schema(self) -> bool:
        return bool(term_variables(self.pattern))


@dataclass(eq=False)
class RelationSchema:
    id: int
    parent: VariableClass
    child: VariableClass
    rules: dict[str, dict[str, float]]  # parent value -> full child distribution


@dataclass(eq=False)
class InstanceRecord:
    term: Term
    var_class: VariableClass
    value_nodes: dict[str, Node]
    parents: list["InstanceRecord"] = field(default_factory=list)
    children: list["InstanceRecord"] = field(default_factory=list)
    marginal_weights: dict[str, float] | None = None
    marginal_set: ChooseSet | None = None

    def node(self, value: str) -> Node:
        return self.value_nodes[value]


class Engine:
    """One modeling session: network, probability space, structure decisions."""

    def __init__(self) -> None:
        self.network = Network()
        self.network.listener = self
        self.space = ProbabilitySpace(self.network)
        self.contradiction = self.network.create_node("contradiction")
        self.network.declare_contradiction(self.contradiction)
        self.classes: dict[Term, VariableClass] = {}  # keyed by alpha-canonical pattern
        self.instances: dict[Term, InstanceRecord] = {}
        self.relations: list[RelationSchema] = []
        self.structure = StructureManager(self)
        self.events: list[Event] = []
        self._applied: set[tuple[int, Term, Term]] = set()

    # -- events ---------------------------------------------------------

    def emit(self, kind: str, **data) -> None:
        self.events.append(Event(kind=kind, data=data))

    def take_events(self) -> list[Event]:
        events, self.events = self.events, []
        seen: set[Term] = set()
        kept: list[Event] = []
        for ev in reversed(events):  # keep only the final label per node
            if ev.kind == "label-changed":
                if ev.data["term"] in seen:
                    continue
                seen.add(ev.data["term"])
            kept.append(ev)
        kept.reverse()
        return kept

    def _on_network_event(self, kind: str, data: dict) -> None:
        if kind == "nogood-added":
            names = sorted(self.network.assumptions[a].display_name
                           for a in data["environment"])
            self.emit("nogood-added", environment=names)
        elif kind == "label-changed":
            node = data["node"]
            self.emit("label-changed", term=term_to_text(node.term),
                      label=self.label_names(node))

    def label_names(self, node: Node) -> list[list[str]]:
        envs = sorted(node.label, key=_env_sort_key)
        return [sorted(self.network.assumptions[a].display_name for a in env)
                for env in envs]

    # -- declarations -----------------------------------------------------

    def declare_variable(self, pattern: Term, values: list[str]) -> VariableClass:
        if not values:
            raise ModelError("a variable needs at least one value")
        if len(set(values)) != len(values):
            raise ModelError(f"duplicate values in {term_to_text(pattern)}")
        if not all(isinstance(v, str) and not v.startswith("?") for v in values):
            raise ModelError("variable values must be plain symbols")
        variables = term_variables(pattern)
        if len(set(variables)) != len(variables):
            raise ModelError("pattern variables must be distinct")
        key = alpha_canon(pattern)
        if key in self.classes:
            raise ModelError(f"variable {term_to_text(pattern)} already declared")
        cls = VariableClass(pattern=pattern, values=list(values))
        self.classes[key] = cls
        if not cls.is_schema:
            self._instantiate(cls, pattern)
        return cls

    def declare_relation(self, parent_pattern: Term, child_pattern: Term,
                         rules: list[tuple[str, list[tuple[str, float]]]]) -> RelationSchema:
        parent = self._class_for_pattern(parent_pattern)
        child = self._class_for_pattern(child_pattern)
        resolved: dict[str, dict[str, float]] = {}
        for parent_value, entries in rules:
            if parent_value not in parent.values:
                raise ModelError(
                    f"{parent_value} is not a value of {term_to_text(parent.pattern)}")
            if parent_value in resolved:
                raise ModelError(f"duplicate rule for value {parent_value}")
            resolved[parent_value] = self._resolve_rule(child, entries)
        schema = RelationSchema(id=len(self.relations) + 1, parent=parent,
                                child=child, rules=resolved)
        self.relations.append(schema)
        for record in list(self.instances.values()):
            self._apply_matching(schema, record)
        return schema

    def _resolve_rule(self, child: VariableClass,
                      entries: list[tuple[str, float]]) -> dict[str, float]:
        dist: dict[str, float] = {}
        for value, p in entries:
            if value not in child.values:
                raise ModelError(
                    f"{value} is not a value of {term_to_text(child.pattern)}")
            if value in dist:
                raise ModelError(f"value {value} listed twice in one rule")
            if p < -MASS_TOLERANCE or p > 1 + MASS_TOLERANCE:
                raise ModelError(f"rule probability {p} outside [0, 1]")
            dist[value] = min(max(float(p), 0.0), 1.0)
        residual = 1.0 - sum(dist.values())
        omitted = [v for v in child.values if v not in dist]
        if residual < -MASS_TOLERANCE:
            raise ModelError("rule probabilities sum to more than 1")
        if abs(residual) <= MASS_TOLERANCE:
            for v in omitted:
                dist[v] = 0.0
        elif len(omitted) == 1:
            dist[omitted[0]] = residual
        else:
            raise ModelError(
                f"rule leaves {residual:g} probability mass unassigned over "
                f"{len(omitted)} omitted values")
        return {v: dist[v] for v in child.values}

    def declare_marginal(self, target: Term, weights: list[float] | dict[str, float]) -> None:
        record = self.instances.get(target)
        if record is None:
            raise ModelError(f"{term_to_text(target)} is not an instantiated variable")
        values = record.var_class.values
        if isinstance(weights, dict):
            if set(weights) != set(values):
                raise ModelError(
                    f"marginal for {term_to_text(target)} must name each of "
                    f"{', '.join(values)} exactly once")
            weight_map = {v: float(weights[v]) for v in values}
        else:
            if len(weights) != len(values):
                raise ModelError(
                    f"marginal for {term_to_text(target)} needs {len(values)} "
                    f"weights, got {len(weights)}")
            weight_map = {v: float(w) for v, w in zip(values, weights)}
        if any(w < 0 for w in weight_map.values()):
            raise ModelError("marginal weights must be nonnegative")
        if sum(weight_map.values()) <= 0:
            raise ModelError("marginal weights must sum to a positive value")
        if self.structure.has_attachment(record):
            raise ModelError(f"{term_to_text(target)} already has a marginal")
        self.structure.attach_evidence(record, weight_map)

    def instantiate(self, term: Term) -> InstanceRecord:
        if not is_ground(term):
            raise ModelError(f"instance term {term_to_text(term)} is not ground")
        matches = [cls for cls in self.classes.values()
                   if unify(cls.pattern, term) is not None]
        if not matches:
            raise ModelError(f"no declared variable matches {term_to_text(term)}")
        if len(matches) > 1:
            raise ModelError(f"{term_to_text(term)} matches more than one variable class")
        return self._instantiate(matches[0], term)

    def _instantiate(self, cls: VariableClass, term: Term) -> InstanceRecord:
        if term in self.instances:
            raise ModelError(f"{term_to_text(term)} is already instantiated")
        nodes = {v: self.network.create_node((term, v)) for v in cls.values}
        record = InstanceRecord(term=term, var_class=cls, value_nodes=nodes)
        self.instances[term] = record
        values = cls.values
        for i, v1 in enumerate(values):
            for v2 in values[i + 1:]:
                self.network.justify([nodes[v1], nodes[v2]], self.contradiction)
        for schema in self.relations:
            self._apply_matching(schema, record)
        return record

    # -- relation application ---------------------------------------------

    def _apply_matching(self, schema: RelationSchema, record: InstanceRecord) -> None:
        binding = unify(schema.parent.pattern, record.term)
        if binding is not None:
            for other in list(self.instances.values()):
                if unify(schema.child.pattern, other.term, binding) is not None:
                    self._apply(schema, record, other)
        binding = unify(schema.child.pattern, record.term)
        if binding is not None:
            for other in list(self.instances.values()):
                if unify(schema.parent.pattern, other.term, binding) is not None:
                    self._apply(schema, other, record)

    def _apply(self, schema: RelationSchema, parent: InstanceRecord,
               child: InstanceRecord) -> None:
        key = (schema.id, parent.term, child.term)
        if key in self._applied:
            return
        self._applied.add(key)
        parent.children.append(child)
        child.parents.append(parent)
        for parent_value, dist in schema.rules.items():
            pv_node = parent.node(parent_value)
            stochastic: list[tuple[str, float]] = []
            for child_value, p in dist.items():
                if p > 1 - MASS_TOLERANCE:
                    self.network.justify([pv_node], child.node(child_value))
                elif p > MASS_TOLERANCE:
                    stochastic.append((child_value, p))
            if stochastic:
                members: list[tuple[Assumption, float]] = []
                for child_value, p in stochastic:
                    name = f"a_{child_value}_{term_slug(child.term)}"
                    members.append(
                        (self.network.create_assumption(DISTRIBUTION, p, name), p))
                tag = ("conditional", child.term, (parent.term, parent_value))
                self.space.register_choose(members, tag)
                for (assumption, _), (child_value, _) in zip(members, stochastic):
                    self.network.justify([pv_node, assumption],
                                         child.node(child_value))

    # -- facts and queries --------------------------------------------------

    def assert_fact(self, term: Term) -> None:
        if self.structure.is_structural_fact(term):
            node = self.network.ensure_node(term)
            self.network.assert_premise(node)
            self.structure.on_fact(term)
            return
        record, value = self._value_proposition(term)
        self.network.assert_premise(record.node(value))

    def query_probability(self, term: Term) -> float:
        node = self.network.nodes.get(term)
        if node is None:
            raise ModelError(f"unknown proposition {term_to_text(term)}")
        return self.space.probability_of(node)

    def _value_proposition(self, term: Term) -> tuple[InstanceRecord, str]:
        if isinstance(term, tuple) and len(term) == 2 and isinstance(term[1], str):
            record = self.instances.get(term[0])
            if record is not None and term[1] in record.var_class.values:
                return record, term[1]
        raise ModelError(f"unknown proposition {term_to_text(term)}")

    def _class_for_pattern(self, pattern: Term) -> VariableClass:
        cls = self.classes.get(alpha_canon(pattern))
        if cls is None:
            raise ModelError(f"variable {term_to_text(pattern)} is not declared")
        return cls

    # -- introspection --------------------------------------------------------

    def value_terms(self) -> list[Term]:
        """Every instantiated value proposition, in creation order."""
        return [(record.term, value)
                for record in self.instances.values()
                for value in record.var_class.values]
