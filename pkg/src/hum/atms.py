"""Assumption-based truth maintenance kernel.

Every node carries a label: the minimal antichain of assumption sets
(environments) under which the node is derivable and which are not ruled out
by the nogood database. Justifications propagate environments forward to a
fixpoint; environments derived at a contradiction node become nogoods instead
of label entries, and adding a nogood purges every superset environment from
every label in the network.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import AtmsError
from .terms import Term, is_ground, term_to_text

Env = frozenset  # of assumption ids (ints)

DISTRIBUTION = "distribution-element"
STRUCTURE = "structure"


@dataclass(eq=False)
class Assumption:
    id: int
    kind: str
    weight: float | None
    display_name: str
    node: "Node"
    owner: object | None = None  # ChooseSet, set on registration

    def __repr__(self) -> str:
        return f"<assumption {self.display_name}>"


@dataclass(eq=False)
class Node:
    term: Term
    label: set[Env] = field(default_factory=set)
    consequent_of: list["Justification"] = field(default_factory=list)
    antecedent_of: list["Justification"] = field(default_factory=list)
    is_contradiction: bool = False
    is_premise: bool = False
    assumption: Assumption | None = None

    def __repr__(self) -> str:
        return f"<node {term_to_text(self.term)}>"


@dataclass(eq=False)
class Justification:
    antecedents: list[Node]
    consequent: Node


class Network:
    """One truth-maintenance network: nodes, justifications, nogood database.

    Single logical writer; reads are safe between mutations. ``listener``,
    when set, receives ``_on_network_event(kind, data)`` callbacks for
    nogood-added and label-changed events.
    """

    def __init__(self) -> None:
        self.nodes: dict[Term, Node] = {}
        self.assumptions: dict[int, Assumption] = {}
        self.justifications: list[Justification] = []
        self.nogoods: list[Env] = []
        self.listener: object | None = None
        self._next_assumption_id = 1

    # -- construction -------------------------------------------------

    def create_node(self, term: Term) -> Node:
        if not is_ground(term):
            raise AtmsError(f"node term must be ground: {term_to_text(term)}")
        if term in self.nodes:
            raise AtmsError(f"node already exists for {term_to_text(term)}")
        node = Node(term=term)
        self.nodes[term] = node
        return node

    def ensure_node(self, term: Term) -> Node:
        node = self.nodes.get(term)
        return node if node is not None else self.create_node(term)

    def node(self, term: Term) -> Node:
        node = self.nodes.get(term)
        if node is None:
            raise AtmsError(f"unknown node {term_to_text(term)}")
        return node

    def create_assumption(self, kind: str, weight: float | None = None,
                          display_name: str | None = None) -> Assumption:
        if kind not in (DISTRIBUTION, STRUCTURE):
            raise AtmsError(f"unknown assumption kind {kind!r}")
        if kind == DISTRIBUTION:
            if weight is None:
                raise AtmsError("distribution-element assumptions need a weight")
            if weight < 0:
                raise AtmsError(f"assumption weight must be nonnegative, got {weight}")
        elif weight is not None:
            raise AtmsError("structure assumptions carry no weight")
        aid = self._next_assumption_id
        self._next_assumption_id += 1
        name = self._unique_name(display_name or f"a{aid}")
        node = self.create_node(name)
        assumption = Assumption(id=aid, kind=kind, weight=weight,
                                display_name=name, node=node)
        node.assumption = assumption
        self.assumptions[aid] = assumption
        env = frozenset([aid])
        if not self._against_nogoods(env):
            node.label.add(env)
        return assumption

    def _unique_name(self, base: str) -> str:
        if base not in self.nodes:
            return base
        k = 2
        while f"{base}_{k}" in self.nodes:
            k += 1
        return f"{base}_{k}"

    # -- mutation -----------------------------------------------------

    def justify(self, antecedents: Sequence[Node | Assumption], consequent: Node) -> Justification:
        nodes = [a.node if isinstance(a, Assumption) else a for a in antecedents]
        just = Justification(antecedents=nodes, consequent=consequent)
        self.justifications.append(just)
        for n in nodes:
            n.antecedent_of.append(just)
        consequent.consequent_of.append(just)
        self._run(deque([just]))
        return just

    def assert_premise(self, node: Node) -> None:
        node.is_premise = True
        target = set() if self._against_nogoods(frozenset()) else {frozenset()}
        if node.label == target:
            return
        node.label = target
        self._label_changed(node)
        self._run(deque(node.antecedent_of))

    def declare_contradiction(self, node: Node) -> None:
        node.is_contradiction = True
        derived = sorted(node.label, key=_env_sort_key)
        node.label = set()
        for env in derived:
            self._install_nogood(env)

    def add_nogood(self, env: Iterable[int]) -> None:
        env = frozenset(env)
        if not env:
            raise AtmsError("total inconsistency requested: empty nogood")
        self._install_nogood(env)

    # -- queries ------------------------------------------------------

    def label_of(self, node: Node) -> frozenset[Env]:
        return frozenset(node.label)

    def holds_in(self, node: Node, env: Iterable[int]) -> bool:
        env = frozenset(env)
        return any(e <= env for e in node.label)

    def dump(self) -> str:
        """One node per line: term then label environments by display name."""
        lines = []
        for node in self.nodes.values():
            lines.append(f"{term_to_text(node.term)} {self.format_label(node.label)}")
        return "\n".join(lines)

    def format_env(self, env: Env) -> str:
        names = sorted(self.assumptions[a].display_name for a in env)
        return "{" + ", ".join(names) + "}"

    def format_label(self, label: Iterable[Env]) -> str:
        envs = sorted(label, key=_env_sort_key)
        return "[" + ", ".join(self.format_env(e) for e in envs) + "]"

    def check_invariants(self) -> None:
        """Raise if any label is not a consistent minimal antichain."""
        for node in self.nodes.values():
            label = list(node.label)
            for i, e1 in enumerate(label):
                for e2 in label[i + 1:]:
                    if e1 <= e2 or e2 <= e1:
                        raise AssertionError(
                            f"label of {node!r} is not an antichain: "
                            f"{self.format_env(e1)} vs {self.format_env(e2)}")
                if self._against_nogoods(e1):
                    raise AssertionError(
                        f"label of {node!r} contains nogood superset {self.format_env(e1)}")
            if node.is_contradiction and node.label:
                raise AssertionError(f"contradiction node {node!r} has a nonempty label")
        for i, g1 in enumerate(self.nogoods):
            for g2 in self.nogoods[i + 1:]:
                if g1 <= g2 or g2 <= g1:
                    raise AssertionError("nogood database is not an antichain")

    # -- internals ----------------------------------------------------

    def _against_nogoods(self, env: Env) -> bool:
        return any(g <= env for g in self.nogoods)

    def _install_nogood(self, env: Env) -> None:
        if any(g <= env for g in self.nogoods):
            return
        self.nogoods = [g for g in self.nogoods if not env < g]
        self.nogoods.append(env)
        self._emit("nogood-added", {"environment": env})
        for node in self.nodes.values():
            doomed = {e for e in node.label if env <= e}
            if doomed:
                node.label -= doomed
                self._label_changed(node)

    def _combine(self, just: Justification) -> list[Env]:
        labels = []
        for ante in just.antecedents:
            if not ante.label:
                return []
            labels.append(sorted(ante.label, key=_env_sort_key))
        out = []
        for combo in itertools.product(*labels):
            env: Env = frozenset().union(*combo)
            if not self._against_nogoods(env):
                out.append(env)
        return out

    def _update_label(self, node: Node, envs: Iterable[Env]) -> bool:
        changed = False
        for env in envs:
            if any(old <= env for old in node.label):
                continue
            node.label = {old for old in node.label if not env < old}
            node.label.add(env)
            changed = True
        if changed:
            self._label_changed(node)
        return changed

    def _run(self, queue: deque[Justification]) -> None:
        while queue:
            just = queue.popleft()
            envs = self._combine(just)
            consequent = just.consequent
            if consequent.is_contradiction:
                for env in sorted(envs, key=_env_sort_key):
                    self._install_nogood(env)
            elif consequent.is_premise:
                continue  # {{}} already subsumes everything derivable
            elif self._update_label(consequent, envs):
                queue.extend(consequent.antecedent_of)

    def _label_changed(self, node: Node) -> None:
        self._emit("label-changed", {"node": node})

    def _emit(self, kind: str, data: dict) -> None:
        if self.listener is not None:
            self.listener._on_network_event(kind, data)


def _env_sort_key(env: Env) -> tuple:
    return (len(env), tuple(sorted(env)))
