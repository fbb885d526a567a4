"""Command language, interactive loop, and script runner.

Grammar (heads are case-insensitive; ``;`` starts a comment):

    (Variable <pattern> <value>...)
    (Relation <parent-pattern> <child-pattern>
      (-> (<parent-pattern> <value>) ((<child-pattern> <value>) <p>)...)...)
    (Marginal <target> (<target> <v>) <w> ...)     ; pair form
    (Marginal <target> <w1> <w2> ...)              ; positional form
    (Marginal <target> (<w1> <w2> ...))            ; positional-list form
    (Instance <ground-term>)
    (Defactq <fact-or-marginal>)                   ; Deffactq accepted too
    (Probability-of <term>)                        ; Probability accepted too
    (Retract <assumption-name-or-statement>)
    (Show-label <term>) | (Show-nogoods) | (Reset)
"""

from __future__ import annotations

import copy
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import oracle
from .errors import HumError, ParseError
from .model import Engine, Event
from .terms import Term, alpha_canon, read_forms, term_to_text

DEFAULT_PRECISION = 2


# -- commands ---------------------------------------------------------------


@dataclass(frozen=True)
class VariableCmd:
    pattern: Term
    values: tuple[str, ...]


@dataclass(frozen=True)
class RelationCmd:
    parent_pattern: Term
    child_pattern: Term
    rules: tuple  # of (parent proposition, ((child proposition, weight), ...))


@dataclass(frozen=True)
class MarginalCmd:
    target: Term
    positional: tuple[float, ...] | None
    pairs: tuple[tuple[Term, float], ...] | None


@dataclass(frozen=True)
class InstanceCmd:
    term: Term


@dataclass(frozen=True)
class FactCmd:
    term: Term


@dataclass(frozen=True)
class QueryCmd:
    term: Term


@dataclass(frozen=True)
class RetractCmd:
    key: Term


@dataclass(frozen=True)
class ShowLabelCmd:
    term: Term


@dataclass(frozen=True)
class ShowNogoodsCmd:
    pass


@dataclass(frozen=True)
class ResetCmd:
    pass


Command = (VariableCmd | RelationCmd | MarginalCmd | InstanceCmd | FactCmd
           | QueryCmd | RetractCmd | ShowLabelCmd | ShowNogoodsCmd | ResetCmd)

_MUTATING = (VariableCmd, RelationCmd, MarginalCmd, InstanceCmd, FactCmd,
             RetractCmd, ResetCmd)


def parse_commands(text: str) -> list[Command]:
    forms = read_forms(text)
    return [_command_from_form(form, line, col) for form, line, col in forms]


def parse_command(text: str) -> Command:
    commands = parse_commands(text)
    if len(commands) != 1:
        raise ParseError(f"expected one command, found {len(commands)}")
    return commands[0]


def _command_from_form(form: Term, line: int, col: int) -> Command:
    if not isinstance(form, tuple) or not form or not isinstance(form[0], str):
        raise ParseError(f"not a command: {term_to_text(form)}", line, col)
    head, args = form[0], form[1:]
    if head == "variable":
        if len(args) < 2:
            raise ParseError("(Variable <pattern> <value>...) needs values", line, col)
        if not all(isinstance(v, str) for v in args[1:]):
            raise ParseError("variable values must be symbols", line, col)
        return VariableCmd(pattern=args[0], values=tuple(args[1:]))
    if head == "relation":
        if len(args) < 3:
            raise ParseError("(Relation <parent> <child> <rule>...) needs rules", line, col)
        return RelationCmd(parent_pattern=args[0], child_pattern=args[1],
                           rules=tuple(_parse_rule(r, line, col) for r in args[2:]))
    if head == "marginal":
        return _parse_marginal(args, line, col)
    if head == "instance":
        _arity(args, 1, "(Instance <term>)", line, col)
        return InstanceCmd(term=args[0])
    if head in ("defactq", "deffactq"):
        _arity(args, 1, "(Defactq <fact>)", line, col)
        inner = args[0]
        if isinstance(inner, tuple) and inner and inner[0] == "marginal":
            return _parse_marginal(inner[1:], line, col)
        return FactCmd(term=inner)
    if head in ("probability-of", "probability"):
        _arity(args, 1, "(Probability-of <term>)", line, col)
        return QueryCmd(term=args[0])
    if head == "retract":
        _arity(args, 1, "(Retract <assumption-or-statement>)", line, col)
        return RetractCmd(key=args[0])
    if head == "show-label":
        _arity(args, 1, "(Show-label <term>)", line, col)
        return ShowLabelCmd(term=args[0])
    if head == "show-nogoods":
        _arity(args, 0, "(Show-nogoods)", line, col)
        return ShowNogoodsCmd()
    if head == "reset":
        _arity(args, 0, "(Reset)", line, col)
        return ResetCmd()
    raise ParseError(f"unknown command head {head!r}", line, col)


def _arity(args: tuple, n: int, usage: str, line: int, col: int) -> None:
    if len(args) != n:
        raise ParseError(f"{usage}: got {len(args)} arguments", line, col)


def _parse_rule(form: Term, line: int, col: int) -> tuple:
    if not (isinstance(form, tuple) and len(form) >= 3 and form[0] == "->"):
        raise ParseError(f"rule must look like (-> <value> <entry>...): "
                         f"{term_to_text(form)}", line, col)
    parent_prop = form[1]
    entries = []
    for entry in form[2:]:
        if not (isinstance(entry, tuple) and len(entry) == 2
                and isinstance(entry[1], (int, float))):
            raise ParseError(f"rule entry must be (<value> <probability>): "
                             f"{term_to_text(entry)}", line, col)
        entries.append((entry[0], float(entry[1])))
    return parent_prop, tuple(entries)


def _parse_marginal(args: tuple, line: int, col: int) -> MarginalCmd:
    if len(args) < 2:
        raise ParseError("(Marginal <target> <weights...>) needs weights", line, col)
    target, rest = args[0], args[1:]
    if all(isinstance(x, (int, float)) for x in rest):
        return MarginalCmd(target=target, positional=tuple(float(x) for x in rest),
                           pairs=None)
    if (len(rest) == 1 and isinstance(rest[0], tuple)
            and all(isinstance(x, (int, float)) for x in rest[0])):
        return MarginalCmd(target=target,
                           positional=tuple(float(x) for x in rest[0]), pairs=None)
    if len(rest) % 2 != 0:
        raise ParseError("pair-form marginal needs (<value-term> <weight>) pairs",
                         line, col)
    pairs = []
    for prop, weight in zip(rest[::2], rest[1::2]):
        if not isinstance(weight, (int, float)):
            raise ParseError(f"expected a weight after {term_to_text(prop)}", line, col)
        pairs.append((prop, float(weight)))
    return MarginalCmd(target=target, positional=None, pairs=tuple(pairs))


# -- evaluation ---------------------------------------------------------------


@dataclass
class CommandResult:
    value: float | None = None
    display: str | None = None
    lines: list[str] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)


_EVENT_LINES = {"assuming": "Assuming", "monitoring": "Monitoring",
                "retracting": "Retracting"}


def format_probability(p: float, precision: int = DEFAULT_PRECISION) -> str:
    s = f"{p:.{precision}f}"
    if "." in s:
        s = s.rstrip("0")
        if s.endswith("."):
            s += "0"
    return s


def _env_precision() -> int:
    raw = os.environ.get("HUM_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        return max(0, int(raw))
    except ValueError:
        return DEFAULT_PRECISION


class Session:
    """One engine plus its transcript; commands apply atomically."""

    def __init__(self, precision: int | None = None):
        self.engine = Engine()
        self.precision = _env_precision() if precision is None else precision
        self.transcript: list[tuple[str, list[str]]] = []

    def execute_text(self, text: str) -> CommandResult:
        """Run every form in ``text``; merged result, last query's value."""
        merged = CommandResult()
        for command in parse_commands(text):
            result = self.execute(command)
            merged.lines.extend(result.lines)
            merged.events.extend(result.events)
            if result.value is not None:
                merged.value, merged.display = result.value, result.display
        return merged

    def execute(self, command: Command) -> CommandResult:
        backup = copy.deepcopy(self.engine) if isinstance(command, _MUTATING) else None
        self.engine.events.clear()
        try:
            result = self._dispatch(command)
        except Exception:
            if backup is not None:
                self.engine = backup
            raise
        self.transcript.append((command_to_text(command), list(result.lines)))
        return result

    def _dispatch(self, command: Command) -> CommandResult:
        engine = self.engine
        result = CommandResult()
        if isinstance(command, VariableCmd):
            engine.declare_variable(command.pattern, list(command.values))
        elif isinstance(command, RelationCmd):
            rules = [(self._rule_value(prop, command.parent_pattern),
                      [(self._rule_value(p, command.child_pattern), w)
                       for p, w in entries])
                     for prop, entries in command.rules]
            engine.declare_relation(command.parent_pattern, command.child_pattern, rules)
        elif isinstance(command, MarginalCmd):
            engine.declare_marginal(command.target, self._marginal_weights(command))
        elif isinstance(command, InstanceCmd):
            engine.instantiate(command.term)
        elif isinstance(command, FactCmd):
            engine.assert_fact(command.term)
        elif isinstance(command, QueryCmd):
            result.value = engine.query_probability(command.term)
            result.display = format_probability(result.value, self.precision)
        elif isinstance(command, RetractCmd):
            engine.structure.retract(command.key)
        elif isinstance(command, ShowLabelCmd):
            node = engine.network.node(command.term)
            result.lines.append(f"{term_to_text(node.term)} "
                                f"{engine.network.format_label(node.label)}")
        elif isinstance(command, ShowNogoodsCmd):
            nogoods = sorted(engine.network.nogoods,
                             key=lambda g: (len(g), engine.network.format_env(g)))
            result.lines.extend(engine.network.format_env(g) for g in nogoods)
        elif isinstance(command, ResetCmd):
            self.engine = Engine()
            return result
        result.events = engine.take_events()
        for event in result.events:
            word = _EVENT_LINES.get(event.kind)
            if word is not None:
                result.lines.append(f"** {word} {event.data['term']} ***")
        if result.display is not None:
            result.lines.append(result.display)
        return result

    @staticmethod
    def _rule_value(prop: Term, pattern: Term) -> str:
        if not (isinstance(prop, tuple) and len(prop) == 2 and isinstance(prop[1], str)):
            raise HumError(f"rule value must be (<pattern> <value>): {term_to_text(prop)}")
        if alpha_canon(prop[0]) != alpha_canon(pattern):
            raise HumError(f"rule value {term_to_text(prop)} does not match "
                           f"pattern {term_to_text(pattern)}")
        return prop[1]

    @staticmethod
    def _marginal_weights(command: MarginalCmd) -> list[float] | dict[str, float]:
        if command.positional is not None:
            return list(command.positional)
        weights: dict[str, float] = {}
        for prop, w in command.pairs:
            if not (isinstance(prop, tuple) and len(prop) == 2
                    and isinstance(prop[1], str) and prop[0] == command.target):
                raise HumError(f"marginal pair {term_to_text(prop)} does not name a "
                               f"value of {term_to_text(command.target)}")
            if prop[1] in weights:
                raise HumError(f"value {prop[1]} weighted twice")
            weights[prop[1]] = w
        return weights


def command_to_text(command: Command) -> str:
    """Canonical printed form; parsing it yields an equal command."""
    if isinstance(command, VariableCmd):
        return term_to_text(("variable", command.pattern) + command.values)
    if isinstance(command, RelationCmd):
        rules = tuple(("->", prop) + entries for prop, entries in command.rules)
        return term_to_text(("relation", command.parent_pattern,
                             command.child_pattern) + rules)
    if isinstance(command, MarginalCmd):
        if command.positional is not None:
            return term_to_text(("marginal", command.target) + command.positional)
        flat: tuple = ()
        for prop, w in command.pairs:
            flat += (prop, w)
        return term_to_text(("marginal", command.target) + flat)
    if isinstance(command, InstanceCmd):
        return term_to_text(("instance", command.term))
    if isinstance(command, FactCmd):
        return term_to_text(("defactq", command.term))
    if isinstance(command, QueryCmd):
        return term_to_text(("probability-of", command.term))
    if isinstance(command, RetractCmd):
        return term_to_text(("retract", command.key))
    if isinstance(command, ShowLabelCmd):
        return term_to_text(("show-label", command.term))
    if isinstance(command, ShowNogoodsCmd):
        return "(show-nogoods)"
    return "(reset)"


# -- REPL and scripts --------------------------------------------------------


def _read_balanced(text: str) -> list[Command] | None:
    try:
        return parse_commands(text)
    except ParseError as err:
        if "unbalanced" in str(err):
            return None
        raise


def repl(stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    session = Session()
    interactive = stdin.isatty() if hasattr(stdin, "isatty") else False

    def say(line: str) -> None:
        print(line, file=stdout)

    buffer = ""
    while True:
        if interactive:
            print("hum> " if not buffer else "...> ", end="", file=stdout, flush=True)
        line = stdin.readline()
        if not line:
            break
        buffer += line
        if not buffer.strip():
            buffer = ""
            continue
        commands = None
        try:
            commands = _read_balanced(buffer)
        except HumError as err:
            say(f"error: {err}")
            buffer = ""
            continue
        if commands is None:
            continue  # open parens: keep reading
        buffer = ""
        for command in commands:
            try:
                for out in session.execute(command).lines:
                    say(out)
            except HumError as err:
                say(f"error: {err}")
    return 0


def run_script(path: str, verify: bool = False, keep_going: bool = False,
               out=None) -> tuple[int, list[str]]:
    lines: list[str] = []

    def say(line: str) -> None:
        lines.append(line)
        if out is not None:
            print(line, file=out)

    try:
        text = Path(path).read_text()
    except OSError as err:
        say(f"error: {err}")
        return 1, lines
    try:
        commands = parse_commands(text)
    except ParseError as err:
        say(f"error: {err}")
        return 1, lines

    session = Session()
    status = 0
    for command in commands:
        try:
            result = session.execute(command)
        except HumError as err:
            say(f"error: {err}")
            status = 1
            if not keep_going:
                return status, lines
            continue
        for line in result.lines:
            say(line)
        if verify and isinstance(command, QueryCmd):
            snapshot = oracle.take_snapshot(session.engine.network, session.engine.space)
            reference = oracle.oracle_probability(snapshot, command.term)
            if abs(reference - result.value) > 1e-9:
                say(f"VERIFY FAILED for {term_to_text(command.term)}: "
                    f"engine={result.value!r} oracle={reference!r}")
                return 2, lines
    return status, lines
