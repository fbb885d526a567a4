"""In-memory sessions behind the protocol: one engine per id, serialized commands."""

from __future__ import annotations

import queue
import threading
import uuid
from dataclasses import dataclass, field

from ..model import Engine
from ..probability import batch_probabilities
from ..session import Session, parse_commands
from ..terms import term_to_text

_CLOSE = object()  # sentinel pushed to subscribers when a session ends


@dataclass(eq=False)
class SessionState:
    id: str
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    events: list[dict] = field(default_factory=list)
    subscribers: list[queue.Queue] = field(default_factory=list)
    closed: bool = False


class UnknownSession(KeyError):
    pass


class SessionManager:
    def __init__(self) -> None:
        self._sessions: dict[str, SessionState] = {}
        self._registry_lock = threading.Lock()

    def create(self) -> str:
        sid = uuid.uuid4().hex
        with self._registry_lock:
            self._sessions[sid] = SessionState(id=sid, session=Session())
        return sid

    def get(self, sid: str) -> SessionState:
        state = self._sessions.get(sid)
        if state is None or state.closed:
            raise UnknownSession(sid)
        return state

    def end(self, sid: str) -> None:
        """Close the session; its event history stays readable for replay."""
        state = self.get(sid)
        with state.lock:
            state.closed = True
            for q in state.subscribers:
                q.put(_CLOSE)
            state.subscribers.clear()

    # -- protocol operations ------------------------------------------------

    def handle_command(self, sid: str, text: str) -> dict:
        """Run every form in ``text``. Each command is atomic; events of the
        commands that did succeed are recorded before an error propagates."""
        state = self.get(sid)
        with state.lock:
            commands = parse_commands(text)  # parse error: nothing runs
            value = display = None
            lines: list[str] = []
            events: list[dict] = []
            for command in commands:
                result = state.session.execute(command)
                lines.extend(result.lines)
                events.extend(self._record_event(state, ev.as_dict())
                              for ev in result.events)
                if result.value is not None:
                    value, display = result.value, result.display
            return {
                "ok": True,
                "value": value,
                "display": display,
                "output_lines": lines,
                "events": events,
            }

    def _record_event(self, state: SessionState, payload: dict) -> dict:
        kind = payload.pop("kind")
        event = {"seq": len(state.events) + 1, "kind": kind, "data": payload}
        state.events.append(event)
        for q in state.subscribers:
            q.put(event)
        return event

    def network_snapshot(self, sid: str) -> dict:
        state = self.get(sid)
        with state.lock:
            engine = state.session.engine
            return build_snapshot(engine)

    def subscribe(self, sid: str):
        """Every session event exactly once: full replay, then live tail.

        Registration happens at call time, so events arriving between this
        call and the first read are not lost. Yields None as a keepalive when
        the live tail is idle; ends when the session does.
        """
        state = self._sessions.get(sid)
        if state is None:
            raise UnknownSession(sid)
        q: queue.Queue = queue.Queue()
        with state.lock:
            backlog = list(state.events)
            live = not state.closed
            if live:
                state.subscribers.append(q)
        return self._drain(state, backlog, q, live)

    def _drain(self, state: SessionState, backlog: list, q: queue.Queue, live: bool):
        try:
            yield from backlog
            while live:
                try:
                    item = q.get(timeout=0.5)
                except queue.Empty:
                    if state.closed:
                        return
                    yield None
                    continue
                if item is _CLOSE:
                    return
                yield item
        finally:
            with state.lock:
                if q in state.subscribers:
                    state.subscribers.remove(q)


def build_snapshot(engine: Engine) -> dict:
    network = engine.network
    probabilities = batch_probabilities(engine.space, network.nodes.values())
    nodes = [{
        "term_text": term_to_text(node.term),
        "label": engine.label_names(node),
        "is_premise": node.is_premise,
        "probability": probabilities[node],
    } for node in network.nodes.values()]
    assumptions = [{
        "display_name": a.display_name,
        "kind": a.kind,
        "weight": a.weight,
        "retracted": a.id in engine.space.retracted,
    } for a in network.assumptions.values()]
    choose_sets = [{
        "id": cs.id,
        "tag": term_to_text(cs.tag),
        "members": [{"display_name": a.display_name, "weight": w}
                    for a, w in cs.members],
    } for cs in engine.space.choose_sets]
    nogoods = sorted(
        (sorted(network.assumptions[a].display_name for a in g)
         for g in network.nogoods),
        key=lambda names: (len(names), names))
    justifications = [{
        "antecedents": [term_to_text(a.term) for a in just.antecedents],
        "consequent": term_to_text(just.consequent.term),
    } for just in network.justifications]
    return {
        "nodes": nodes,
        "assumptions": assumptions,
        "choose_sets": choose_sets,
        "nogoods": nogoods,
        "justifications": justifications,
    }
