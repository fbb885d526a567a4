/** Browser bootstrap: wires the console, panels and graph to one session. */

import { CommandRejected, ServiceClient } from "./protocol.js";
import { renderSvg } from "./graph.js";
import {
  applyCommand,
  applyCommandError,
  applyEvent,
  applySnapshot,
  beginCommand,
  initialState,
  retractCommandFor,
  type ViewState,
} from "./viewmodel.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const client = new ServiceClient(window.location.origin);
  const sessionId = await client.createSession();
  let state: ViewState = initialState();

  const consoleLog = el<HTMLDivElement>("console-log");
  const input = el<HTMLInputElement>("console-input");
  const graphHost = el<HTMLDivElement>("graph");
  const posteriorHost = el<HTMLDivElement>("posteriors");
  const assumptionHost = el<HTMLDivElement>("assumptions");
  const nogoodHost = el<HTMLDivElement>("nogoods");
  const eventHost = el<HTMLDivElement>("events");

  function render(): void {
    consoleLog.replaceChildren(
      ...state.console.flatMap((entry) => {
        const nodes: HTMLElement[] = [];
        nodes.push(line(`> ${entry.input}`, "input"));
        for (const out of entry.lines) nodes.push(line(out, "output"));
        if (entry.error !== null) nodes.push(line(`error: ${entry.error}`, "error"));
        return nodes;
      }),
    );
    consoleLog.scrollTop = consoleLog.scrollHeight;
    eventHost.replaceChildren(
      ...state.events.slice(-40).map((e) =>
        line(`${e.seq}. ${e.kind} ${JSON.stringify(e.data)}`, "event")),
    );
    const snapshot = state.snapshot;
    if (snapshot === null) return;
    graphHost.innerHTML = renderSvg(snapshot);
    posteriorHost.replaceChildren(
      ...snapshot.nodes
        .filter((n) => n.probability !== null && n["term-text"].startsWith("("))
        .map((n) => line(`${n["term-text"]}  ${n.probability?.toFixed(4)}`, "row")),
    );
    nogoodHost.replaceChildren(
      ...snapshot.nogoods.map((g) => line(`{${g.join(", ")}}`, "row")),
    );
    assumptionHost.replaceChildren(
      ...snapshot.assumptions.map((a) => {
        const row = line(
          `${a["display-name"]}  [${a.kind}${a.weight !== null ? ` ${a.weight}` : ""}]` +
            (a.retracted ? "  (retracted)" : ""),
          a.retracted ? "row retracted" : "row",
        );
        const command = retractCommandFor(a);
        if (command !== null) {
          const button = document.createElement("button");
          button.textContent = "retract";
          button.addEventListener("click", () => { void submit(command); });
          row.append(" ", button);
        }
        return row;
      }),
    );
  }

  function line(text: string, className: string): HTMLDivElement {
    const div = document.createElement("div");
    div.className = className;
    div.textContent = text;
    return div;
  }

  async function submit(text: string): Promise<void> {
    state = beginCommand(state, text);
    try {
      const response = await client.command(sessionId, text);
      state = applyCommand(state, text, response);
    } catch (err) {
      const message = err instanceof CommandRejected ? err.message : String(err);
      state = applyCommandError(state, text, message);
    }
    state = applySnapshot(state, await client.networkSnapshot(sessionId));
    render();
  }

  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && input.value.trim() !== "") {
      const text = input.value;
      input.value = "";
      void submit(text);
    }
  });

  void client.streamEvents(sessionId, (event) => {
    state = applyEvent(state, event);
    render();
  });

  state = applySnapshot(state, await client.networkSnapshot(sessionId));
  render();
}

void boot();
