/**
 * View state derives solely from protocol responses and events; nothing is
 * inferred client-side. Reducers return fresh state objects so rendering can
 * diff by identity.
 */

import type {
  AssumptionView,
  CommandResponse,
  EventView,
  NetworkSnapshot,
} from "./types.js";

export interface ConsoleEntry {
  input: string;
  lines: string[];
  error: string | null;
}

export interface ViewState {
  console: ConsoleEntry[];
  pending: string | null;
  snapshot: NetworkSnapshot | null;
  posteriors: Record<string, number | null>;
  events: EventView[];
}

export function initialState(): ViewState {
  return { console: [], pending: null, snapshot: null, posteriors: {}, events: [] };
}

export function beginCommand(state: ViewState, input: string): ViewState {
  return { ...state, pending: input };
}

export function applyCommand(state: ViewState, input: string, response: CommandResponse): ViewState {
  const entry: ConsoleEntry = { input, lines: response["output-lines"], error: null };
  return {
    ...state,
    pending: null,
    console: [...state.console, entry],
    events: mergeEvents(state.events, response.events),
  };
}

export function applyCommandError(state: ViewState, input: string, message: string): ViewState {
  const entry: ConsoleEntry = { input, lines: [], error: message };
  return { ...state, pending: null, console: [...state.console, entry] };
}

export function applySnapshot(state: ViewState, snapshot: NetworkSnapshot): ViewState {
  const posteriors: Record<string, number | null> = {};
  for (const node of snapshot.nodes) {
    posteriors[node["term-text"]] = node.probability;
  }
  return { ...state, snapshot, posteriors };
}

export function applyEvent(state: ViewState, event: EventView): ViewState {
  return { ...state, events: mergeEvents(state.events, [event]) };
}

function mergeEvents(existing: EventView[], incoming: EventView[]): EventView[] {
  const seen = new Set(existing.map((e) => e.seq));
  const fresh = incoming.filter((e) => !seen.has(e.seq));
  if (fresh.length === 0) return existing;
  return [...existing, ...fresh].sort((a, b) => a.seq - b.seq);
}

/**
 * The Retract command a one-click toggle should send; null when the
 * assumption is not retractable (distribution elements, already retracted).
 */
export function retractCommandFor(assumption: AssumptionView): string | null {
  if (assumption.kind !== "structure" || assumption.retracted) return null;
  return `(Retract ${assumption["display-name"]})`;
}

/** Console transcript as plain lines, comparable with the CLI's output. */
export function transcriptLines(state: ViewState): string[] {
  const lines: string[] = [];
  for (const entry of state.console) {
    lines.push(...entry.lines);
    if (entry.error !== null) lines.push(`error: ${entry.error}`);
  }
  return lines;
}
