/** Wire types of the session service; field names are the protocol surface. */

export interface NodeView {
  "term-text": string;
  label: string[][];
  "is-premise": boolean;
  probability: number | null;
}

export interface AssumptionView {
  "display-name": string;
  kind: "distribution-element" | "structure";
  weight: number | null;
  retracted: boolean;
}

export interface ChooseMemberView {
  "display-name": string;
  weight: number;
}

export interface ChooseSetView {
  id: number;
  tag: string;
  members: ChooseMemberView[];
}

export interface JustificationView {
  antecedents: string[];
  consequent: string;
}

export interface NetworkSnapshot {
  nodes: NodeView[];
  assumptions: AssumptionView[];
  "choose-sets": ChooseSetView[];
  nogoods: string[][];
  justifications: JustificationView[];
}

export interface EventView {
  seq: number;
  kind: string;
  data: Record<string, unknown>;
}

export interface CommandResponse {
  ok: boolean;
  value: number | null;
  display: string | null;
  "output-lines": string[];
  events: EventView[];
}

export interface CommandDiagnostic {
  error: string;
  line?: number | null;
  column?: number | null;
}
