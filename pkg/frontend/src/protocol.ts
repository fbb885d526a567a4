/** Client for the session service. Works in browsers and in node 20+. */

import type { CommandDiagnostic, CommandResponse, EventView, NetworkSnapshot } from "./types.js";

export class CommandRejected extends Error {
  readonly diagnostic: CommandDiagnostic;

  constructor(diagnostic: CommandDiagnostic) {
    super(diagnostic.error);
    this.diagnostic = diagnostic;
  }
}

type FetchLike = typeof fetch;

export class ServiceClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl: FetchLike = fetch) {
    this.base = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  async createSession(): Promise<string> {
    const response = await this.fetchImpl(`${this.base}/sessions`, { method: "POST" });
    if (!response.ok) throw new Error(`create-session failed: ${response.status}`);
    const body = (await response.json()) as { "session-id": string };
    return body["session-id"];
  }

  async command(sessionId: string, text: string): Promise<CommandResponse> {
    const response = await this.fetchImpl(`${this.base}/sessions/${sessionId}/command`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    if (response.status === 422) {
      const body = (await response.json()) as { detail: CommandDiagnostic };
      throw new CommandRejected(body.detail);
    }
    if (!response.ok) throw new Error(`command failed: ${response.status}`);
    return (await response.json()) as CommandResponse;
  }

  async networkSnapshot(sessionId: string): Promise<NetworkSnapshot> {
    const response = await this.fetchImpl(`${this.base}/sessions/${sessionId}/network`);
    if (!response.ok) throw new Error(`network-snapshot failed: ${response.status}`);
    return (await response.json()) as NetworkSnapshot;
  }

  async endSession(sessionId: string): Promise<void> {
    await this.fetchImpl(`${this.base}/sessions/${sessionId}`, { method: "DELETE" });
  }

  /**
   * Follow the session's event stream. Resolves when the stream closes;
   * abort via the signal to stop early.
   */
  async streamEvents(
    sessionId: string,
    onEvent: (event: EventView) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const response = await this.fetchImpl(`${this.base}/sessions/${sessionId}/events`, { signal });
    if (!response.ok || response.body === null) {
      throw new Error(`event-stream failed: ${response.status}`);
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let cut: number;
      while ((cut = buffer.indexOf("\n\n")) >= 0) {
        const block = buffer.slice(0, cut);
        buffer = buffer.slice(cut + 2);
        for (const line of block.split("\n")) {
          if (line.startsWith("data: ")) {
            onEvent(JSON.parse(line.slice(6)) as EventView);
          }
        }
      }
    }
  }
}
