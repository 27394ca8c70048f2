// Thin client over the session service; all command submissions resolve
// to a typed result so the caller can fold them into the view state.

import type { CommandResult, SessionCommand, SessionSnapshot, StreamEvent } from "./types";

export async function fetchSnapshot(base = ""): Promise<SessionSnapshot | null> {
  const resp = await fetch(`${base}/api/session`);
  if (resp.status === 404) return null;
  if (!resp.ok) throw new Error(`snapshot request failed: ${resp.status}`);
  return (await resp.json()) as SessionSnapshot;
}

export async function submitCommand(
  command: SessionCommand,
  base = "",
  fetchImpl: typeof fetch = fetch,
): Promise<CommandResult> {
  const resp = await fetchImpl(`${base}/api/session/command`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(command),
  });
  if (resp.ok) return { kind: "accepted" };
  let reason = `${resp.status}`;
  try {
    const body = await resp.json();
    reason = body.reason ?? reason;
  } catch {
    // non-JSON error body; keep the status code
  }
  if (resp.status === 409) return { kind: "busy", reason };
  if (resp.status === 422) return { kind: "invalid", reason };
  return { kind: "failed", reason };
}

export function parseEventLine(data: string): StreamEvent | null {
  try {
    return JSON.parse(data) as StreamEvent;
  } catch {
    return null;
  }
}

export function openEventStream(
  onEvent: (event: StreamEvent) => void,
  base = "",
): () => void {
  const source = new EventSource(`${base}/api/session/events`);
  source.onmessage = (message: MessageEvent) => {
    const event = parseEventLine(String(message.data));
    if (event) onEvent(event);
  };
  return () => source.close();
}
