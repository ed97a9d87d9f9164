// Thin typed client for the three talk2x service endpoints.

export interface TraceEntry {
  tool: string;
  arguments: Record<string, unknown>;
  sources: string[];
}

export interface MessageResponse {
  answer: string;
  sources: string[];
  degraded: boolean;
  trace: TraceEntry[];
}

export interface HistoryEntry {
  role: string;
  content: string;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

// Service origin: same-origin by default, overridable before the bundle
// loads via <script>window.TALK2X_API_BASE = "http://host:port"</script>.
export function apiBase(): string {
  const override = (globalThis as { TALK2X_API_BASE?: string }).TALK2X_API_BASE;
  return override ?? "";
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(apiBase() + path, init);
  } catch (err) {
    throw new ApiError(0, `service unreachable: ${String(err)}`);
  }
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export async function createSession(): Promise<string> {
  const body = await request<{ session_id: string }>("/api/sessions", { method: "POST" });
  return body.session_id;
}

export function sendMessage(sessionId: string, text: string): Promise<MessageResponse> {
  return request<MessageResponse>(`/api/sessions/${encodeURIComponent(sessionId)}/messages`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ text }),
  });
}

export function fetchHistory(sessionId: string): Promise<HistoryEntry[]> {
  return request<HistoryEntry[]>(`/api/sessions/${encodeURIComponent(sessionId)}/history`);
}
