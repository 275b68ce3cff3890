import type { AskRequest, AskResponse, DocumentView, Schema } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface Client {
  fetchSchema(): Promise<Schema>;
  ask(body: AskRequest, signal?: AbortSignal): Promise<AskResponse>;
  fetchDocument(id: string): Promise<DocumentView>;
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  let body: unknown = null;
  try {
    body = await res.json();
  } catch {
    body = null;
  }
  if (!res.ok) {
    const error = body as { error?: unknown } | null;
    const message =
      error && typeof error.error === "string" ? error.error : `${res.status} ${res.statusText}`;
    throw new ApiError(res.status, message);
  }
  return body as T;
}

export function makeClient(baseUrl = ""): Client {
  return {
    fetchSchema: () => request<Schema>(`${baseUrl}/schema`),
    ask: (body, signal) =>
      request<AskResponse>(`${baseUrl}/ask`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
        signal,
      }),
    fetchDocument: (id) => request<DocumentView>(`${baseUrl}/documents/${encodeURIComponent(id)}`),
  };
}
