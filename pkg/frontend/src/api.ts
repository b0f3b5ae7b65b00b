/** Typed fetch client for the writer-integrity service. */

import type {
  CertificateView,
  DocumentDetail,
  DocumentRow,
  IngestResponse,
  SaveResponse,
  WireEvent,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  get authenticated(): boolean {
    return this.token !== null;
  }

  logout(): void {
    this.token = null;
  }

  async login(username: string, password: string): Promise<void> {
    const body = await this.request<{ token: string }>("POST", "/auth/login", {
      username,
      password,
    });
    this.token = body.token;
  }

  listDocuments(): Promise<DocumentRow[]> {
    return this.request("GET", "/documents");
  }

  createDocument(name: string): Promise<DocumentRow> {
    return this.request("POST", "/documents", { name });
  }

  getDocument(id: number): Promise<DocumentDetail> {
    return this.request("GET", `/documents/${id}`);
  }

  postEvents(id: number, events: WireEvent[]): Promise<IngestResponse> {
    return this.request("POST", `/documents/${id}/events`, events);
  }

  saveDocument(id: number): Promise<SaveResponse> {
    return this.request("POST", `/documents/${id}/save`);
  }

  getCertificate(certificateId: string): Promise<CertificateView> {
    return this.request("GET", `/certificates/${encodeURIComponent(certificateId)}`);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
    }
    if (this.token) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = "http_error";
      let message = `${response.status}`;
      try {
        const payload = (await response.json()) as { error?: string; message?: string };
        code = payload.error ?? code;
        message = payload.message ?? message;
      } catch {
        // non-JSON error body; keep the defaults
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }
}
