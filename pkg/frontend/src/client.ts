/**
 * Typed client for the annotation session HTTP API. Error responses share
 * one envelope {code, message, details}; non-2xx statuses surface as
 * ApiError so callers can route diagnostics back to the offending edits.
 * At most one submission is in flight at a time.
 */

import type { AnnotationDocument, InterfaceIR } from "./ir.js";

export interface EnvelopeDetail {
  severity?: string;
  code?: string;
  path?: string;
  message?: string;
  instance_id?: string;
  [key: string]: unknown;
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  details: EnvelopeDetail[];
}

export class ApiError extends Error {
  readonly status: number;
  readonly envelope: ErrorEnvelope;

  constructor(status: number, envelope: ErrorEnvelope) {
    super(`${envelope.code}: ${envelope.message}`);
    this.name = "ApiError";
    this.status = status;
    this.envelope = envelope;
  }
}

export interface SubmitReceipt {
  receipt: string;
  annotator_id: string;
}

export interface CompletionReceipt {
  completion_code: string;
  annotator_id: string;
  issued_at: string;
}

export interface InterfaceQuery {
  locale?: string;
  annotatorId?: string;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SessionApi {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private submitting = false;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    // bind so an injected bare window.fetch keeps its receiver
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  get submissionInFlight(): boolean {
    return this.submitting;
  }

  async health(): Promise<{ status: string }> {
    return (await this.request("GET", "/api/health")) as { status: string };
  }

  async createSession(body: Record<string, unknown>): Promise<{ session_id: string }> {
    return (await this.request("POST", "/api/session", body)) as { session_id: string };
  }

  async interface_(sessionId: string, query: InterfaceQuery = {}): Promise<InterfaceIR> {
    const params = new URLSearchParams();
    if (query.locale !== undefined) params.set("locale", query.locale);
    if (query.annotatorId !== undefined) params.set("annotator_id", query.annotatorId);
    const suffix = params.size > 0 ? `?${params.toString()}` : "";
    const path = `/api/session/${encodeURIComponent(sessionId)}/interface${suffix}`;
    return (await this.request("GET", path)) as InterfaceIR;
  }

  async submit(sessionId: string, document: AnnotationDocument): Promise<SubmitReceipt> {
    if (this.submitting) {
      throw new Error("a submission is already in flight");
    }
    this.submitting = true;
    try {
      const path = `/api/session/${encodeURIComponent(sessionId)}/annotations`;
      return (await this.request("POST", path, document)) as SubmitReceipt;
    } finally {
      this.submitting = false;
    }
  }

  async annotations(sessionId: string, annotatorId: string): Promise<AnnotationDocument> {
    const path = `/api/session/${encodeURIComponent(sessionId)}` +
      `/annotations/${encodeURIComponent(annotatorId)}`;
    return (await this.request("GET", path)) as AnnotationDocument;
  }

  async adjudicate(sessionId: string, annotators: string[]): Promise<InterfaceIR> {
    const params = new URLSearchParams({ annotators: annotators.join(",") });
    const path = `/api/session/${encodeURIComponent(sessionId)}/adjudicate?${params.toString()}`;
    return (await this.request("GET", path)) as InterfaceIR;
  }

  async complete(sessionId: string, annotatorId: string): Promise<CompletionReceipt> {
    const path = `/api/session/${encodeURIComponent(sessionId)}/complete`;
    return (await this.request("POST", path, { annotator_id: annotatorId })) as CompletionReceipt;
  }

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const init: RequestInit = { method, headers: { accept: "application/json" } };
    if (body !== undefined) {
      init.headers = { ...init.headers, "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await readEnvelope(response));
    }
    return response.json();
  }
}

async function readEnvelope(response: Response): Promise<ErrorEnvelope> {
  try {
    const body = (await response.json()) as Partial<ErrorEnvelope>;
    return {
      code: typeof body.code === "string" ? body.code : "E_HTTP",
      message: typeof body.message === "string" ? body.message : `HTTP ${response.status}`,
      details: Array.isArray(body.details) ? body.details : [],
    };
  } catch {
    return { code: "E_HTTP", message: `HTTP ${response.status}`, details: [] };
  }
}
