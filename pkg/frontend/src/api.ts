import type {
  IncidentDocument,
  IncidentEnvelope,
  ListResponse,
  TaxonomyDoc,
  Violation,
} from "./types";

export class ApiError extends Error {
  status: number;
  code: string;
  violations: Violation[];

  constructor(status: number, code: string, message: string, violations: Violation[] = []) {
    super(message);
    this.status = status;
    this.code = code;
    this.violations = violations;
  }
}

async function asApiError(response: Response): Promise<ApiError> {
  let code = "HTTP_ERROR";
  let message = `${response.status} ${response.statusText}`;
  let violations: Violation[] = [];
  try {
    const body = await response.json();
    if (body && typeof body.code === "string") {
      code = body.code;
      message = body.message ?? message;
      violations = Array.isArray(body.violations) ? body.violations : [];
    }
  } catch {
    // non-JSON error body; keep the HTTP status text
  }
  return new ApiError(response.status, code, message, violations);
}

/** Thin client over the registry's documented HTTP/JSON API. */
export class ApiClient {
  baseUrl: string;
  apiKey?: string;

  constructor(baseUrl: string, apiKey?: string) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.apiKey = apiKey;
  }

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = {};
    if (this.apiKey) headers["X-API-Key"] = this.apiKey;
    if (json) headers["Content-Type"] = "application/json";
    return headers;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) throw await asApiError(response);
    return response;
  }

  async fetchTaxonomy(): Promise<TaxonomyDoc> {
    const response = await this.request("/taxonomy", { headers: this.headers() });
    return (await response.json()) as TaxonomyDoc;
  }

  async submitIncident(doc: IncidentDocument): Promise<{ incident_id: string; state: string }> {
    const response = await this.request("/incidents", {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(doc),
    });
    return await response.json();
  }

  async listIncidents(params: Record<string, string> = {}): Promise<ListResponse> {
    const query = new URLSearchParams(params).toString();
    const response = await this.request(`/incidents${query ? "?" + query : ""}`, {
      headers: this.headers(),
    });
    return (await response.json()) as ListResponse;
  }

  async getIncident(id: string): Promise<IncidentEnvelope> {
    const response = await this.request(`/incidents/${id}`, { headers: this.headers() });
    const body = await response.json();
    // Public-tier responses are the bare record document.
    if (body.record === undefined) {
      return { incident_id: body.incident_id, state: "published", record: body };
    }
    return body as IncidentEnvelope;
  }

  async review(id: string, action: string, reason = ""): Promise<{ incident_id: string; state: string }> {
    const response = await this.request(`/incidents/${id}/review`, {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify({ action, reason }),
    });
    return await response.json();
  }
}
