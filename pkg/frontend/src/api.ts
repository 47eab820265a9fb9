// Typed fetch client for the dose-finding service. The console talks only to
// the documented /v1 endpoints and renders whatever they return.

import type { ContourDoc, Design, DtpDoc, SessionDoc } from "./types.js";

export class ApiRequestError extends Error {
  status: number;
  payload: Record<string, unknown>;

  constructor(status: number, payload: Record<string, unknown>) {
    super(typeof payload.error === "string" ? payload.error : `HTTP ${status}`);
    this.status = status;
    this.payload = payload;
  }
}

export class ApiClient {
  baseUrl: string;

  constructor(baseUrl = "http://127.0.0.1:8000") {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    const body = await res.json();
    if (!res.ok) {
      throw new ApiRequestError(res.status, body);
    }
    return body as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("/v1/health");
  }

  createSession(body: {
    design: Design;
    crm_spec?: Record<string, unknown>;
    efftox_spec?: Record<string, unknown>;
    outcomes?: string;
    policy?: Record<string, unknown>;
    sampler?: Record<string, unknown>;
  }): Promise<SessionDoc> {
    return this.request("/v1/sessions", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getSession(sessionId: string): Promise<SessionDoc> {
    return this.request(`/v1/sessions/${sessionId}`);
  }

  appendOutcomes(sessionId: string, outcomes: string, revision: number): Promise<SessionDoc> {
    return this.request(`/v1/sessions/${sessionId}/outcomes`, {
      method: "POST",
      body: JSON.stringify({ outcomes, revision }),
    });
  }

  sessionDtp(sessionId: string, cohortSizes: number[], nextDose?: number): Promise<DtpDoc> {
    const params = new URLSearchParams({ cohort_sizes: cohortSizes.join(",") });
    if (nextDose !== undefined) params.set("next_dose", String(nextDose));
    return this.request(`/v1/sessions/${sessionId}/dtp?${params}`);
  }

  sessionContour(sessionId: string, resolution = 51): Promise<ContourDoc> {
    return this.request(
      `/v1/sessions/${sessionId}/contour?resolution=${resolution}`,
    );
  }
}
