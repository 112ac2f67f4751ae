// HTTP client for the workbench session service.
//
// The UI talks to the backend exclusively through this interface; tests
// substitute a scripted fake, which also guarantees the UI never
// computes ML numbers on its own.

import type { BundleIndex, EventBatch } from './types.js';

export interface WorkbenchApi {
  createSession(): Promise<string>;
  postMessage(sessionId: string, text: string): Promise<void>;
  eventsAfter(sessionId: string, after: number, waitSeconds?: number): Promise<EventBatch>;
  fetchBundle(requestId: string): Promise<BundleIndex | null>;
  fetchArtifact(requestId: string, file: string): Promise<string | null>;
}

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

export class HttpApi implements WorkbenchApi {
  constructor(private readonly baseUrl: string = '') {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(`network failure: ${String(err)}`);
    }
    return response;
  }

  async createSession(): Promise<string> {
    const response = await this.request('/sessions', { method: 'POST' });
    if (!response.ok) throw new ApiError('could not open a session', response.status);
    const data = (await response.json()) as { session_id: string };
    return data.session_id;
  }

  async postMessage(sessionId: string, text: string): Promise<void> {
    const response = await this.request(`/sessions/${sessionId}/messages`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ text }),
    });
    if (!response.ok) throw new ApiError('message rejected', response.status);
  }

  async eventsAfter(sessionId: string, after: number, waitSeconds = 2): Promise<EventBatch> {
    const response = await this.request(
      `/sessions/${sessionId}/events?after=${after}&wait=${waitSeconds}`,
    );
    if (!response.ok) throw new ApiError('event poll failed', response.status);
    return (await response.json()) as EventBatch;
  }

  async fetchBundle(requestId: string): Promise<BundleIndex | null> {
    const response = await this.request(`/bundles/${requestId}/bundle.json`);
    if (response.status === 404) return null;
    if (!response.ok) throw new ApiError('bundle fetch failed', response.status);
    return (await response.json()) as BundleIndex;
  }

  async fetchArtifact(requestId: string, file: string): Promise<string | null> {
    const response = await this.request(`/bundles/${requestId}/${file}`);
    if (response.status === 404) return null;
    if (!response.ok) throw new ApiError('artifact fetch failed', response.status);
    return await response.text();
  }
}
