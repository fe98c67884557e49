// Thin client over the casewright HTTP endpoints.  The server holds all
// business rules; this module only moves JSON.

import type {
  CaseFileView,
  CaseSummary,
  ConsoleConfig,
  ItemView,
  MilestoneView,
  PlannableEntry,
  StandardEvent,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public kind: string,
    detail: string,
  ) {
    super(`${kind}: ${detail}`);
  }
}

let keyCounter = 0;

export function freshIdempotencyKey(): string {
  keyCounter += 1;
  return `console-${Date.now()}-${keyCounter}`;
}

export class ApiClient {
  constructor(private config: ConsoleConfig) {}

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    return {
      Authorization: `Bearer ${this.config.token}`,
      'Content-Type': 'application/json',
      ...extra,
    };
  }

  private async request<T>(method: string, path: string, body?: unknown,
                           idempotencyKey?: string): Promise<T> {
    const extra: Record<string, string> = {};
    if (idempotencyKey) extra['Idempotency-Key'] = idempotencyKey;
    const response = await fetch(`${this.config.baseUrl}${path}`, {
      method,
      headers: this.headers(extra),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(response.status, payload.error ?? 'HttpError',
        payload.detail ?? response.statusText);
    }
    return payload as T;
  }

  private async view<T>(instanceId: string, view: string): Promise<T> {
    const doc = await this.request<{ view: string; data: T }>(
      'GET', `/instances/${instanceId}/${view}`);
    return doc.data;
  }

  listInstances(): Promise<string[]> {
    return this.request<{ instances: string[] }>('GET', '/instances')
      .then((d) => d.instances);
  }

  summary(instanceId: string): Promise<CaseSummary> {
    return this.view(instanceId, 'summary');
  }

  items(instanceId: string): Promise<ItemView[]> {
    return this.view(instanceId, 'items');
  }

  milestones(instanceId: string): Promise<MilestoneView[]> {
    return this.view(instanceId, 'milestones');
  }

  caseFile(instanceId: string): Promise<CaseFileView[]> {
    return this.view(instanceId, 'case_file');
  }

  plannable(instanceId: string): Promise<PlannableEntry[]> {
    return this.view(instanceId, 'plannable');
  }

  history(instanceId: string): Promise<StandardEvent[]> {
    return this.view(instanceId, 'history');
  }

  action(instanceId: string, target: string, action: string, payload?: unknown):
      Promise<StandardEvent[]> {
    return this.request<{ events: StandardEvent[] }>(
      'POST', `/instances/${instanceId}/actions`,
      { target, action, payload: payload ?? null }, freshIdempotencyKey(),
    ).then((d) => d.events);
  }

  caseFileOp(instanceId: string, op: string, path: string, payload?: unknown):
      Promise<StandardEvent[]> {
    return this.request<{ events: StandardEvent[] }>(
      'POST', `/instances/${instanceId}/casefile`,
      { op, path, payload: payload ?? null }, freshIdempotencyKey(),
    ).then((d) => d.events);
  }

  plan(instanceId: string, scope: string, entry: string): Promise<StandardEvent[]> {
    return this.request<{ events: StandardEvent[] }>(
      'POST', `/instances/${instanceId}/plan`,
      { scope, entry }, freshIdempotencyKey(),
    ).then((d) => d.events);
  }

  advanceClock(instanceId: string, ticks: number): Promise<StandardEvent[]> {
    return this.request<{ events: StandardEvent[] }>(
      'POST', `/instances/${instanceId}/clock`,
      { ticks }, freshIdempotencyKey(),
    ).then((d) => d.events);
  }
}
