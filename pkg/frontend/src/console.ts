// Console controller: subscribes to the event stream and re-renders from
// fresh server views on every delivery.  Stale actions surface the server's
// 403/409 reason as an inline notice instead of mutating anything locally.

import { ApiClient, ApiError } from './api.js';
import { subscribeEvents, type Subscription } from './stream.js';
import { buildInstanceView, type InstanceViewModel } from './viewmodel.js';
import type { ConsoleConfig } from './types.js';

export interface RenderedUpdate {
  vm: InstanceViewModel;
  trigger: 'initial' | 'event' | 'action';
  deliveries: number; // stream deliveries seen so far
}

export class CaseConsole {
  readonly api: ApiClient;
  private subscription: Subscription | null = null;
  private deliveries = 0;
  private refreshing: Promise<void> | null = null;
  private refreshAgain = false;
  private pending = new Set<string>(); // optimistic disable per target|action
  notice = '';

  constructor(
    private config: ConsoleConfig,
    private instanceId: string,
    private onRender: (update: RenderedUpdate) => void,
    private onError: (err: unknown) => void = () => {},
  ) {
    this.api = new ApiClient(config);
  }

  async open(): Promise<void> {
    await this.refresh('initial');
    this.subscription = subscribeEvents(this.config, this.instanceId, () => {
      this.deliveries += 1;
      void this.scheduleRefresh();
    }, { onError: this.onError });
  }

  close(): void {
    this.subscription?.stop();
    this.subscription = null;
  }

  isPending(target: string, action: string): boolean {
    return this.pending.has(`${target}|${action}`);
  }

  private async scheduleRefresh(): Promise<void> {
    // coalesce bursts: one refresh at a time, one more queued at most
    if (this.refreshing) {
      this.refreshAgain = true;
      return;
    }
    this.refreshing = this.refresh('event').finally(() => {
      this.refreshing = null;
      if (this.refreshAgain) {
        this.refreshAgain = false;
        void this.scheduleRefresh();
      }
    });
    await this.refreshing;
  }

  private async refresh(trigger: 'initial' | 'event' | 'action'): Promise<void> {
    try {
      const [summary, items, milestones, caseFile, plannable, history] = await Promise.all([
        this.api.summary(this.instanceId),
        this.api.items(this.instanceId),
        this.api.milestones(this.instanceId),
        this.api.caseFile(this.instanceId),
        this.api.plannable(this.instanceId),
        this.api.history(this.instanceId),
      ]);
      const vm = buildInstanceView(summary, items, milestones, caseFile, plannable, history);
      this.onRender({ vm, trigger, deliveries: this.deliveries });
    } catch (err) {
      this.onError(err);
    }
  }

  /** Submit a worker action; the button stays disabled until the event
   * stream confirms (the next refresh re-derives it from the server). */
  async submitAction(target: string, action: string, payload?: unknown): Promise<void> {
    const key = `${target}|${action}`;
    this.pending.add(key);
    this.notice = '';
    try {
      await this.api.action(this.instanceId, target, action, payload);
    } catch (err) {
      if (err instanceof ApiError) {
        this.notice = `${action} on ${target} refused (${err.status}): ${err.message}`;
      } else {
        this.onError(err);
      }
    } finally {
      this.pending.delete(key);
      await this.refresh('action');
    }
  }

  async submitPlan(scope: string, entry: string): Promise<void> {
    this.notice = '';
    try {
      await this.api.plan(this.instanceId, scope, entry);
    } catch (err) {
      if (err instanceof ApiError) {
        this.notice = `planning ${entry} refused (${err.status}): ${err.message}`;
      } else {
        this.onError(err);
      }
    } finally {
      await this.refresh('action');
    }
  }
}
