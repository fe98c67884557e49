// Secondary acceptance: a case file create issued through the API flips the
// corresponding milestone in an open console without any reload, on the
// stream delivery that carries it.

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { CaseConsole } from '../src/console.js';
import { renderInstance } from '../src/render.js';
import type { RenderedUpdate } from '../src/console.js';
import { startServer, type TestServer } from './server.js';

let server: TestServer;

beforeAll(async () => {
  server = await startServer();
}, 30000);

afterAll(async () => {
  await server.stop();
});

function waitFor<T>(checks: (update: RenderedUpdate) => T | undefined,
                    timeoutMs = 10000): { promise: Promise<T>; push: (u: RenderedUpdate) => void } {
  let resolve!: (value: T) => void;
  let reject!: (err: Error) => void;
  const promise = new Promise<T>((res, rej) => { resolve = res; reject = rej; });
  const timer = setTimeout(() => reject(new Error('timed out waiting for update')), timeoutMs);
  return {
    promise,
    push(update) {
      const hit = checks(update);
      if (hit !== undefined) {
        clearTimeout(timer);
        resolve(hit);
      }
    },
  };
}

describe('live updates', () => {
  it('flips the milestone board without reload when data arrives', async () => {
    await server.createInstance('live');
    const owner = new ApiClient({ baseUrl: server.baseUrl, token: server.tokens.owner });
    await owner.caseFileOp('live', 'create', 'productComplaint');

    const updates: RenderedUpdate[] = [];
    const flipped = waitFor<RenderedUpdate>((update) => {
      const milestone = update.vm.milestoneBoard.find((m) => m.definitionId === 'completed');
      return milestone?.occurred ? update : undefined;
    });
    const consoleView = new CaseConsole(
      { baseUrl: server.baseUrl, token: server.tokens.specialist },
      'live',
      (update) => { updates.push(update); flipped.push(update); },
    );
    await consoleView.open();
    try {
      const initial = updates[0];
      expect(initial.trigger).toBe('initial');
      expect(initial.vm.milestoneBoard.find((m) => m.definitionId === 'completed')?.occurred)
        .toBe(false);
      expect(renderInstance(initial.vm)).toContain('Completed: available');

      // a different session creates the report through the API
      const specialist = new ApiClient({
        baseUrl: server.baseUrl, token: server.tokens.specialist });
      await specialist.caseFileOp('live', 'create', 'report');

      const update = await flipped.promise;
      // the re-render was triggered by a stream delivery, not a reload
      expect(update.trigger).toBe('event');
      expect(update.deliveries).toBeGreaterThan(0);
      expect(renderInstance(update.vm)).toContain('Completed: occurred');
    } finally {
      consoleView.close();
    }
  }, 30000);

  it('surfaces a stale action as an inline notice and recovers', async () => {
    await server.createInstance('stale');
    const updates: RenderedUpdate[] = [];
    const consoleView = new CaseConsole(
      { baseUrl: server.baseUrl, token: server.tokens.owner },
      'stale',
      (update) => updates.push(update),
    );
    await consoleView.open();
    try {
      // completing an unclaimed blocking task is a 409 at the server
      await consoleView.submitAction('sendLetter#0', 'complete');
      expect(consoleView.notice).toContain('refused (409)');
      // the console kept working: the refresh after the failure rendered
      expect(updates[updates.length - 1].vm.header.caseState).toBe('active');
    } finally {
      consoleView.close();
    }
  }, 30000);
});
