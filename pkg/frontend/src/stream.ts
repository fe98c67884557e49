// Server-sent event subscription built on fetch streaming so the same code
// runs in browsers and in node-based tests.  The server closes idle streams;
// the reader reconnects from its cursor until stopped.

import type { ConsoleConfig, StandardEvent } from './types.js';

export interface Subscription {
  stop(): void;
}

export function subscribeEvents(
  config: ConsoleConfig,
  instanceId: string,
  onEvent: (event: StandardEvent) => void,
  options: { after?: number; onError?: (err: unknown) => void } = {},
): Subscription {
  let cursor = options.after ?? 0;
  let stopped = false;
  let controller: AbortController | null = null;

  async function readOnce(): Promise<void> {
    controller = new AbortController();
    const response = await fetch(
      `${config.baseUrl}/instances/${instanceId}/events?after=${cursor}&wait=5`,
      {
        headers: { Authorization: `Bearer ${config.token}` },
        signal: controller.signal,
      },
    );
    if (!response.ok || !response.body) {
      throw new Error(`event stream failed: ${response.status}`);
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = '';
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let index;
      while ((index = buffer.indexOf('\n\n')) >= 0) {
        const frame = buffer.slice(0, index);
        buffer = buffer.slice(index + 2);
        for (const line of frame.split('\n')) {
          if (!line.startsWith('data: ')) continue;
          const body = line.slice('data: '.length);
          if (body === '{}') continue; // idle keepalive
          const event = JSON.parse(body) as StandardEvent;
          if (event.seq > cursor) {
            cursor = event.seq;
            onEvent(event);
          }
        }
      }
    }
  }

  (async () => {
    while (!stopped) {
      try {
        await readOnce();
      } catch (err) {
        if (stopped) return;
        options.onError?.(err);
        await new Promise((resolve) => setTimeout(resolve, 250));
      }
    }
  })();

  return {
    stop() {
      stopped = true;
      controller?.abort();
    },
  };
}
