// Browser bootstrap: connect, render into #root, delegate button clicks.

import { CaseConsole } from './console.js';
import { renderInstance } from './render.js';
import type { ConsoleConfig } from './types.js';

function param(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

export function mount(root: HTMLElement): void {
  const config: ConsoleConfig = {
    baseUrl: param('api', 'http://127.0.0.1:8700'),
    token: param('token', ''),
  };
  const instanceId = param('instance', '');
  if (!instanceId || !config.token) {
    root.innerHTML = '<p>missing ?instance=…&amp;token=… query parameters</p>';
    return;
  }

  const consoleView = new CaseConsole(config, instanceId, ({ vm }) => {
    root.innerHTML =
      (consoleView.notice ? `<p class="notice">${consoleView.notice}</p>` : '') +
      renderInstance(vm);
    if (vm.header.readOnly) {
      root.querySelectorAll('button').forEach((b) => { b.disabled = true; });
    }
    for (const key of root.querySelectorAll<HTMLButtonElement>('button.action')) {
      if (consoleView.isPending(key.dataset.target ?? '', key.dataset.action ?? '')) {
        key.disabled = true;
      }
    }
  }, (err) => {
    const banner = document.createElement('p');
    banner.className = 'notice';
    banner.textContent = `connection problem: ${err}`;
    root.prepend(banner);
  });

  root.addEventListener('click', (raw) => {
    const el = raw.target as HTMLElement;
    if (el instanceof HTMLButtonElement && el.classList.contains('action')) {
      el.disabled = true; // optimistic disable until the stream confirms
      void consoleView.submitAction(el.dataset.target ?? '', el.dataset.action ?? '');
    }
    if (el instanceof HTMLButtonElement && el.classList.contains('plan')) {
      el.disabled = true;
      void consoleView.submitPlan(el.dataset.scope ?? '', el.dataset.entry ?? '');
    }
  });

  void consoleView.open();
}

if (typeof document !== 'undefined') {
  const root = document.getElementById('root');
  if (root) mount(root);
}
