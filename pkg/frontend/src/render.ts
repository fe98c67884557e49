// HTML renderers: pure string builders over the view model, so tests can
// inspect exactly what a worker would see.

import type { InstanceViewModel, ItemCard } from './viewmodel.js';
import { kindIcon } from './viewmodel.js';

function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderActionButton(target: string, action: string): string {
  return `<button class="action" data-target="${esc(target)}" data-action="${esc(action)}">${esc(action)}</button>`;
}

export function renderItemCard(card: ItemCard): string {
  const buttons = card.actions.map((a) => renderActionButton(card.id, a)).join('');
  const claim = card.claimedBy ? `<span class="claimed">claimed by ${esc(card.claimedBy)}</span>` : '';
  const badge = card.discretionary ? '<span class="badge">planned</span>' : '';
  return [
    `<article class="card state-${esc(card.state)}" data-item="${esc(card.id)}">`,
    `<h3>${kindIcon(card.kind)} ${esc(card.name)}</h3>`,
    `<p class="state">${esc(card.state)}</p>`,
    claim,
    badge,
    `<div class="actions">${buttons}</div>`,
    '</article>',
  ].join('');
}

export function renderMilestoneBoard(vm: InstanceViewModel): string {
  const rows = vm.milestoneBoard.map((m) => {
    const status = m.occurred ? 'occurred' : 'available';
    const times = m.occurrences > 1 ? ` ×${m.occurrences}` : '';
    return `<li class="milestone ${status}" data-milestone="${esc(m.definitionId)}">◇ ${esc(m.name)}: ${status}${times}</li>`;
  });
  return `<ul class="milestones">${rows.join('')}</ul>`;
}

export function renderCaseFile(vm: InstanceViewModel): string {
  const rows = vm.caseFileTree.map((entry) => {
    const mark = entry.exists ? '●' : '○';
    const kids = entry.children.length ? ` (${entry.children.length})` : '';
    return `<li class="cfi" data-path="${esc(entry.path)}">${mark} ${esc(entry.path)}${kids}</li>`;
  });
  return `<ul class="casefile">${rows.join('')}</ul>`;
}

export function renderPlannable(vm: InstanceViewModel): string {
  const rows = vm.plannable.map((p) =>
    `<li><button class="plan" data-scope="${esc(p.scope)}" data-entry="${esc(p.entry)}">plan ${esc(p.name)}</button> <small>in ${esc(p.scopeName)}</small></li>`);
  return `<ul class="plannable">${rows.join('')}</ul>`;
}

export function renderFeed(vm: InstanceViewModel): string {
  const rows = vm.feed.map((e) =>
    `<li data-seq="${e.seq}">#${e.seq} ${esc(e.source)} ${esc(e.name)} <small>${esc(e.actor)}</small></li>`);
  return `<ol class="feed">${rows.join('')}</ol>`;
}

export function renderInstance(vm: InstanceViewModel): string {
  const caseButtons = vm.header.actions.map((a) => renderActionButton('case', a)).join('');
  return [
    `<header data-state="${esc(vm.header.caseState)}">`,
    `<h2>${esc(vm.header.name)} <small>${esc(vm.header.instanceId)}</small></h2>`,
    `<p>case: ${esc(vm.header.caseState)} · clock ${vm.header.clock}` +
      (vm.header.completable ? ' · completable' : '') +
      (vm.header.readOnly ? ' · read-only' : '') + '</p>',
    `<div class="actions">${caseButtons}</div>`,
    '</header>',
    `<section class="items">${vm.cards.map(renderItemCard).join('')}</section>`,
    `<section class="board">${renderMilestoneBoard(vm)}</section>`,
    `<section class="data">${renderCaseFile(vm)}</section>`,
    `<section class="planning">${renderPlannable(vm)}</section>`,
    `<section class="history">${renderFeed(vm)}</section>`,
  ].join('\n');
}

/** The action buttons visible on one element's card, in rendered order. */
export function renderedActions(html: string, target: string): string[] {
  const out: string[] = [];
  const re = /<button class="action" data-target="([^"]*)" data-action="([^"]*)"/g;
  for (const match of html.matchAll(re)) {
    if (match[1] === target) out.push(match[2]);
  }
  return out;
}
