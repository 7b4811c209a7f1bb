/** HTML fragments for the two panes. Pure string builders over server
 * data; all dynamic text is escaped and shown verbatim. */

import { AnswerPayload, NeighborEntry } from './api.js';
import { AskPanelState } from './askPanel.js';
import { TraversalState, badgeColor, groupByRelation } from './traversal.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

function badge(category: string | null): string {
  const label = category ?? 'Unlabeled';
  return `<span class="badge" style="background:${badgeColor(category)}">${escapeHtml(label)}</span>`;
}

function contextLine(context: string | null): string {
  return context === null ? '' : `<div class="context">${escapeHtml(context)}</div>`;
}

/** Left pane: the current node and its outgoing options grouped by relation. */
export function renderNeighborhood(state: TraversalState): string {
  if (!state.current) {
    return '<p class="hint">Pick a starting node to begin.</p>';
  }
  const current = state.current;
  const parts: string[] = [];
  if (state.staleEdge) {
    parts.push(
      '<div class="banner">The graph changed on the server; this step is no longer valid. ' +
        'Refresh the options before continuing.</div>',
    );
  }
  parts.push(
    `<div class="current">${badge(current.category)}<h2>${escapeHtml(current.content)}</h2>` +
      contextLine(current.context) +
      (current.page ? `<div class="page">${escapeHtml(current.page)}</div>` : '') +
      '</div>',
  );
  if (state.options.length === 0) {
    parts.push('<p class="hint">This is a terminal step: no outgoing relations.</p>');
    return parts.join('\n');
  }
  for (const [relation, entries] of groupByRelation(state.options)) {
    const items = entries
      .map((entry) => {
        const optionIndex = state.options.indexOf(entry);
        return (
          `<li><button class="option" data-option="${optionIndex}">` +
          `${badge(entry.node.category)} ${escapeHtml(entry.node.content)}</button></li>`
        );
      })
      .join('');
    parts.push(
      `<div class="relation-group"><h3>${escapeHtml(relation)}</h3><ul>${items}</ul></div>`,
    );
  }
  return parts.join('\n');
}

/** Right pane, top: the breadcrumb of visited steps. */
export function renderBreadcrumb(state: TraversalState): string {
  if (state.breadcrumb.length === 0) {
    return '<p class="hint">No steps yet.</p>';
  }
  const items = state.breadcrumb
    .map((step, index) => {
      const arrow = step.relation === null ? '' : `<span class="rel">—${escapeHtml(step.relation)}→</span> `;
      return (
        `<li>${arrow}${badge(step.node.category)} ` +
        `<span class="crumb" data-crumb="${index}">${escapeHtml(step.node.content)}</span></li>`
      );
    })
    .join('');
  const back = state.breadcrumb.length > 1 ? '<button id="back">← back</button>' : '';
  return `<ol class="breadcrumb">${items}</ol>${back}`;
}

function renderAnswer(answer: AnswerPayload, index: number): string {
  const marker = answer.fallbackUsed ? ' <span class="fallback">non-canonical wording</span>' : '';
  return (
    `<div class="answer"><button class="load-path" data-answer="${index}">open in navigator</button>` +
    `${marker}<p>${escapeHtml(answer.text)}</p></div>`
  );
}

/** Right pane, bottom: generated query, answers or error classification. */
export function renderAskPanel(state: AskPanelState): string {
  const parts: string[] = [];
  if (state.phase === 'idle') {
    return '<p class="hint">Ask a question about the guideline.</p>';
  }
  if (state.phase === 'loading') {
    return '<p class="hint">Asking…</p>';
  }
  if (state.query !== null) {
    parts.push(`<details open><summary>generated query</summary><pre>${escapeHtml(state.query)}</pre></details>`);
  }
  if (state.message !== null) {
    parts.push(`<div class="banner">${escapeHtml(state.message)}</div>`);
  }
  if (state.phase === 'answered' && state.errorType === null) {
    if (state.answers.length === 0) {
      parts.push('<p class="hint">The query ran but matched no paths.</p>');
    } else {
      parts.push(state.answers.map(renderAnswer).join('\n'));
    }
  }
  return parts.join('\n');
}
