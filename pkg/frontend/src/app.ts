/** Browser bootstrap: wires the navigator and ask panel to the DOM. */

import { ApiClient } from './api.js';
import { AskPanel } from './askPanel.js';
import { resolveBaseUrl } from './config.js';
import { renderAskPanel, renderBreadcrumb, renderNeighborhood } from './render.js';
import { Navigator } from './traversal.js';

function mount(): void {
  const api = new ApiClient(resolveBaseUrl());
  const navigator = new Navigator(api);
  const askPanel = new AskPanel(api);

  const neighborhood = document.getElementById('neighborhood')!;
  const breadcrumb = document.getElementById('breadcrumb')!;
  const answers = document.getElementById('answers')!;
  const startForm = document.getElementById('start-form') as HTMLFormElement;
  const askForm = document.getElementById('ask-form') as HTMLFormElement;

  function repaint(): void {
    neighborhood.innerHTML = renderNeighborhood(navigator.state);
    breadcrumb.innerHTML = renderBreadcrumb(navigator.state);
    answers.innerHTML = renderAskPanel(askPanel.state);
  }

  neighborhood.addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    const optionIndex = target.closest<HTMLElement>('[data-option]')?.dataset.option;
    if (optionIndex === undefined) return;
    const option = navigator.state.options[Number(optionIndex)];
    if (!option) return;
    void navigator.step(option).then(repaint);
  });

  breadcrumb.addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    if (target.id === 'back') {
      void navigator.back().then(repaint);
    }
  });

  answers.addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    const answerIndex = target.closest<HTMLElement>('[data-answer]')?.dataset.answer;
    if (answerIndex === undefined) return;
    const answer = askPanel.state.answers[Number(answerIndex)];
    if (!answer) return;
    void navigator.loadPath(answer.nodeIds).then(repaint);
  });

  startForm.addEventListener('submit', (event) => {
    event.preventDefault();
    const input = startForm.elements.namedItem('node') as HTMLInputElement;
    if (input.value.trim()) {
      void navigator.start(input.value.trim()).then(repaint, (error) => {
        neighborhood.innerHTML = `<div class="banner">${String(error)}</div>`;
      });
    }
  });

  askForm.addEventListener('submit', (event) => {
    event.preventDefault();
    const input = askForm.elements.namedItem('question') as HTMLInputElement;
    const question = input.value.trim();
    if (!question) return;
    navigator.setPendingQuestion(question);
    answers.innerHTML = '<p class="hint">Asking…</p>';
    void askPanel.submit(question).then(repaint);
  });

  repaint();
}

document.addEventListener('DOMContentLoaded', mount);
