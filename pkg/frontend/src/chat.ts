// Chat view: renders the session event stream as conversation turns and
// routes user input back to the service (commands, answers, y/n gate).

import type { WorkbenchApi } from './api.js';
import type {
  ChatTurn,
  EstimatePayload,
  ResultPayload,
  SessionEvent,
} from './types.js';

export interface ChatOptions {
  onBundleOpen?: (requestId: string) => void;
  pollWaitSeconds?: number;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ChatView {
  readonly turns: ChatTurn[] = [];
  private sessionId: string | null = null;
  private cursor = -1;
  private pumping = false;
  private awaitingAnswer = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: WorkbenchApi,
    private readonly options: ChatOptions = {},
  ) {}

  async start(): Promise<void> {
    this.sessionId = await this.api.createSession();
  }

  get awaitingInput(): boolean {
    return this.awaitingAnswer;
  }

  /** Sends a command (or the answer to the pending question). */
  async send(text: string): Promise<void> {
    const trimmed = text.trim();
    if (!trimmed || !this.sessionId) return; // empty input: send is a no-op
    this.addTurn('user', 'user-text', el('div', 'turn user', trimmed));
    this.awaitingAnswer = false;
    await this.api.postMessage(this.sessionId, trimmed);
    await this.pump();
  }

  /** Drains events until the session goes idle or blocks on a question. */
  async pump(): Promise<void> {
    if (this.pumping || !this.sessionId) return;
    this.pumping = true;
    try {
      for (;;) {
        const batch = await this.api.eventsAfter(
          this.sessionId,
          this.cursor,
          this.options.pollWaitSeconds ?? 2,
        );
        for (const event of batch.events) {
          this.cursor = Math.max(this.cursor, event.seq);
          this.renderEvent(event);
        }
        if (batch.waiting) {
          // The service is blocked on the question just rendered; the
          // stream stays paused until the user answers.
          this.awaitingAnswer = true;
          return;
        }
        if (!batch.busy && batch.events.length === 0) return;
      }
    } finally {
      this.pumping = false;
    }
  }

  // -- rendering ------------------------------------------------------------

  private addTurn(author: ChatTurn['author'], kind: ChatTurn['kind'],
                  element: HTMLElement): void {
    this.turns.push({ author, kind, element });
    this.root.appendChild(element);
  }

  private renderEvent(event: SessionEvent): void {
    switch (event.kind) {
      case 'prompt':
      case 'info':
        this.addTurn('framework', event.kind,
          el('div', `turn framework ${event.kind}`,
            String(event.payload.text ?? '')));
        break;
      case 'question':
        this.addTurn('framework', 'question',
          el('div', 'turn framework question',
            String(event.payload.prompt ?? '')));
        break;
      case 'estimate':
        this.addTurn('framework', 'estimate',
          this.estimateCard(event.payload as unknown as EstimatePayload));
        break;
      case 'confirm':
        this.addTurn('framework', 'confirm', this.confirmControl());
        break;
      case 'result':
        this.addTurn('framework', 'result',
          this.resultCard(event.payload as unknown as ResultPayload));
        break;
      case 'error':
        this.addTurn('framework', 'error',
          el('div', 'turn framework error',
            `Error: ${String(event.payload.message ?? '')}`));
        break;
    }
  }

  private estimateCard(payload: EstimatePayload): HTMLElement {
    const card = el('div', 'turn framework estimate-card');
    if (payload.available) {
      const duration = el('div', 'estimate-duration');
      duration.textContent =
        `Predicted execution time (in sec): ${Number(payload.duration_s).toFixed(3)}`;
      const ghg = el('div', 'estimate-ghg');
      ghg.textContent =
        `Predicted generated GHG: ${Number(payload.emissions_kg).toExponential(3)} kg CO2`;
      card.append(duration, ghg);
    } else {
      card.appendChild(el('div', 'estimate-unavailable',
        'No footprint estimate available yet (request history too small).'));
    }
    if (payload.similar.length > 0) {
      card.appendChild(el('div', 'similar-title',
        'Here are the most similar requests in case launching another request can be avoided.'));
      const list = el('ul', 'similar-requests');
      for (const record of payload.similar) {
        list.appendChild(el('li', 'similar-request',
          `Request ${record.request_id} using dataset ${record.dataset_name}`));
      }
      card.appendChild(list);
    }
    return card;
  }

  private confirmControl(): HTMLElement {
    const control = el('div', 'turn framework confirm-control');
    control.appendChild(el('span', 'confirm-prompt', 'Launch the request (y/n)?'));
    const yes = el('button', 'confirm-yes', 'y');
    const no = el('button', 'confirm-no', 'n');
    const answer = (value: string) => async () => {
      if (yes.disabled) return;
      yes.disabled = true; // a gate is answered exactly once
      no.disabled = true;
      control.classList.add('answered');
      this.awaitingAnswer = false;
      if (this.sessionId) {
        await this.api.postMessage(this.sessionId, value);
        await this.pump();
      }
    };
    yes.addEventListener('click', answer('y'));
    no.addEventListener('click', answer('n'));
    control.append(yes, no);
    return control;
  }

  private resultCard(payload: ResultPayload): HTMLElement {
    const card = el('div', 'turn framework result-card');
    const title = payload.request_id
      ? `Request ${payload.request_id} finished`
      : `${payload.problem} finished`;
    card.appendChild(el('div', 'result-title', title));

    const summary = el('dl', 'result-summary');
    for (const [key, value] of Object.entries(payload.summary)) {
      summary.appendChild(el('dt', undefined, key));
      summary.appendChild(el('dd', undefined, JSON.stringify(value)));
    }
    card.appendChild(summary);

    if (payload.request_id) {
      const link = el('button', 'bundle-link',
        `View explanations for ${payload.request_id}`);
      const requestId = payload.request_id;
      link.addEventListener('click', () => {
        this.options.onBundleOpen?.(requestId);
      });
      card.appendChild(link);
    }
    return card;
  }
}
