// Bundle browser: shows the plots, tables and LaTeX text of one request.
//
// All content comes verbatim from the service: SVG markup is inlined
// byte-for-byte, tables are rendered from the bundle index rows, LaTeX
// sources become copyable code blocks.

import type { WorkbenchApi } from './api.js';

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

export class BundleView {
  /** Exact artifact bytes as served, keyed by plot name (what is shown). */
  readonly rawPlots = new Map<string, string>();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: WorkbenchApi,
  ) {}

  async show(requestId: string): Promise<void> {
    this.root.textContent = '';
    this.rawPlots.clear();
    const index = await this.api.fetchBundle(requestId);
    if (index === null) {
      this.root.appendChild(el('div', 'bundle-not-found',
        `No explanation bundle found for ${requestId}.`));
      return;
    }

    this.root.appendChild(el('h2', 'bundle-title',
      `Explanations for request ${index.request_id}`));

    for (const note of index.notes) {
      this.root.appendChild(el('div', 'bundle-note', note));
    }

    for (const plot of index.plots) {
      const figure = el('figure', 'bundle-plot');
      figure.dataset.name = plot.name;
      figure.dataset.kind = plot.kind;
      const svg = await this.api.fetchArtifact(requestId, plot.file);
      const holder = el('div', 'svg-holder');
      if (svg !== null) {
        this.rawPlots.set(plot.name, svg);
        holder.innerHTML = svg; // exact service bytes, rendered inline
      } else {
        holder.textContent = `missing plot file ${plot.file}`;
      }
      figure.appendChild(holder);
      figure.appendChild(el('figcaption', undefined, plot.title));
      this.root.appendChild(figure);
    }

    for (const table of index.tables) {
      const wrapper = el('div', 'bundle-table');
      wrapper.dataset.name = table.name;
      const grid = el('table');
      const head = el('thead');
      const headRow = el('tr');
      for (const header of table.headers) {
        headRow.appendChild(el('th', undefined, String(header)));
      }
      head.appendChild(headRow);
      grid.appendChild(head);
      const body = el('tbody');
      for (const row of table.rows) {
        const tr = el('tr');
        for (const cell of row) tr.appendChild(el('td', undefined, String(cell)));
        body.appendChild(tr);
      }
      grid.appendChild(body);
      wrapper.appendChild(grid);
      this.root.appendChild(wrapper);
    }

    for (const entry of index.latex) {
      const source = await this.api.fetchArtifact(requestId, entry.file);
      if (source === null) continue;
      const block = el('div', 'bundle-latex');
      block.dataset.name = entry.name;
      const pre = el('pre');
      pre.appendChild(el('code', 'latex-source', source));
      const copy = el('button', 'copy-latex', 'Copy LaTeX');
      copy.addEventListener('click', () => {
        void navigator.clipboard?.writeText(source);
      });
      block.append(copy, pre);
      this.root.appendChild(block);
    }
  }
}
