import { beforeEach, describe, expect, it } from 'vitest';

import { BundleView } from '../src/bundle.js';
import { FakeApi, SILHOUETTE_SVG, clusteringBundle } from './fake.js';

const REQUEST_ID = '_2026-01-05_12-00-00';

describe('bundle view', () => {
  let root: HTMLElement;
  let api: FakeApi;
  let view: BundleView;

  beforeEach(() => {
    document.body.innerHTML = '<div id="panel"></div>';
    root = document.getElementById('panel')!;
    api = new FakeApi();
    view = new BundleView(root, api);
  });

  it('renders plots inline, tables as grids and latex as code blocks', async () => {
    api.bundles[REQUEST_ID] = clusteringBundle(REQUEST_ID);
    api.artifacts[`${REQUEST_ID}/plots/silhouette.svg`] = SILHOUETTE_SVG;
    api.artifacts[`${REQUEST_ID}/latex/silhouette.tex`] =
      '\\begin{figure}\npretty picture\n\\end{figure}';

    await view.show(REQUEST_ID);

    const svg = root.querySelector('.svg-holder svg');
    expect(svg).not.toBeNull();
    expect(svg!.querySelector('rect')).not.toBeNull();
    expect(view.rawPlots.get('silhouette')).toBe(SILHOUETTE_SVG);

    const headers = [...root.querySelectorAll('.bundle-table th')]
      .map((th) => th.textContent);
    expect(headers).toEqual(['cluster', 'size']);
    const firstRow = [...root.querySelectorAll('.bundle-table tbody tr')][0];
    expect([...firstRow.querySelectorAll('td')].map((td) => td.textContent))
      .toEqual(['0', '62']);

    const code = root.querySelector('.bundle-latex code');
    expect(code!.textContent).toContain('\\begin{figure}');
    expect(root.querySelector('.copy-latex')).not.toBeNull();
  });

  it('shows a not-found view for an unknown request id', async () => {
    await view.show('_1999-01-01_00-00-00');
    expect(root.querySelector('.bundle-not-found')).not.toBeNull();
    expect(root.textContent).toContain('_1999-01-01_00-00-00');
  });

  it('marks missing plot files instead of failing', async () => {
    api.bundles[REQUEST_ID] = clusteringBundle(REQUEST_ID);
    // no artifacts registered at all
    await view.show(REQUEST_ID);
    expect(root.textContent).toContain('missing plot file plots/silhouette.svg');
  });
});
