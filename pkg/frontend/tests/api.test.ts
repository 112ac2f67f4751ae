import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiError, HttpApi } from '../src/api.js';

describe('http api client', () => {
  const calls: { url: string; init?: RequestInit }[] = [];

  beforeEach(() => {
    calls.length = 0;
  });

  afterEach(() => {
    vi.unstubAllGlobals();
  });

  function stubFetch(responder: (url: string) => Response) {
    vi.stubGlobal('fetch', (url: string, init?: RequestInit) => {
      calls.push({ url, init });
      return Promise.resolve(responder(url));
    });
  }

  it('opens sessions and posts messages to the right endpoints', async () => {
    stubFetch((url) => {
      if (url.endsWith('/sessions')) {
        return new Response(JSON.stringify({ session_id: 's1' }));
      }
      return new Response(JSON.stringify({ accepted: true }));
    });
    const api = new HttpApi('http://svc');
    const sid = await api.createSession();
    expect(sid).toBe('s1');
    await api.postMessage(sid, 'hello');
    expect(calls[1].url).toBe('http://svc/sessions/s1/messages');
    expect(JSON.parse(String(calls[1].init?.body))).toEqual({ text: 'hello' });
  });

  it('polls events with cursor and wait parameters', async () => {
    stubFetch(() => new Response(
      JSON.stringify({ events: [], busy: false, waiting: false })));
    const api = new HttpApi('http://svc');
    const batch = await api.eventsAfter('s1', 7, 3);
    expect(calls[0].url).toBe('http://svc/sessions/s1/events?after=7&wait=3');
    expect(batch.events).toEqual([]);
  });

  it('returns null for a missing bundle and raises on server errors', async () => {
    stubFetch((url) => new Response('nope', {
      status: url.includes('missing') ? 404 : 500,
    }));
    const api = new HttpApi('http://svc');
    expect(await api.fetchBundle('missing')).toBeNull();
    await expect(api.fetchBundle('broken')).rejects.toThrow(ApiError);
  });

  it('fetches artifacts as text', async () => {
    stubFetch(() => new Response('<svg/>'));
    const api = new HttpApi('http://svc');
    const svg = await api.fetchArtifact('_r1', 'plots/silhouette.svg');
    expect(calls[0].url).toBe('http://svc/bundles/_r1/plots/silhouette.svg');
    expect(svg).toBe('<svg/>');
  });
});
