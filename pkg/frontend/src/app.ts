// Page bootstrap: one chat column, one side panel for bundle browsing.

import { HttpApi } from './api.js';
import { BundleView } from './bundle.js';
import { ChatView } from './chat.js';

export function bootstrap(doc: Document = document): void {
  const chatRoot = doc.getElementById('chat');
  const panelRoot = doc.getElementById('bundle-panel');
  const input = doc.getElementById('command-input') as HTMLInputElement | null;
  const sendButton = doc.getElementById('send-button') as HTMLButtonElement | null;
  if (!chatRoot || !panelRoot || !input || !sendButton) {
    throw new Error('chat page is missing its root elements');
  }

  const api = new HttpApi('');
  const bundles = new BundleView(panelRoot, api);
  const chat = new ChatView(chatRoot, api, {
    onBundleOpen: (requestId) => void bundles.show(requestId),
  });

  const refreshSendState = () => {
    sendButton.disabled = input.value.trim() === '';
  };
  input.addEventListener('input', refreshSendState);
  refreshSendState();

  const submit = () => {
    const text = input.value;
    if (!text.trim()) return;
    input.value = '';
    refreshSendState();
    void chat.send(text);
  };
  sendButton.addEventListener('click', submit);
  input.addEventListener('keydown', (event) => {
    if (event.key === 'Enter') submit();
  });

  void chat.start().then(() => chat.pump());
}

if (typeof window !== 'undefined' && typeof document !== 'undefined' &&
    document.getElementById('chat')) {
  bootstrap();
}
